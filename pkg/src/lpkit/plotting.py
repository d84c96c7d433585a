"""Optional PNG figures for suite results (``lpkit <suite> --figures``)."""
from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import numpy as np

_VALUE_KEYS = ("ratio", "rel_l2_error", "norm_ratio", "max_ratio", "C", "beta", "ap_half", "ap_one")


def render_figures(result, out) -> list:
    """Write one figure per plottable column of ``result.rows``; returns the paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out)
    paths = []
    if result.suite == "filters":
        from .filters import build_filter_pair

        r = np.geomspace(0.25, 4.0, 512)
        fig, ax = plt.subplots(figsize=(6, 3.5))
        for row in result.rows:
            pair = build_filter_pair(row["kind"])
            ax.semilogx(r, pair.eta(r), label=f"{row['kind']} phi")
            ax.semilogx(r, pair.psi(r), "--", label=f"{row['kind']} psi")
        ax.set_xlabel("|xi|")
        ax.legend(fontsize=8)
        paths.append(_save(fig, out / "filters.png"))
        return paths
    for key in _VALUE_KEYS:
        groups = defaultdict(list)
        for row in result.rows:
            if key in row:
                label = ",".join(f"{k}={row[k]}" for k in ("check", "s", "eps", "k_hi", "width", "L")
                                 if k in row)
                groups[label].append(float(row[key]))
        if not groups:
            continue
        fig, ax = plt.subplots(figsize=(6, 3.5))
        for label, vals in groups.items():
            ax.plot(range(len(vals)), vals, "o-", ms=3, label=label)
        ax.set_xlabel("case")
        ax.set_ylabel(key)
        if len(groups) <= 12:
            ax.legend(fontsize=6)
        paths.append(_save(fig, out / f"{result.suite}_{key}.png"))
    return paths


def _save(fig, path) -> Path:
    import matplotlib.pyplot as plt

    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
    return path
