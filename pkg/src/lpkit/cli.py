"""Command-line runner: ``lpkit <suite> [--config FILE] [--seed N] [--out DIR] [flags]``.

Exit status is 0 when every criterion of the suite passes, 1 when one
fails (the failing criteria are named on stderr) and 2 on a configuration
error (the offending field is named).  Each run writes ``summary.json`` and
``cases.csv`` to the output directory; the CSV depends only on the
configuration and seed.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .errors import ConfigError, FormatError, LpkitError
from .filters import KINDS, representable_window
from .grid import GridFunction, make_grid
from .io import convert, read_lpgf1
from .suites import SUITES, example_weight_sequence
from .weights import constant_weight_sequence, make_power_weight_sequence

__all__ = ["main", "build_parser", "load_config", "parse_weights", "suite_kwargs", "run_suite",
           "write_cases_csv"]

# config keys and their parsers; the CLI flags carry the same names
FIELDS = {
    "n": int, "L": int, "T": float, "kind": str, "weights": str, "alpha": str,
    "p": float, "q": float, "r": float, "delta": float, "window": str, "seeds": int,
    "seed": int, "depth": str, "eps": str, "tol": float, "jobs": int, "out": str,
    "figures": lambda v: str(v).lower() in ("1", "true", "yes", "on"),
}


def load_config(path) -> dict:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    out = {}
    for no, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {no}: expected key = value, got {raw.strip()!r}")
        key, val = (x.strip() for x in line.split("=", 1))
        if key not in FIELDS:
            raise ConfigError(f"{key}: unknown config field (line {no})")
        out[key] = _convert(key, val)
    return out


def _convert(key, val):
    try:
        return FIELDS[key](val)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: cannot parse {val!r}") from exc


def _floats(key, text) -> list:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: expected comma-separated numbers, got {text!r}") from exc


def _window(text) -> tuple:
    try:
        a, b = (int(x) for x in str(text).split(":"))
    except ValueError as exc:
        raise ConfigError(f"window: expected a:b, got {text!r}") from exc
    if a > b:
        raise ConfigError(f"window: empty range {a}:{b}")
    return a, b


def parse_weights(text: str) -> dict:
    """Parse ``power:s=1``, ``product:s=0.5,omega=0.25,center=0`` or ``custom:path=F,s=1``."""
    kind, _, rest = str(text).partition(":")
    if kind not in ("power", "product", "custom"):
        raise ConfigError(f"weights: unknown recipe {kind!r}; use power, product or custom")
    opts = {}
    for item in filter(None, (x.strip() for x in rest.split(","))):
        k, eq, v = item.partition("=")
        if not eq:
            raise ConfigError(f"weights: expected key=value, got {item!r}")
        opts[k.strip()] = v.strip()
    allowed = {"power": {"s"}, "product": {"s", "omega", "center"}, "custom": {"path", "s"}}[kind]
    extra = set(opts) - allowed
    if extra:
        raise ConfigError(f"weights: {kind} recipe does not take {sorted(extra)}")
    out = {"recipe": kind}
    for k, v in opts.items():
        if k == "path":
            if not Path(v).is_file():
                raise ConfigError(f"weights: file {v!r} does not exist")
            out[k] = v
        else:
            try:
                out[k] = float(v)
            except ValueError as exc:
                raise ConfigError(f"weights: {k} must be a number, got {v!r}") from exc
    if kind == "custom" and "path" not in out:
        raise ConfigError("weights: custom recipe needs path=FILE")
    return out


def _custom_omega(w: dict) -> GridFunction:
    try:
        om = read_lpgf1(w["path"])
    except (FormatError, OSError) as exc:
        raise ConfigError(f"weights: {exc}") from exc
    if om.spec.n != 1 or not om.is_real or (om.values <= 0).any():
        raise ConfigError("weights: custom omega must be a positive real 1-d LPGF1 grid")
    return om


def _require(cfg, suite, allowed):
    bad = sorted(set(cfg) - set(allowed) - {"seed", "out", "figures", "jobs"})
    if bad:
        raise ConfigError(f"{bad[0]}: not a parameter of suite {suite}")


def _positive(cfg, *keys):
    for k in keys:
        if k in cfg and not cfg[k] > 0:
            raise ConfigError(f"{k}: must be positive, got {cfg[k]}")


def suite_kwargs(suite: str, cfg: dict) -> dict:
    """Translate a merged configuration into keyword arguments of the suite."""
    if suite not in SUITES:
        raise ConfigError(f"suite: unknown suite {suite!r}")
    _positive(cfg, "p", "q", "r", "delta", "tol", "seeds", "jobs", "T")
    if "kind" in cfg and cfg["kind"] not in KINDS:
        raise ConfigError(f"kind: unknown filter kind {cfg['kind']!r}; choose from {list(KINDS)}")
    if "L" in cfg and not 3 <= cfg["L"] <= 12:
        raise ConfigError(f"L: must lie in [3, 12], got {cfg['L']}")
    w = parse_weights(cfg["weights"]) if "weights" in cfg else None
    kw = {}
    if "seed" in cfg:
        kw["seed"] = cfg["seed"]
    win = _window(cfg["window"]) if "window" in cfg else None

    if suite == "filters":
        _require(cfg, suite, {"kind", "tol"})
        kw.pop("seed", None)
        if "kind" in cfg:
            kw["kinds"] = (cfg["kind"],)
        if "tol" in cfg:
            kw["tol"] = cfg["tol"]
        return kw

    if suite == "reconstruct":
        _require(cfg, suite, {"n", "L", "T", "kind", "window", "seeds", "tol"})
        if "n" in cfg and cfg["n"] not in (1, 2):
            raise ConfigError(f"n: must be 1 or 2, got {cfg['n']}")
        for k in ("n", "L", "T", "kind", "seeds", "tol", "jobs"):
            if k in cfg:
                kw[k] = cfg[k]
        if win:
            kw["window"] = win
        spec = make_grid(kw.get("n", 1), kw.get("L", 9), kw.get("T", 1.0))
        try:
            lo, hi = representable_window(spec)
        except LpkitError as exc:
            raise ConfigError(f"T: {exc}") from exc
        w_ = kw.get("window", (2, 6))
        if not (lo <= w_[0] and w_[1] <= hi):
            raise ConfigError(f"window: {w_[0]}:{w_[1]} is outside the representable window {lo}:{hi}")
        return kw

    if suite == "maximal":
        _require(cfg, suite, {"L", "p", "q", "r", "weights", "window", "seeds", "tol"})
        for k in ("L", "p", "q", "r", "seeds", "tol", "jobs"):
            if k in cfg:
                kw[k] = cfg[k]
        if w:
            kw["s"] = w.get("s", 0.5)
            if w["recipe"] == "power":
                kw["omega"] = 0.0
            elif w["recipe"] == "product":
                kw["omega"] = w.get("omega", 0.25)
                kw["center"] = w.get("center", 0.0)
            else:
                kw["omega"] = _custom_omega(w)
        if win:
            kw["k_start"], kw["width"] = win[0], win[1] - win[0] + 1
        if not kw.get("r", 1.0) < kw.get("p", 2.0):
            raise ConfigError(f"r: must be below p for the product weight, got r={kw.get('r', 1.0)}")
        return kw

    if suite == "xclass":
        _require(cfg, suite, {"L", "p", "weights", "alpha", "window", "depth"})
        L = cfg.get("L", 8)
        p = cfg.get("p", 2.0)
        spec = make_grid(1, L, 1.0)
        kr = win or (0, min(6, L))
        kw.pop("seed", None)
        kw.update(L=L, p=p, k_range=kr)
        if w:
            s = w.get("s", 1.0)
            if w["recipe"] == "power":
                kw["weights"] = constant_weight_sequence(spec, s, kr, p)
            elif w["recipe"] == "product":
                kw["weights"] = example_weight_sequence(spec, kr, s, w.get("omega", 0.25),
                                                        w.get("center", 0.5), p)
            else:
                om = _custom_omega(w)
                if om.spec != spec:
                    raise ConfigError(f"weights: custom omega grid has L={om.spec.L}, expected L={L}")
                kw["weights"] = make_power_weight_sequence(s, om, p, 1.0, kr)
        if "alpha" in cfg:
            a = _floats("alpha", cfg["alpha"])
            if len(a) != 2:
                raise ConfigError(f"alpha: expected two numbers a1,a2, got {cfg['alpha']!r}")
            kw["alpha"] = tuple(a)
        if "depth" in cfg:
            d = [int(x) for x in _floats("depth", cfg["depth"])]
            if len(d) != 2 or not 0 <= d[0] < d[1]:
                raise ConfigError(f"depth: expected two increasing depths d1,d2, got {cfg['depth']!r}")
            kw["depths"] = tuple(d)
        return kw

    s_list = [w["s"]] if w and "s" in w else None
    if w and w["recipe"] != "power" and suite != "xclass":
        raise ConfigError(f"weights: suite {suite} takes only power:s= recipes")

    if suite == "transform-norms":
        _require(cfg, suite, {"L", "kind", "p", "q", "weights", "window", "seeds", "tol"})
        for k in ("L", "kind", "seeds", "tol"):
            if k in cfg:
                kw[k] = cfg[k]
        if "p" in cfg or "q" in cfg:
            kw["pq"] = ((cfg.get("p", 2.0), cfg.get("q", 2.0)),)
        if s_list:
            kw["s_values"] = tuple(s_list)
        if win:
            kw["k_start"], kw["width"] = win[0], win[1] - win[0] + 1
        return kw

    if suite == "almost-diagonal":
        _require(cfg, suite, {"L", "weights", "window", "seeds", "eps", "tol"})
        for k in ("L", "seeds", "tol"):
            if k in cfg:
                kw[k] = cfg[k]
        if s_list:
            kw["s_values"] = tuple(s_list)
        if "eps" in cfg:
            eps = _floats("eps", cfg["eps"])
            if not eps or min(eps) <= 0:
                raise ConfigError(f"eps: values must be positive, got {cfg['eps']!r}")
            kw["eps_values"] = tuple(eps)
        if win:
            kw["k_start"], kw["width"] = win[0], win[1] - win[0] + 1
        return kw

    if suite == "atoms":
        _require(cfg, suite, {"L", "kind", "weights", "window", "seeds", "eps", "delta", "tol"})
        for k in ("L", "kind", "seeds", "tol", "delta"):
            if k in cfg:
                kw[k] = cfg[k]
        if s_list:
            kw["s"] = s_list[0]
        if "eps" in cfg:
            eps = _floats("eps", cfg["eps"])
            if len(eps) != 1 or eps[0] <= 0:
                raise ConfigError(f"eps: atoms takes one positive value, got {cfg['eps']!r}")
            kw["eps"] = eps[0]
        if win:
            kw["window"] = win
        s = kw.get("s", 0.5)
        d = kw.get("delta", 1.0)
        if not s - math.floor(s) < d <= 1:
            raise ConfigError(f"delta: must lie in ({s - math.floor(s)}, 1] for s={s}, got {d}")
        return kw

    if suite == "embed":
        _require(cfg, suite, {"L", "kind", "weights", "p", "q", "r", "window", "seeds", "tol"})
        for k in ("L", "kind", "seeds", "tol", "q", "r"):
            if k in cfg:
                kw[k] = cfg[k]
        if "p" in cfg:
            kw["p0"] = cfg["p"]
        if s_list:
            kw["s0"] = s_list[0]
        if win:
            kw["k_start"] = win[0]
            kw["widths"] = tuple(x for x in (4, 8, 10) if win[0] + x - 1 <= win[1]) or (win[1] - win[0] + 1,)
        if not kw.get("p0", 2.0) < 4.0:
            raise ConfigError(f"p: must be below the target exponent 4, got {kw['p0']}")
        return kw
    raise ConfigError(f"suite: unknown suite {suite!r}")  # pragma: no cover


def _cell(v) -> str:
    if hasattr(v, "item"):
        v = v.item()  # numpy scalars repr as np.float64(...)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_cases_csv(path, rows) -> None:
    """One row per case, columns in first-seen order, floats written with ``repr``."""
    cols = []
    for row in rows:
        for k in row:
            if k not in cols:
                cols.append(k)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([_cell(row[c]) if c in row else "" for c in cols])


def run_suite(suite: str, cfg: dict, out: Path, figures: bool = False):
    kw = suite_kwargs(suite, cfg)
    try:
        res = SUITES[suite](**kw)
    except LpkitError as exc:
        raise ConfigError(f"{suite}: parameters rejected: {exc}") from exc
    out.mkdir(parents=True, exist_ok=True)
    summary = res.to_dict()
    summary["config"] = {k: v for k, v in sorted(cfg.items()) if k != "out"}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    write_cases_csv(out / "cases.csv", res.rows)
    if figures:
        from .plotting import render_figures
        render_figures(res, out)
    return res


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in SUITES.items():
        sp = sub.add_parser(name, help=(fn.__doc__ or "").strip().splitlines()[0])
        sp.add_argument("--config", help="flat key = value file; flags win")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory (default lpkit-out/<suite>)")
        for key in ("n", "L", "seeds", "jobs"):
            sp.add_argument(f"--{key}", type=int)
        for key in ("T", "p", "q", "r", "delta", "tol"):
            sp.add_argument(f"--{key}", type=float)
        sp.add_argument("--kind", help=f"filter kind: {', '.join(KINDS)}")
        sp.add_argument("--weights", help="power:s=S | product:s=S,omega=W,center=C | custom:path=F,s=S")
        sp.add_argument("--alpha", help="class exponents a1,a2")
        sp.add_argument("--window", help="scale window a:b")
        sp.add_argument("--depth", help="two cube depths d1,d2")
        sp.add_argument("--eps", help="comma-separated epsilon values")
        sp.add_argument("--figures", action="store_true", default=None,
                        help="also render PNG figures (needs matplotlib)")
    cp = sub.add_parser("convert", help="convert between LPGF1, grid CSV, coefficient binary and JSON")
    cp.add_argument("src")
    cp.add_argument("dst")
    cp.add_argument("--format", choices=["lpgf1", "csv", "coef", "json"])
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "convert":
            fmt = convert(args.src, args.dst, args.format)
            print(f"wrote {args.dst} ({fmt})")
            return 0
        cfg = load_config(args.config) if args.config else {}
        for key in FIELDS:
            v = getattr(args, key, None)
            if v is not None:
                cfg[key] = v
        out = Path(cfg.get("out") or Path("lpkit-out") / args.command)
        res = run_suite(args.command, cfg, out, bool(cfg.get("figures", False)))
    except (ConfigError, FormatError) as exc:
        print(f"lpkit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"lpkit: error: {exc}", file=sys.stderr)
        return 2
    print(f"{res.suite}: {res.statement}")
    for c in res.criteria:
        print(f"  [{'PASS' if c.passed else 'FAIL'}] {c.name} = {c.value!r} ({c.threshold})")
    print(f"reports in {out}")
    if not res.passed:
        print(f"lpkit: failed criteria: {', '.join(res.failed)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
