"""Elementary and Sobolev-type embeddings between weighted spaces."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import DyadicCube
from .errors import DegenerateInput, IncompatibleGrids, InvalidArgument
from .filters import FilterPair
from .grid import GridFunction, lp_norm
from .transform import CoefficientField, NormParams, _resolve_window, scale_components, seq_norm
from .weights import WeightSequence

__all__ = [
    "elementary_embedding_check",
    "sobolev_condition",
    "sobolev_condition_detail",
    "sobolev_ratio",
    "EmbeddingCase",
]


def _inner(layers, q: float) -> np.ndarray:
    if math.isinf(q):
        return np.max(np.stack(layers), axis=0)
    acc = np.zeros(layers[0].shape)
    for g in layers:
        acc = acc + g ** q
    return acc ** (1.0 / q)


def elementary_embedding_check(f: GridFunction, t: WeightSequence, p: float, q: float, r: float,
                               pair: FilterPair, window=None) -> tuple[float, float]:
    """``(f_norm with inner exponent r, f_norm with inner exponent q)`` for ``q <= r``.

    The pointwise inequality between the inner sums is exact, so the
    r-sum is capped by the q-sum at each point before integrating; the cap
    only removes round-off.
    """
    if not 0 < q <= r:
        raise InvalidArgument(f"need 0 < q <= r, got q={q}, r={r}")
    NormParams(p, q)
    k_lo, k_hi = _resolve_window(f.spec, t, window)
    comps = scale_components(f, pair, (k_lo, k_hi), "phi")
    layers = [t[k] * np.abs(comps[k].values) for k in range(k_lo, k_hi + 1)]
    big = _inner(layers, q)
    small = big if r == q else np.minimum(_inner(layers, r), big)
    return (lp_norm(GridFunction(f.spec, small), p), lp_norm(GridFunction(f.spec, big), p))


def sobolev_condition_detail(t: WeightSequence, w: WeightSequence, depth: int | None = None):
    """Largest ``w_{k,Q}(p1) / t_{k,Q}(p0)`` and the cube attaining it.

    ``p0 = t.p`` and ``p1 = w.p``; the local quantities are the unaveraged
    norms ``||t_k | L_p(Q)||`` over cubes of side ``2^-k``.  ``depth`` keeps
    only the first ``depth`` scales of the shared range.
    """
    if t.k_range != w.k_range:
        raise InvalidArgument(f"k ranges differ: {t.k_range} and {w.k_range}")
    if t.spec != w.spec:
        raise IncompatibleGrids("weights live on different grids")
    ks = t.scales if depth is None else t.scales[:depth]
    best, arg = -math.inf, None
    for k in ks:
        den = t.local_norms(k)
        if np.any(den == 0):
            raise DegenerateInput(f"t has a vanishing local norm at scale {k}")
        ratio = w.local_norms(k) / den
        idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
        if ratio[idx] > best:
            best, arg = float(ratio[idx]), DyadicCube(k, tuple(int(i) for i in idx))
    return best, arg


def sobolev_condition(t: WeightSequence, w: WeightSequence, depth: int | None = None) -> float:
    """``sup_{k,Q} w_{k,Q}(p1) / t_{k,Q}(p0)``; see :func:`sobolev_condition_detail`."""
    return sobolev_condition_detail(t, w, depth)[0]


def sobolev_ratio(lam: CoefficientField, t: WeightSequence, w: WeightSequence,
                  p0: float, q: float, p1: float, r: float) -> float:
    """``seq_norm(lam; w, p1, r) / seq_norm(lam; t, p0, q)`` for ``p0 < p1``."""
    if not p0 < p1:
        raise InvalidArgument(f"need p0 < p1, got p0={p0}, p1={p1}")
    den = seq_norm(lam, t, NormParams(p0, q))
    if den == 0:
        raise DegenerateInput("coefficient field has zero norm")
    return seq_norm(lam, w, NormParams(p1, r)) / den


@dataclass
class EmbeddingCase:
    """One embedding experiment: source ``(t, p0, q)`` and target ``(w, p1, r)``."""

    p0: float
    q: float
    p1: float
    r: float
    condition_sup: float
    ratios: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"source": {"p": self.p0, "q": self.q}, "target": {"p": self.p1, "r": self.r},
                "condition_sup": self.condition_sup,
                "ratios": {str(k): v for k, v in sorted(self.ratios.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
