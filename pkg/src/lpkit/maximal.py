"""Dyadic maximal operators and ratio harnesses for vector maximal inequalities.

Each ``*_ratio`` function returns the left side of an inequality divided by
its right side on one input.  A uniform bound is the statement under test,
so the harnesses in :mod:`lpkit.suites` look at how the largest ratio over a
corpus moves as the number of scales grows.
"""
from __future__ import annotations

import math

import numpy as np

from .dyadic import dyadic_maximal
from .errors import DegenerateInput, IncompatibleGrids, InvalidArgument, ParameterDomainViolation
from .grid import GridFunction, GridSpec, lp_norm, mixed_norm
from .weights import WeightSequence, conjugate

__all__ = [
    "FunctionSequence",
    "hl_maximal",
    "m_sigma",
    "fefferman_stein_pair_ratio",
    "vector_maximal_ratio",
    "kernel_maximal_ratio",
    "discrete_convolution_bound",
]


class FunctionSequence:
    """Functions ``f_k`` on one grid over a contiguous range of scales."""

    def __init__(self, f: dict):
        if not f:
            raise InvalidArgument("function sequence needs at least one member")
        ks = sorted(int(k) for k in f)
        if ks != list(range(ks[0], ks[-1] + 1)):
            raise InvalidArgument(f"scales must be contiguous, got {ks}")
        items = {int(k): v for k, v in f.items()}
        spec = items[ks[0]].spec
        for v in items.values():
            if v.spec != spec:
                raise IncompatibleGrids("all members must share one grid")
        self.spec: GridSpec = spec
        self.f = items

    @property
    def k_range(self) -> tuple[int, int]:
        ks = sorted(self.f)
        return ks[0], ks[-1]

    @property
    def scales(self) -> list[int]:
        return sorted(self.f)

    def __getitem__(self, k: int) -> GridFunction:
        return self.f[k]

    def __len__(self) -> int:
        return len(self.f)

    def scaled(self, c) -> "FunctionSequence":
        return FunctionSequence({k: v * c for k, v in self.f.items()})


def hl_maximal(f: GridFunction) -> GridFunction:
    """Dyadic Hardy-Littlewood maximal function (cubes plus periodic triples)."""
    return GridFunction(f.spec, dyadic_maximal(f.values, f.spec), nonnegative=True)


def m_sigma(f: GridFunction, sigma: float) -> GridFunction:
    """``(M(|f|^sigma))^(1/sigma)``."""
    if not sigma > 0:
        raise InvalidArgument(f"sigma must be positive, got {sigma}")
    if sigma == 1:
        return hl_maximal(f)
    m = dyadic_maximal(np.abs(f.values) ** sigma, f.spec)
    return GridFunction(f.spec, m ** (1.0 / sigma), nonnegative=True)


def fefferman_stein_pair_ratio(f: GridFunction, g: GridFunction, p: float) -> float:
    """``int (Mf)^p g / int |f|^p Mg`` on the grid."""
    if not p > 1:
        raise InvalidArgument(f"p must exceed 1, got {p}")
    if f.spec != g.spec:
        raise IncompatibleGrids("f and g live on different grids")
    gv = g.values
    if not g.is_real or np.any(gv < 0):
        raise InvalidArgument("g must be real and nonnegative")
    num = np.sum((dyadic_maximal(f.values, f.spec) ** p * gv).ravel())
    den = np.sum((np.abs(f.values) ** p * dyadic_maximal(gv, g.spec)).ravel())
    if den == 0:
        raise DegenerateInput("denominator vanishes")
    return float(num / den)


def _check_pq(p, q):
    if not (1 < p < math.inf and 1 < q < math.inf):
        raise InvalidArgument(f"need 1 < p, q < inf, got p={p}, q={q}")


def _weighted_layers(fs: FunctionSequence, t: WeightSequence, maximal, sigma=1.0, offset=0):
    out = []
    for k in fs.scales:
        g = m_sigma(fs[k], sigma).values if maximal else np.abs(fs[k].values)
        out.append(t[k - offset] * g)
    return out


def _resolve_alpha(t: WeightSequence, alpha):
    if alpha is not None:
        if np.ndim(alpha) == 0:
            return float(alpha), float(alpha)
        return float(alpha[0]), float(alpha[1])
    if t.params is None:
        raise InvalidArgument("class exponents needed: pass alpha or give the weight params")
    return t.params.alpha1, t.params.alpha2


def vector_maximal_ratio(fs: FunctionSequence, t: WeightSequence, p: float, q: float,
                         shift: int = 0, alpha=None, sigma: float = 1.0) -> float:
    """Weighted vector maximal ratio with an optional scale shift i.

    Returns ``||(sum_k t_{k-i}^q (M_sigma f_k)^q)^{1/q}||_p`` divided by
    ``2^{-i alpha} ||(sum_k t_k^q |f_k|^q)^{1/q}||_p``, where alpha is alpha1
    for ``i >= 0`` and alpha2 for ``i < 0`` (unused when ``i = 0``).

    Parameters
    ----------
    alpha : float or (float, float), optional
        Overrides the exponents carried by ``t.params``.
    """
    _check_pq(p, q)
    k0, k1 = fs.k_range
    if not (t.covers(k0, k1) and t.covers(k0 - shift, k1 - shift)):
        raise InvalidArgument(f"weights {t.k_range} do not cover scales {k0}..{k1} shifted by {shift}")
    factor = 1.0
    if shift != 0:
        a1, a2 = _resolve_alpha(t, alpha)
        factor = 2.0 ** (-shift * (a1 if shift > 0 else a2))
    num = mixed_norm(fs.spec, _weighted_layers(fs, t, True, sigma, shift), p, q)
    den = factor * mixed_norm(fs.spec, _weighted_layers(fs, t, False), p, q)
    if den == 0:
        raise DegenerateInput("right-hand side vanishes")
    return num / den


def kernel_maximal_ratio(fs: FunctionSequence, t: WeightSequence, p: float, q: float,
                         K: float, direction: str, alpha=None) -> float:
    """Ratio for maximal functions summed against the kernel ``2^{(j-k)K}``.

    ``direction="past"`` sums ``j <= k`` and requires ``K > alpha2``;
    ``direction="future"`` sums ``j >= k`` and requires ``K < alpha1``.
    """
    _check_pq(p, q)
    a1, a2 = _resolve_alpha(t, alpha)
    if direction == "past":
        if not K > a2:
            raise ParameterDomainViolation(f"past kernel needs K > alpha2={a2}, got K={K}")
    elif direction == "future":
        if not K < a1:
            raise ParameterDomainViolation(f"future kernel needs K < alpha1={a1}, got K={K}")
    else:
        raise InvalidArgument(f"direction must be 'past' or 'future', got {direction!r}")
    k0, k1 = fs.k_range
    if not t.covers(k0, k1):
        raise InvalidArgument(f"weights {t.k_range} do not cover scales {k0}..{k1}")
    mf = {k: dyadic_maximal(fs[k].values, fs.spec) for k in fs.scales}
    layers = []
    for k in fs.scales:
        js = range(k0, k + 1) if direction == "past" else range(k, k1 + 1)
        acc = np.zeros(fs.spec.shape)
        for j in js:
            acc = acc + 2.0 ** ((j - k) * K) * mf[j]
        layers.append(t[k] * acc)
    num = mixed_norm(fs.spec, layers, p, q)
    den = mixed_norm(fs.spec, _weighted_layers(fs, t, False), p, q)
    if den == 0:
        raise DegenerateInput("right-hand side vanishes")
    return num / den


def discrete_convolution_bound(fs: FunctionSequence, gs: FunctionSequence, a: float,
                               q: float, p: float, r: float) -> tuple[float, float]:
    """Both sides of the discrete convolution inequality.

    ``lhs = sum_k delta_k^q + sum_k eta_k^q`` with
    ``delta_k = sum_{j<=k} a^{k-j} ||g_k f_j||_1^{1/q}`` and
    ``eta_k = sum_{j>=k} a^{j-k} ||g_k f_j||_1^{1/q}``;
    ``rhs = ||(sum f_k^r)^{1/r}||_p ||(sum g_k^{r'})^{1/r'}||_{p'}``.
    """
    if not 0 < a < 1:
        raise InvalidArgument(f"a must lie in (0, 1), got {a}")
    if not (1 <= p <= math.inf and 1 <= r <= math.inf and 0 < q < math.inf):
        raise InvalidArgument(f"need 1 <= p, r <= inf and 0 < q < inf")
    if fs.spec != gs.spec:
        raise IncompatibleGrids("f and g sequences live on different grids")
    for seq in (fs, gs):
        for v in seq.f.values():
            if not v.is_real or np.any(v.values < 0):
                raise InvalidArgument("sequences must be real and nonnegative")
    f_zero = all(not np.any(v.values) for v in fs.f.values())
    g_zero = all(not np.any(v.values) for v in gs.f.values())
    if g_zero:
        if f_zero:
            return 0.0, 0.0
        raise DegenerateInput("all g_k vanish")
    spec = fs.spec
    vol = spec.cell_volume
    fk, gk = fs.scales, gs.scales
    # pair[k][j] = ||g_k f_j||_1^{1/q}
    pair = {k: {j: float(vol * np.sum((gs[k].values * fs[j].values).ravel())) ** (1.0 / q)
                for j in fk} for k in gk}
    lhs = 0.0
    for k in gk:
        delta = sum(a ** (k - j) * pair[k][j] for j in fk if j <= k)
        eta = sum(a ** (j - k) * pair[k][j] for j in fk if j >= k)
        lhs += delta ** q + eta ** q
    rhs = (mixed_norm(spec, [fs[k] for k in fk], p, r)
           * mixed_norm(spec, [gs[k] for k in gk], conjugate(p), conjugate(r)))
    return float(lhs), float(rhs)
