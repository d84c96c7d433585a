"""Muckenhoupt diagnostics and the two-sided cross-scale weight class.

Every supremum over cubes is restricted to dyadic cubes of the grid, so all
constants returned here are lower estimates of the continuous ones.  Power
weights are sampled at cell centers, which keeps ``|x - c|^alpha`` finite
for negative exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dyadic import DyadicCube, cube_layout, scale_means, scale_range, upsample
from .errors import CubeResolutionError, InvalidArgument, InvalidWeight
from .grid import GridFunction, GridSpec, make_grid

__all__ = [
    "XClassParams",
    "WeightSequence",
    "XClassReport",
    "conjugate",
    "power_weight",
    "ap_constant",
    "ap_constant_detail",
    "power_weight_in_ap",
    "power_mean",
    "x_class_constants",
    "make_power_weight_sequence",
    "constant_weight_sequence",
    "same_muckenhoupt_check",
    "reverse_holder_epsilon",
    "measure_comparison_check",
    "ap_depth_sweep",
]


def conjugate(r: float) -> float:
    """Hoelder conjugate ``r' = r / (r - 1)``, with ``1' = inf``."""
    r = float(r)
    if r == 1:
        return math.inf
    if math.isinf(r):
        return 1.0
    return r / (r - 1.0)


@dataclass(frozen=True)
class XClassParams:
    """Exponents of the class: decay rates alpha, cube-mean orders sigma."""

    alpha1: float
    alpha2: float
    sigma1: float
    sigma2: float
    p: float
    theta: float = 1.0

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0 and self.p > 0):
            raise InvalidArgument("sigma1, sigma2 and p must be positive")
        if not 0 < self.theta <= self.p:
            raise InvalidArgument(f"theta must lie in (0, p], got {self.theta}")

    @classmethod
    def standard(cls, alpha1: float, alpha2: float, p: float, theta: float = 1.0,
                 sigma2: float | None = None) -> "XClassParams":
        """Parameters with ``sigma1 = theta (p/theta)'`` and ``sigma2 = p`` by default."""
        return cls(float(alpha1), float(alpha2), theta * conjugate(p / theta),
                   float(p if sigma2 is None else sigma2), float(p), float(theta))

    def to_dict(self) -> dict:
        return {"alpha1": self.alpha1, "alpha2": self.alpha2, "sigma1": self.sigma1,
                "sigma2": self.sigma2, "p": self.p, "theta": self.theta}


def _positive_array(spec: GridSpec, w) -> np.ndarray:
    v = w.values if isinstance(w, GridFunction) else np.asarray(w)
    if v.size != spec.size:
        raise InvalidArgument(f"weight has {v.size} samples, grid has {spec.size}")
    v = v.reshape(spec.shape)
    if np.iscomplexobj(v):
        if np.any(v.imag != 0):
            raise InvalidWeight("weight must be real")
        v = v.real
    v = v.astype(float)
    if not np.all(v > 0) or not np.all(np.isfinite(v)):
        raise InvalidWeight("weight must be finite and strictly positive at every grid point")
    v = v.copy()
    v.setflags(write=False)
    return v


class WeightSequence:
    """Per-scale positive weights ``t_k`` on one grid, with exponent p.

    Parameters
    ----------
    spec : GridSpec
    t : dict
        ``k -> GridFunction or array`` over a contiguous range of scales.
    p : float
        Integrability exponent used for the local norms ``t_{k,m}``.
    params : XClassParams, optional
        Class parameters the sequence is known (or claimed) to satisfy.
    """

    def __init__(self, spec: GridSpec, t: dict, p: float, params: XClassParams | None = None):
        if not t:
            raise InvalidArgument("weight sequence needs at least one scale")
        ks = sorted(int(k) for k in t)
        if ks != list(range(ks[0], ks[-1] + 1)):
            raise InvalidArgument(f"scales must be contiguous, got {ks}")
        if not p > 0:
            raise InvalidArgument(f"exponent p must be positive, got {p}")
        self.spec = spec
        self.p = float(p)
        self.params = params
        self.t = {int(k): _positive_array(spec, v) for k, v in t.items()}

    @property
    def k_range(self) -> tuple[int, int]:
        ks = sorted(self.t)
        return ks[0], ks[-1]

    @property
    def scales(self) -> list[int]:
        lo, hi = self.k_range
        return list(range(lo, hi + 1))

    def covers(self, k_lo: int, k_hi: int) -> bool:
        lo, hi = self.k_range
        return lo <= k_lo and k_hi <= hi

    def __getitem__(self, k: int) -> np.ndarray:
        return self.t[k]

    def local_means(self, k: int, exponent: float | None = None, scale: int | None = None) -> np.ndarray:
        """``M_{Q,e}(t_k)`` for every cube Q of side ``2^-scale`` (default scale k)."""
        e = self.p if exponent is None else float(exponent)
        return power_mean(self.t[k], self.spec, k if scale is None else scale, e)

    def local_norms(self, k: int, exponent: float | None = None) -> np.ndarray:
        """``t_{k,m} = ||t_k | L_e(Q_{k,m})||`` for all m, with e = p by default."""
        e = self.p if exponent is None else float(exponent)
        vol = 2.0 ** (-k * self.spec.n)
        if math.isinf(e):
            return self.local_means(k, e)
        return vol ** (1.0 / e) * self.local_means(k, e)

    def shifted(self, gamma: int) -> "WeightSequence":
        """Sequence ``s_k = t_{k - gamma}`` on the shifted range."""
        return WeightSequence(self.spec, {k + gamma: v for k, v in self.t.items()}, self.p, self.params)

    def restricted(self, k_lo: int, k_hi: int) -> "WeightSequence":
        if not self.covers(k_lo, k_hi):
            raise InvalidArgument(f"range {k_lo}..{k_hi} not inside {self.k_range}")
        return WeightSequence(self.spec, {k: self.t[k] for k in range(k_lo, k_hi + 1)},
                              self.p, self.params)

    def powered(self, e: float) -> "WeightSequence":
        return WeightSequence(self.spec, {k: v ** e for k, v in self.t.items()}, self.p)


def power_mean(w, spec: GridSpec, k: int, e: float) -> np.ndarray:
    """``M_{Q,e}(w) = (mean_Q |w|^e)^(1/e)`` for every cube of scale k.

    ``e = inf`` gives the block maximum.
    """
    v = w.values if isinstance(w, GridFunction) else np.asarray(w)
    if math.isinf(e):
        b, M = cube_layout(spec, k)
        blocks = np.abs(v).reshape(*sum(((M, b) for _ in range(spec.n)), ()))
        return blocks.max(axis=tuple(range(1, 2 * spec.n, 2)))
    m = scale_means(v, spec, k, e)
    return m if e == 1 else m ** (1.0 / e)


def _block_min(v: np.ndarray, spec: GridSpec, k: int) -> np.ndarray:
    b, M = cube_layout(spec, k)
    blocks = v.reshape(*sum(((M, b) for _ in range(spec.n)), ()))
    return blocks.min(axis=tuple(range(1, 2 * spec.n, 2)))


def power_weight(spec: GridSpec, exponent: float, center=None) -> GridFunction:
    """``|x - center|^exponent`` at cell centers; center defaults to the domain midpoint."""
    c = np.full(spec.n, spec.T / 2) if center is None else np.atleast_1d(np.asarray(center, float))
    xs = spec.coordinates(centers=True)
    r2 = sum((x - ci) ** 2 for x, ci in zip(xs, c))
    return GridFunction(spec, np.sqrt(r2) ** exponent, nonnegative=True)


def _depth_scales(spec: GridSpec, depth: int | None) -> range:
    lo, hi = scale_range(spec)
    top = hi if depth is None else min(int(depth), hi)
    if top < lo:
        raise CubeResolutionError(f"depth {depth} leaves no representable cube")
    return range(lo, top + 1)


def ap_constant_detail(w, p: float, depth: int | None = None, spec: GridSpec | None = None):
    """Return ``(constant, worst cube)`` of the dyadic A_p estimate."""
    if isinstance(w, GridFunction):
        spec = w.spec
    if spec is None:
        raise InvalidArgument("a GridSpec is needed for raw weight arrays")
    p = float(p)
    if not p >= 1:
        raise InvalidArgument(f"A_p needs p >= 1, got {p}")
    v = _positive_array(spec, w)
    best, worst = -math.inf, None
    inv = None if p == 1 else v ** (-1.0 / (p - 1.0))
    for k in _depth_scales(spec, depth):
        mw = scale_means(v, spec, k)
        if p == 1:
            prod = mw / _block_min(v, spec, k)
        else:
            prod = mw * scale_means(inv, spec, k) ** (p - 1.0)
        idx = np.unravel_index(int(np.argmax(prod)), prod.shape)
        if prod[idx] > best:
            best, worst = float(prod[idx]), DyadicCube(k, tuple(int(i) for i in idx))
    return best, worst


def ap_constant(w, p: float, depth: int | None = None) -> float:
    """Dyadic estimate of the A_p constant of w.

    The maximum over dyadic cubes of scale at most ``depth`` of
    ``M_Q(w) M_{Q,p'/p}(w^-1)``; for ``p = 1`` of ``M_Q(w) / min_Q w``.

    Examples
    --------
    >>> from lpkit.grid import make_grid, GridFunction
    >>> ap_constant(GridFunction.constant(make_grid(1, 6, 1.0), 1.0), 2)
    1.0
    """
    return ap_constant_detail(w, p, depth)[0]


def power_weight_in_ap(alpha_exp: float, p: float, n: int) -> bool:
    """Whether ``|x|^alpha`` is an A_p weight on R^n: ``-n < alpha < n(p-1)``."""
    if not p > 1:
        raise InvalidArgument(f"p must exceed 1, got {p}")
    return -n < alpha_exp < n * (p - 1)


def ap_depth_sweep(exponent: float, p: float, depths, n: int = 1) -> list[float]:
    """A_p estimates of ``|x - 1/2|^exponent`` on grids resolving each depth.

    Depth d uses the unit torus at resolution ``L = d``, so the finest cubes
    are single cells.  Power weights are dilation invariant, so this is the
    same family as ``|x|^exponent`` on any symmetric interval.
    """
    out = []
    for d in depths:
        spec = make_grid(n, int(d), 1.0)
        out.append(ap_constant(power_weight(spec, exponent), p))
    return out


@dataclass
class XClassReport:
    C1: float
    C2: float
    alpha_fit: tuple
    worst_cases: list
    depth: int
    params: XClassParams
    C_fit: tuple = field(default=(math.nan, math.nan))

    def to_dict(self) -> dict:
        return {
            "C1": self.C1, "C2": self.C2,
            "alpha_fit": list(self.alpha_fit),
            "C_fit": list(self.C_fit),
            "worst_cases": self.worst_cases,
            "depth": self.depth,
            "params": self.params.to_dict(),
        }


def x_class_constants(t: WeightSequence, params: XClassParams, depth: int | None = None) -> XClassReport:
    """Estimate the two class constants of a weight sequence.

    ``C1`` is the largest ``M_{Q,p}(t_k) M_{Q,sigma1}(t_j^-1) 2^{-alpha1 (k-j)}``
    and ``C2`` the largest ``M_{Q,p}(t_k)^-1 M_{Q,sigma2}(t_j) 2^{-alpha2 (j-k)}``
    over ``k <= j`` in the weight range and dyadic cubes Q up to ``depth``.

    ``alpha_fit`` holds the best exponents with unit constant read off the
    pairs ``k < j``: the largest alpha1 and the smallest alpha2 for which every
    such product stays below 1.  ``C_fit`` are the constants at those fits.
    """
    ks = t.scales
    if len(ks) < 2:
        raise InvalidArgument("need at least two scales")
    spec = t.spec
    scales = list(_depth_scales(spec, depth))
    p = params.p
    C1 = C2 = -math.inf
    w1 = w2 = None
    a1_fit, a2_fit = math.inf, -math.inf
    logs = []
    for q in scales:
        mp = {k: power_mean(t[k], spec, q, p) for k in ks}
        ms1 = {k: power_mean(1.0 / t[k], spec, q, params.sigma1) for k in ks}
        ms2 = {k: power_mean(t[k], spec, q, params.sigma2) for k in ks}
        for i, k in enumerate(ks):
            for j in ks[i:]:
                P1 = mp[k] * ms1[j]
                P2 = ms2[j] / mp[k]
                v1 = P1 * 2.0 ** (-params.alpha1 * (k - j))
                v2 = P2 * 2.0 ** (-params.alpha2 * (j - k))
                i1 = int(np.argmax(v1))
                i2 = int(np.argmax(v2))
                if v1.flat[i1] > C1:
                    C1 = float(v1.flat[i1])
                    w1 = {"constant": "C1", "k": k, "j": j,
                          "cube": [q, *np.unravel_index(i1, v1.shape)]}
                if v2.flat[i2] > C2:
                    C2 = float(v2.flat[i2])
                    w2 = {"constant": "C2", "k": k, "j": j,
                          "cube": [q, *np.unravel_index(i2, v2.shape)]}
                if j > k:
                    l1 = float(np.log2(P1).max())
                    l2 = float(np.log2(P2).max())
                    a1_fit = min(a1_fit, l1 / (k - j))
                    a2_fit = max(a2_fit, l2 / (j - k))
                    logs.append((k, j, l1, l2))
    for w in (w1, w2):
        w["cube"] = [int(x) for x in w["cube"]]
    c1f = max(2.0 ** (l1 - a1_fit * (k - j)) for k, j, l1, _ in logs)
    c2f = max(2.0 ** (l2 - a2_fit * (j - k)) for k, j, _, l2 in logs)
    return XClassReport(C1, C2, (a1_fit, a2_fit), [w1, w2], scales[-1], params, (c1f, c2f))


def constant_weight_sequence(spec: GridSpec, s: float, k_range: tuple[int, int], p: float,
                             theta: float = 1.0) -> WeightSequence:
    """``t_k = 2^{ks}`` constant in x, with class exponents ``alpha1 = alpha2 = s``."""
    t = {k: np.full(spec.shape, 2.0 ** (k * s)) for k in range(k_range[0], k_range[1] + 1)}
    return WeightSequence(spec, t, p, XClassParams.standard(s, s, p, theta))


def make_power_weight_sequence(s: float, omega, p: float, r: float,
                               k_range: tuple[int, int]) -> WeightSequence:
    """``t_k = 2^{ks} omega`` with parameters ``alpha = (s, s)``, ``sigma = (r (p/r)', p)``."""
    if not 0 < r < p:
        raise InvalidArgument(f"need 0 < r < p, got r={r}, p={p}")
    if not isinstance(omega, GridFunction):
        raise InvalidArgument("omega must be a GridFunction")
    om = _positive_array(omega.spec, omega)
    t = {k: 2.0 ** (k * s) * om for k in range(k_range[0], k_range[1] + 1)}
    params = XClassParams(float(s), float(s), r * conjugate(p / r), float(p), float(p), float(r))
    return WeightSequence(omega.spec, t, p, params)


def same_muckenhoupt_check(t: WeightSequence, p: float, theta: float, depth: int | None = None):
    """A_{p/theta} estimates of ``t_k^p`` for every k and their max/min spread."""
    if not p / theta > 1:
        raise InvalidArgument(f"need p/theta > 1, got {p / theta}")
    consts = {k: ap_constant_detail(t[k] ** p, p / theta, depth, t.spec)[0] for k in t.scales}
    vals = list(consts.values())
    return consts, max(vals) / min(vals)


def reverse_holder_epsilon(w, depth: int | None = None, C: float = 10.0,
                           eps_grid=(0.05, 0.1, 0.2, 0.4)):
    """Largest eps in ``eps_grid`` with ``M_{Q,1+eps}(w) <= C M_Q(w)`` on all cubes.

    Returns ``(eps, ratios)`` where ``ratios[eps]`` is the worst ratio; eps is
    None when no candidate passes.
    """
    spec = w.spec
    v = _positive_array(spec, w)
    ratios = {}
    for eps in eps_grid:
        worst = 0.0
        for k in _depth_scales(spec, depth):
            r = power_mean(v, spec, k, 1.0 + eps) / scale_means(v, spec, k)
            worst = max(worst, float(r.max()))
        ratios[eps] = worst
    ok = [e for e in eps_grid if ratios[e] <= C]
    return (max(ok) if ok else None), ratios


def measure_comparison_check(w, p: float, depth: int | None = 6) -> float:
    """Worst ``(|E|/|Q|)^{p-1} M_Q(w) / (A M_E(w))`` over dyadic ``E`` inside ``Q``.

    ``A`` is the dyadic A_p estimate at the same depth, so a value at most 1
    means the comparison holds with that constant.
    """
    spec = w.spec
    v = _positive_array(spec, w)
    A = ap_constant(w, p, depth)
    scales = list(_depth_scales(spec, depth))
    means = {k: scale_means(v, spec, k) for k in scales}
    worst = 0.0
    for i, kq in enumerate(scales):
        for ke in scales[i:]:
            up = upsample(means[kq], 2 ** (ke - kq))
            frac = 2.0 ** (-spec.n * (ke - kq))
            r = frac ** (p - 1.0) * up / (A * means[ke])
            worst = max(worst, float(r.max()))
    return worst
