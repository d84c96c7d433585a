"""phi-transform analysis and synthesis, and the weighted function and sequence norms.

Coefficients are indexed by scale k and lattice position m.  At scale k the
lattice points ``2^-k m`` are every ``b = 2^-k / h``-th grid point, so a
scale carries ``(T 2^k)^n`` coefficients.

The analysis coefficient ``<f, phi_{k,m}>`` equals ``2^{-kn/2} (phi~_k * f)``
sampled at the lattice point, and synthesis sums ``lambda_{k,m} psi_{k,m}``
by filtering a lattice impulse train with the psi symbol.  Sampling aliases
sit at multiples of ``2 pi 2^k`` and miss the psi annulus, so
``synthesize(analyze(f)) = f`` up to round-off for f whose spectrum lies in
the interior of the scale window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dyadic import cube_layout, scale_range, upsample
from .errors import CubeResolutionError, DegenerateInput, IncompatibleGrids, IncompatibleWindows, InvalidArgument
from .filters import FilterPair, filter_symbol, representable_window
from .grid import GridFunction, GridSpec, mixed_norm, spectral_multiply
from .weights import WeightSequence

__all__ = [
    "NormParams",
    "CoefficientField",
    "check_window",
    "analyze",
    "synthesize",
    "scale_components",
    "f_norm",
    "seq_norm",
    "peak_functional",
    "coefficient_bound_check",
    "sup_inf_functionals",
]


@dataclass(frozen=True)
class NormParams:
    """Exponents of the norm; ``J = n / min(1, p, q)`` is taken per dimension."""

    p: float
    q: float

    def __post_init__(self):
        if not (0 < self.p < math.inf):
            raise InvalidArgument(f"p must lie in (0, inf), got {self.p}")
        if not self.q > 0:
            raise InvalidArgument(f"q must be positive, got {self.q}")

    def J(self, n: int) -> float:
        return n / min(1.0, self.p, self.q)


def check_window(spec: GridSpec, window) -> tuple[int, int]:
    k_lo, k_hi = int(window[0]), int(window[1])
    w_lo, w_hi = representable_window(spec)
    if k_hi < k_lo or k_lo < w_lo or k_hi > w_hi:
        raise CubeResolutionError(
            f"scale window {k_lo}..{k_hi} outside representable window {w_lo}..{w_hi}")
    return k_lo, k_hi


class CoefficientField:
    """Coefficients ``lambda_{k,m}`` over a contiguous window of scales.

    Parameters
    ----------
    spec : GridSpec
        Ambient grid; fixes the lattice size at each scale.
    coeffs : dict
        ``k -> complex array of shape (M_k,)*n`` with ``M_k = T 2^k``.
    """

    def __init__(self, spec: GridSpec, coeffs: dict):
        if not coeffs:
            raise InvalidArgument("coefficient field needs at least one scale")
        ks = sorted(int(k) for k in coeffs)
        if ks != list(range(ks[0], ks[-1] + 1)):
            raise InvalidArgument(f"scales must be contiguous, got {ks}")
        self.spec = spec
        self.coeffs = {}
        for k in ks:
            _, M = cube_layout(spec, k)
            a = np.asarray(coeffs[k], dtype=np.complex128)
            if a.size != M ** spec.n:
                raise InvalidArgument(f"scale {k} needs {M ** spec.n} coefficients, got {a.size}")
            a = a.reshape((M,) * spec.n).copy()
            a.setflags(write=False)
            self.coeffs[k] = a

    @classmethod
    def zeros(cls, spec: GridSpec, window) -> "CoefficientField":
        return cls(spec, {k: np.zeros((cube_layout(spec, k)[1],) * spec.n, complex)
                          for k in range(window[0], window[1] + 1)})

    @classmethod
    def from_entries(cls, spec: GridSpec, window, entries: dict) -> "CoefficientField":
        """Build from ``{(k, m): value}`` with m a tuple; other entries are zero."""
        data = {k: np.zeros((cube_layout(spec, k)[1],) * spec.n, complex)
                for k in range(window[0], window[1] + 1)}
        for (k, m), v in entries.items():
            if k not in data:
                raise IncompatibleWindows(f"entry at scale {k} outside window {window}")
            data[k][tuple(np.atleast_1d(m))] = v
        return cls(spec, data)

    @property
    def window(self) -> tuple[int, int]:
        ks = sorted(self.coeffs)
        return ks[0], ks[-1]

    @property
    def scales(self) -> list[int]:
        return sorted(self.coeffs)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.coeffs[k]

    def entries(self):
        """Nonzero entries ``(k, m, value)`` in scale then lexicographic order."""
        for k in self.scales:
            a = self.coeffs[k]
            for idx in zip(*np.nonzero(a)):
                yield k, tuple(int(i) for i in idx), complex(a[idx])

    def count(self) -> int:
        return int(sum(np.count_nonzero(a) for a in self.coeffs.values()))

    def _same(self, other: "CoefficientField"):
        if other.spec != self.spec:
            raise IncompatibleGrids("coefficient fields on different grids")
        if other.window != self.window:
            raise IncompatibleWindows(f"windows {self.window} and {other.window} differ")

    def __add__(self, other: "CoefficientField") -> "CoefficientField":
        self._same(other)
        return CoefficientField(self.spec, {k: self.coeffs[k] + other.coeffs[k] for k in self.scales})

    def __sub__(self, other: "CoefficientField") -> "CoefficientField":
        self._same(other)
        return CoefficientField(self.spec, {k: self.coeffs[k] - other.coeffs[k] for k in self.scales})

    def __mul__(self, c) -> "CoefficientField":
        return CoefficientField(self.spec, {k: c * v for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def abs(self) -> "CoefficientField":
        return CoefficientField(self.spec, {k: np.abs(v) for k, v in self.coeffs.items()})

    def max_abs(self) -> float:
        return max(float(np.abs(v).max()) for v in self.coeffs.values())

    def restricted(self, k_lo: int, k_hi: int) -> "CoefficientField":
        return CoefficientField(self.spec, {k: self.coeffs[k] for k in range(k_lo, k_hi + 1)})


def _lattice_step(spec: GridSpec, k: int) -> int:
    return cube_layout(spec, k)[0]


def scale_components(f: GridFunction, pair: FilterPair, window, which: str = "phi") -> dict:
    """``k -> phi_k * f`` (or the psi or phi~ filtered copies) over the window."""
    k_lo, k_hi = check_window(f.spec, window)
    return {k: spectral_multiply(f, filter_symbol(pair, which, k, f.spec))
            for k in range(k_lo, k_hi + 1)}


def analyze(f: GridFunction, pair: FilterPair, k_window) -> CoefficientField:
    """phi-transform coefficients ``lambda_{k,m} = 2^{-kn/2} (phi~_k * f)(2^-k m)``."""
    spec = f.spec
    comps = scale_components(f, pair, k_window, "phi_tilde")
    coeffs = {}
    for k, g in comps.items():
        b = _lattice_step(spec, k)
        sl = (slice(None, None, b),) * spec.n
        coeffs[k] = 2.0 ** (-k * spec.n / 2) * g.values[sl]
    return CoefficientField(spec, coeffs)


def synthesize(lam: CoefficientField, pair: FilterPair, spec: GridSpec | None = None) -> GridFunction:
    """``sum_{k,m} lambda_{k,m} psi_{k,m}`` on the grid."""
    spec = lam.spec if spec is None else spec
    if spec != lam.spec:
        raise IncompatibleGrids("coefficient field was built for another grid")
    check_window(spec, lam.window)
    total = np.zeros(spec.shape, dtype=complex)
    for k in lam.scales:
        b = _lattice_step(spec, k)
        impulses = np.zeros(spec.shape, dtype=complex)
        impulses[(slice(None, None, b),) * spec.n] = (
            lam[k] * (2.0 ** (-k * spec.n / 2) / spec.cell_volume))
        out = spectral_multiply(GridFunction(spec, impulses), filter_symbol(pair, "psi", k, spec))
        total = total + out.values
    return GridFunction(spec, total)


def _resolve_window(spec: GridSpec, t: WeightSequence, window):
    window = representable_window(spec) if window is None else window
    k_lo, k_hi = check_window(spec, window)
    if not t.covers(k_lo, k_hi):
        raise IncompatibleWindows(f"weights {t.k_range} do not cover window {k_lo}..{k_hi}")
    if t.spec != spec:
        raise IncompatibleGrids("weights live on another grid")
    return k_lo, k_hi


def f_norm(f: GridFunction, t: WeightSequence, np_: NormParams, pair: FilterPair,
           window=None) -> float:
    """``||(sum_k t_k^q |phi_k * f|^q)^{1/q} | L_p||`` over the scale window.

    The window defaults to the whole representable window of the grid and
    must be covered by ``t``.  ``q = inf`` takes the supremum over k.
    """
    k_lo, k_hi = _resolve_window(f.spec, t, window)
    comps = scale_components(f, pair, (k_lo, k_hi), "phi")
    layers = [t[k] * np.abs(comps[k].values) for k in range(k_lo, k_hi + 1)]
    return mixed_norm(f.spec, layers, np_.p, np_.q)


def seq_norm(lam: CoefficientField, t: WeightSequence, np_: NormParams, mode="standard") -> float:
    """Weighted sequence quasi-norm of a coefficient field.

    Parameters
    ----------
    mode : "standard" or ("delta", delta)
        ``standard`` integrates ``2^{knq/2} t_k^q |lambda_{k,m}|^q`` against the
        cube indicators with the pointwise weight ``t_k``.  ``("delta", d)``
        replaces ``t_k`` on each cube by ``t_{k,m,d} = ||t_k | L_{dp}(Q_{k,m})||``
        and the factor by ``2^{knq(1/2 + 1/(dp))}``.
    """
    spec = lam.spec
    k_lo, k_hi = lam.window
    if not t.covers(k_lo, k_hi):
        raise IncompatibleWindows(f"weights {t.k_range} do not cover window {k_lo}..{k_hi}")
    if t.spec != spec:
        raise IncompatibleGrids("weights live on another grid")
    if mode == "standard":
        delta = None
    elif isinstance(mode, (tuple, list)) and len(mode) == 2 and mode[0] == "delta":
        delta = float(mode[1])
        if not 0 < delta <= 1:
            raise InvalidArgument(f"delta must lie in (0, 1], got {delta}")
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    n = spec.n
    layers = []
    for k in lam.scales:
        b = _lattice_step(spec, k)
        a = np.abs(lam[k])
        if delta is None:
            layers.append(2.0 ** (k * n / 2) * t[k] * upsample(a, b))
        else:
            loc = t.local_norms(k, delta * t.p)
            fac = 2.0 ** (k * n * (0.5 + 1.0 / (delta * t.p)))
            layers.append(upsample(fac * loc * a, b))
    return mixed_norm(spec, layers, np_.p, np_.q)


def _min_image(M: int) -> np.ndarray:
    o = np.arange(M)
    return np.minimum(o, M - o)


def peak_functional(lam: CoefficientField, r: float, d: float) -> CoefficientField:
    """``lambda*_{k,m} = (sum_h |lambda_{k,h}|^r (1 + |h - m|)^{-d})^{1/r}``.

    Lattice distances are taken periodically (minimum image) and the sum runs
    over every lattice point of the scale.
    """
    n = lam.spec.n
    if not d > n:
        raise InvalidArgument(f"d must exceed n={n}, got {d}")
    if not r > 0:
        raise InvalidArgument(f"r must be positive, got {r}")
    out = {}
    for k in lam.scales:
        a = np.abs(lam[k])
        ar = a ** r
        M = a.shape[0]
        dist1 = _min_image(M)
        acc = np.zeros(a.shape)
        for off in np.ndindex(*a.shape):
            dist = math.sqrt(sum(float(dist1[o]) ** 2 for o in off))
            acc += np.roll(ar, off, axis=tuple(range(n))) * (1.0 + dist) ** (-d)
        # the h = m term alone gives |lambda|; guard that bound against round-off
        out[k] = np.maximum(acc ** (1.0 / r), a)
    return CoefficientField(lam.spec, out)


def coefficient_bound_check(lam: CoefficientField, t: WeightSequence, np_: NormParams) -> float:
    """``max |lambda_{k,m}| 2^{kn/2} t_{k,m} / seq_norm(lambda)``."""
    norm = seq_norm(lam, t, np_)
    if norm == 0:
        raise DegenerateInput("coefficient field has zero norm")
    n = lam.spec.n
    best = 0.0
    for k in lam.scales:
        v = np.abs(lam[k]) * 2.0 ** (k * n / 2) * t.local_norms(k)
        best = max(best, float(v.max()))
    return best / norm


def _block_reduce(v: np.ndarray, n: int, M: int, b: int, op) -> np.ndarray:
    blocks = v.reshape(*sum(((M, b) for _ in range(n)), ()))
    return op(blocks, axis=tuple(range(1, 2 * n, 2)))


def sup_inf_functionals(f: GridFunction, pair: FilterPair, gamma: int, window):
    """On-grid ``sup_{k,m}`` and ``inf_{k,m,gamma}`` coefficient fields.

    ``sup_{k,m} = 2^{-kn/2} max_{y in Q_{k,m}} |phi~_k * f(y)|``; the inf field
    takes, over the subcubes of Q_{k,m} with side ``2^{-k-gamma}``, the largest
    grid minimum of the same function.
    """
    spec = f.spec
    n = spec.n
    if gamma < 0:
        raise InvalidArgument(f"gamma must be nonnegative, got {gamma}")
    k_lo, k_hi = check_window(spec, window)
    if k_hi + gamma > scale_range(spec)[1]:
        raise CubeResolutionError(f"scale {k_hi}+{gamma} finer than the grid")
    comps = scale_components(f, pair, (k_lo, k_hi), "phi_tilde")
    sup, inf = {}, {}
    for k, g in comps.items():
        a = np.abs(g.values)
        b, M = cube_layout(spec, k)
        bs, Ms = cube_layout(spec, k + gamma)
        c = 2.0 ** (-k * n / 2)
        sup[k] = c * _block_reduce(a, n, M, b, np.max)
        mins = _block_reduce(a, n, Ms, bs, np.min)
        inf[k] = c * _block_reduce(mins, n, M, 2 ** gamma, np.max)
    return CoefficientField(spec, sup), CoefficientField(spec, inf)
