"""Periodic sampled functions on the torus [0, T)^n.

The torus stands in for R^n. Every integral is a Riemann sum over the
2^(nL) grid points and every convolution is evaluated through the DFT:
the forward transform carries e^{-i xi.x}, the inverse carries the
1/2^(nL) factor, and the discrete frequencies are (2 pi / T) times the
integers -2^(L-1), ..., 2^(L-1) - 1 on each axis.  Symbol arrays are stored
in numpy FFT order (zero frequency first), see :meth:`GridSpec.frequencies`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import IncompatibleGrids, InvalidArgument

__all__ = [
    "GridSpec",
    "GridFunction",
    "SpectralMultiplier",
    "make_grid",
    "spectral_multiply",
    "spectral_derivative",
    "lp_norm",
    "dft",
    "inverse_dft",
    "multi_indices",
    "mixed_norm",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with 2^L points per axis on [0, T)^n."""

    n: int
    L: int
    T: float

    @property
    def points(self) -> int:
        return 2 ** self.L

    @property
    def size(self) -> int:
        return self.points ** self.n

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.n

    @property
    def h(self) -> float:
        return self.T / self.points

    @property
    def cell_volume(self) -> float:
        return self.h ** self.n

    def axis(self, centers: bool = False) -> np.ndarray:
        x = np.arange(self.points) * self.h
        return x + 0.5 * self.h if centers else x

    def coordinates(self, centers: bool = False) -> list[np.ndarray]:
        """Meshgrid of coordinates, one array of ``shape`` per axis."""
        ax = self.axis(centers)
        return list(np.meshgrid(*([ax] * self.n), indexing="ij"))

    def frequencies(self) -> list[np.ndarray]:
        """Meshgrid of angular frequencies in FFT order."""
        xi = 2.0 * np.pi / self.T * np.fft.fftfreq(self.points, d=1.0 / self.points)
        return list(np.meshgrid(*([xi] * self.n), indexing="ij"))

    def radial_frequency(self) -> np.ndarray:
        return np.sqrt(sum(x * x for x in self.frequencies()))


def make_grid(n: int, L: int, T: float) -> GridSpec:
    if n not in (1, 2):
        raise InvalidArgument(f"dimension n must be 1 or 2, got {n}")
    if not isinstance(L, (int, np.integer)) or not 3 <= L <= 12:
        raise InvalidArgument(f"resolution exponent L must be an integer in [3, 12], got {L}")
    T = float(T)
    if not (T > 0 and math.isfinite(T)):
        raise InvalidArgument(f"side length T must be positive, got {T}")
    return GridSpec(int(n), int(L), T)


class GridFunction:
    """Immutable complex or real samples on a :class:`GridSpec`.

    ``values`` may be passed either with the grid shape or flattened in
    lexicographic (C) order.  With ``nonnegative=True`` the samples must be
    real and >= 0, which is checked here.
    """

    __slots__ = ("spec", "values", "nonnegative")

    def __init__(self, spec: GridSpec, values, nonnegative: bool = False):
        v = np.asarray(values)
        if v.shape != spec.shape:
            if v.size != spec.size:
                raise InvalidArgument(
                    f"expected {spec.size} samples for grid {spec}, got {v.size}")
            v = v.reshape(spec.shape)
        if np.iscomplexobj(v):
            v = v.astype(np.complex128, copy=True)
        else:
            v = v.astype(np.float64, copy=True)
        if nonnegative:
            if np.iscomplexobj(v):
                if np.any(v.imag != 0):
                    raise InvalidArgument("nonnegative grid function has imaginary parts")
                v = v.real.copy()
            if np.any(v < 0) or np.any(np.isnan(v)):
                raise InvalidArgument("nonnegative grid function has negative samples")
        v.setflags(write=False)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "nonnegative", bool(nonnegative))

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    @classmethod
    def from_callable(cls, spec: GridSpec, func, centers: bool = False, **kw) -> "GridFunction":
        """Sample ``func(*coords)`` on grid points (or cell centers)."""
        return cls(spec, func(*spec.coordinates(centers)), **kw)

    @classmethod
    def constant(cls, spec: GridSpec, c) -> "GridFunction":
        return cls(spec, np.full(spec.shape, c), nonnegative=np.isreal(c) and np.real(c) >= 0)

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GridFunction":
        return cls(spec, np.zeros(spec.shape), nonnegative=True)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def abs(self) -> "GridFunction":
        return GridFunction(self.spec, np.abs(self.values), nonnegative=True)

    def real(self) -> "GridFunction":
        return GridFunction(self.spec, self.values.real)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.spec != self.spec:
                raise IncompatibleGrids(f"{self.spec} != {other.spec}")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.spec, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.spec, self.values - self._other(other))

    def __mul__(self, other):
        return GridFunction(self.spec, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self.spec, self.values / self._other(other))

    def __neg__(self):
        return GridFunction(self.spec, -self.values)

    def __pow__(self, e):
        return GridFunction(self.spec, self.values ** e)

    def __repr__(self):
        kind = "real" if self.is_real else "complex"
        return f"GridFunction({self.spec}, {kind})"


class SpectralMultiplier:
    """Fourier-side symbol, one complex value per discrete frequency (FFT order)."""

    __slots__ = ("spec", "symbol", "hermitian")

    def __init__(self, spec: GridSpec, symbol):
        s = np.asarray(symbol)
        if s.shape != spec.shape:
            if s.size != spec.size:
                raise InvalidArgument(f"symbol must have {spec.size} entries, got {s.size}")
            s = s.reshape(spec.shape)
        s = s.astype(np.complex128 if np.iscomplexobj(s) else np.float64, copy=True)
        s.setflags(write=False)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "symbol", s)
        object.__setattr__(self, "hermitian", _is_hermitian(s))

    def __setattr__(self, name, value):
        raise AttributeError("SpectralMultiplier is immutable")

    def __mul__(self, other: "SpectralMultiplier") -> "SpectralMultiplier":
        if other.spec != self.spec:
            raise IncompatibleGrids(f"{self.spec} != {other.spec}")
        return SpectralMultiplier(self.spec, self.symbol * other.symbol)

    def conj(self) -> "SpectralMultiplier":
        return SpectralMultiplier(self.spec, np.conj(self.symbol))


def _is_hermitian(s: np.ndarray) -> bool:
    # symbol(-xi) == conj(symbol(xi)); index negation is taken mod N on every axis
    flipped = s
    for ax in range(s.ndim):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    return bool(np.array_equal(flipped, np.conj(s)))


def dft(f: GridFunction) -> np.ndarray:
    return np.fft.fftn(f.values)


def inverse_dft(spec: GridSpec, coeffs: np.ndarray, real: bool = False) -> GridFunction:
    v = np.fft.ifftn(coeffs)
    return GridFunction(spec, v.real if real else v)


def spectral_multiply(f: GridFunction, m: SpectralMultiplier) -> GridFunction:
    """Inverse DFT of ``symbol * DFT(f)``.

    The result is real whenever ``f`` is real and the symbol is Hermitian.
    """
    if f.spec != m.spec:
        raise IncompatibleGrids(f"function grid {f.spec} != multiplier grid {m.spec}")
    out = np.fft.ifftn(m.symbol * np.fft.fftn(f.values))
    if f.is_real and m.hermitian:
        out = out.real
    return GridFunction(f.spec, out)


def multi_indices(n: int, order: int) -> list[tuple[int, ...]]:
    """All multi-indices beta in N_0^n with |beta| <= order, graded."""
    if order < 0:
        return []
    out = [b for b in itertools.product(range(order + 1), repeat=n) if sum(b) <= order]
    return sorted(out, key=lambda b: (sum(b), tuple(-x for x in b)))


def spectral_derivative(f: GridFunction, beta: tuple[int, ...]) -> GridFunction:
    """Partial derivative d^beta f of the trigonometric interpolant of ``f``."""
    spec = f.spec
    if len(beta) != spec.n:
        raise InvalidArgument(f"multi-index {beta} does not match dimension {spec.n}")
    if sum(beta) == 0:
        return f
    xi = spec.frequencies()
    sym = np.ones(spec.shape, dtype=np.complex128)
    for ax, b in enumerate(beta):
        if b:
            x = xi[ax].copy()
            if b % 2 == 1:
                # odd derivatives of the Nyquist mode are not representable
                x[np.abs(x) == np.pi / spec.h] = 0.0
            sym = sym * (1j * x) ** b
    return spectral_multiply(f, SpectralMultiplier(spec, sym))


def lp_norm(f: GridFunction, p: float, w: GridFunction | None = None) -> float:
    """Riemann-sum quasi-norm (h^n sum |f w|^p)^(1/p); max |f w| when p is inf."""
    p = float(p)
    if not p > 0:
        raise InvalidArgument(f"exponent p must be positive, got {p}")
    a = np.abs(f.values)
    if w is not None:
        if w.spec != f.spec:
            raise IncompatibleGrids(f"weight grid {w.spec} != function grid {f.spec}")
        if not w.is_real or np.any(w.values < 0):
            raise InvalidArgument("weight must be real and nonnegative")
        a = a * w.values
    if math.isinf(p):
        return float(a.max())
    # numpy reduces a contiguous 1-D float array by pairwise summation
    s = np.sum((a ** p).ravel())
    return float((f.spec.cell_volume * s) ** (1.0 / p))


def mixed_norm(spec: GridSpec, layers, p: float, q: float) -> float:
    """``|| (sum_k |g_k|^q)^(1/q) | L_p ||`` for arrays ``g_k`` on ``spec``.

    Layers are accumulated in the given order; ``q = inf`` takes the pointwise
    maximum over k.
    """
    q = float(q)
    if not q > 0:
        raise InvalidArgument(f"exponent q must be positive, got {q}")
    acc = np.zeros(spec.shape)
    for g in layers:
        a = np.abs(g.values if isinstance(g, GridFunction) else np.asarray(g)).reshape(spec.shape)
        if math.isinf(q):
            np.maximum(acc, a, out=acc)
        else:
            acc = acc + a ** q
    if not math.isinf(q):
        acc = acc ** (1.0 / q)
    return lp_norm(GridFunction(spec, acc), p)
