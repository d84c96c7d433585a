"""Dyadic cubes on the periodic grid, cube means and the Calderon-Zygmund cover.

A cube ``Q_{k,m}`` has side ``2^-k`` and lower-left corner ``2^-k m``.  On a
grid with side ``T = 2^a`` it is representable when its side is a whole
number of grid cells and at most ``T``, i.e. when ``-a <= k <= L - a``.

All cube means are built by successive pairwise halving, one axis at a
time.  The same arithmetic is used for a single cube and for a whole scale,
so a parent mean is bit-for-bit the halving average of its children and
the means are monotone in floating point.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CubeResolutionError, DegenerateInput, InvalidArgument
from .grid import GridFunction, GridSpec

__all__ = [
    "DyadicCube",
    "CZCover",
    "side_exponent",
    "scale_range",
    "cube_layout",
    "cube_mean",
    "scale_means",
    "enumerate_cubes",
    "cube_slices",
    "cube_flat_indices",
    "upsample",
    "dilate3",
    "dyadic_maximal",
    "cz_covering",
]


@dataclass(frozen=True, order=True)
class DyadicCube:
    """The cube ``2^-k ([0,1)^n + m)``."""

    k: int
    m: tuple

    def __post_init__(self):
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "m", tuple(int(x) for x in np.atleast_1d(self.m)))

    @property
    def n(self) -> int:
        return len(self.m)

    @property
    def side(self) -> float:
        return 2.0 ** (-self.k)

    @property
    def volume(self) -> float:
        return self.side ** self.n

    @property
    def corner(self) -> np.ndarray:
        return self.side * np.array(self.m, dtype=float)

    @property
    def center(self) -> np.ndarray:
        return self.corner + 0.5 * self.side

    def parent(self) -> "DyadicCube":
        return DyadicCube(self.k - 1, tuple(x // 2 for x in self.m))

    def children(self) -> list["DyadicCube"]:
        return [DyadicCube(self.k + 1, tuple(2 * x + d for x, d in zip(self.m, off)))
                for off in itertools.product((0, 1), repeat=self.n)]

    def contains(self, other: "DyadicCube") -> bool:
        if other.k < self.k:
            return False
        s = other.k - self.k
        return all((y >> s) == x for x, y in zip(self.m, other.m))

    def to_list(self) -> list[int]:
        return [self.k, *self.m]

    @classmethod
    def from_list(cls, items) -> "DyadicCube":
        return cls(int(items[0]), tuple(int(x) for x in items[1:]))


def side_exponent(spec: GridSpec) -> int:
    """Return ``a`` with ``T = 2^a``; dyadic cubes need a power-of-two side."""
    mant, exp = math.frexp(spec.T)
    if mant != 0.5:
        raise CubeResolutionError(f"side length T={spec.T} is not a power of two")
    return exp - 1


def scale_range(spec: GridSpec) -> tuple[int, int]:
    """Coarsest and finest representable scales ``(k_lo, k_hi)``."""
    a = side_exponent(spec)
    return -a, spec.L - a


def cube_layout(spec: GridSpec, k: int) -> tuple[int, int]:
    """Return ``(b, M)``: grid cells per cube side and cubes per axis at scale k."""
    lo, hi = scale_range(spec)
    if not lo <= k <= hi:
        raise CubeResolutionError(
            f"scale k={k} not representable on grid (allowed {lo}..{hi})")
    return 2 ** (hi - k), 2 ** (k - lo)


def enumerate_cubes(spec: GridSpec, k: int) -> list[DyadicCube]:
    """All cubes of scale k tiling the fundamental domain, in lexicographic order."""
    _, M = cube_layout(spec, k)
    return [DyadicCube(k, m) for m in itertools.product(range(M), repeat=spec.n)]


def _check_cube(spec: GridSpec, Q: DyadicCube) -> tuple[int, int]:
    if Q.n != spec.n:
        raise CubeResolutionError(f"cube {Q} has dimension {Q.n}, grid has {spec.n}")
    b, M = cube_layout(spec, Q.k)
    if any(not 0 <= x < M for x in Q.m):
        raise CubeResolutionError(f"cube {Q} lies outside the fundamental domain")
    return b, M


def cube_slices(spec: GridSpec, Q: DyadicCube) -> tuple[slice, ...]:
    b, _ = _check_cube(spec, Q)
    return tuple(slice(x * b, (x + 1) * b) for x in Q.m)


def cube_flat_indices(spec: GridSpec, Q: DyadicCube) -> np.ndarray:
    idx = np.arange(spec.size).reshape(spec.shape)
    return np.ascontiguousarray(idx[cube_slices(spec, Q)]).ravel()


def _halve(a: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        for ax in range(a.ndim):
            lo = [slice(None)] * a.ndim
            hi = [slice(None)] * a.ndim
            lo[ax] = slice(0, None, 2)
            hi[ax] = slice(1, None, 2)
            a = (a[tuple(lo)] + a[tuple(hi)]) * 0.5
    return a


def _abs_pow(values: np.ndarray, p: float) -> np.ndarray:
    a = np.abs(values).astype(float)
    return a if p == 1 else a ** p


def scale_means(f, spec: GridSpec, k: int, p: float = 1.0) -> np.ndarray:
    """Array of ``M_{Q,p}`` raised to the p-th power, for every cube of scale k.

    ``f`` may be a :class:`GridFunction` or a raw array on ``spec``.  The
    result has shape ``(M,)*n`` and is indexed by the cube position m.
    """
    values = f.values if isinstance(f, GridFunction) else np.asarray(f)
    b, _ = cube_layout(spec, k)
    return _halve(_abs_pow(values, p), int(round(math.log2(b))))


def cube_mean(f: GridFunction, Q: DyadicCube, p: float = 1.0) -> float:
    """Grid version of ``M_{Q,p}(f) = (|Q|^-1 int_Q |f|^p)^(1/p)``."""
    if not p > 0 or math.isinf(p):
        raise InvalidArgument(f"exponent p must be in (0, inf), got {p}")
    sl = cube_slices(f.spec, Q)
    b, _ = cube_layout(f.spec, Q.k)
    s = float(_halve(_abs_pow(f.values[sl], p), int(round(math.log2(b)))).reshape(-1)[0])
    return s if p == 1 else s ** (1.0 / p)


def upsample(coarse: np.ndarray, b: int) -> np.ndarray:
    """Repeat each entry b times along every axis."""
    out = coarse
    for ax in range(coarse.ndim):
        out = np.repeat(out, b, axis=ax)
    return out


def dilate3(mask_or_values: np.ndarray, op=np.logical_or) -> np.ndarray:
    """Combine each cell with its 3^n periodic neighbours using ``op``."""
    a = mask_or_values
    out = None
    for off in itertools.product((-1, 0, 1), repeat=a.ndim):
        r = np.roll(a, off, axis=tuple(range(a.ndim)))
        out = r if out is None else op(out, r)
    return out


def dyadic_maximal(values: np.ndarray, spec: GridSpec) -> np.ndarray:
    """Dyadic maximal function including periodic 3Q dilates.

    At each grid point take the largest mean of ``|values|`` over all
    representable dyadic cubes containing it and, at scales with at least
    three cubes per axis, over the periodic triples of those cubes.
    """
    a = np.abs(np.asarray(values)).astype(float)
    lo, hi = scale_range(spec)
    out = a.copy()
    means = a
    for k in range(hi, lo - 1, -1):
        if k < hi:
            means = _halve(means, 1)
        b, M = cube_layout(spec, k)
        best = means
        if M >= 3:
            # mean over 3Q is the mean of the 3^n neighbour means
            triple = dilate3(means, np.add) / 3.0 ** spec.n
            best = np.maximum(means, triple)
        np.maximum(out, upsample(best, b), out=out)
    return out


@dataclass
class CZCover:
    """Result of the Calderon-Zygmund selection on a nonnegative function.

    Attributes
    ----------
    a : float
        Level base.
    levels : dict
        ``i -> list of DyadicCube`` of selected maximal cubes.
    E : dict
        ``i -> list of flat index arrays``, the carved set of each cube.
    means : dict
        ``i -> list of float`` cube means of the selected cubes.
    beta : float
        ``max |Q| / |E|`` over all selected cubes.
    omega_violations : dict
        ``i -> number of grid points in {Mf > 4^n a^i}`` outside the union of
        the periodic triples of the level-i cubes.
    saturated : list
        Levels whose coarsest selected cube has mean above ``2^n a^i``.
    """

    a: float
    n: int
    levels: dict
    E: dict
    means: dict
    beta: float
    omega_violations: dict
    saturated: list = field(default_factory=list)

    @property
    def i_range(self) -> tuple[int, int]:
        keys = sorted(self.levels)
        return keys[0], keys[-1]

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "beta": self.beta,
            "levels": [
                {"i": i,
                 "cubes": [Q.to_list() for Q in self.levels[i]],
                 "E_sizes": [int(e.size) for e in self.E[i]]}
                for i in sorted(self.levels)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _default_levels(top_mean: float, fmax: float, a: float, n: int) -> tuple[int, int]:
    # highest level with a nonempty selection
    hi = math.floor(math.log(fmax, a))
    while a ** (hi + 1) <= fmax:
        hi += 1
    while a ** hi > fmax:
        hi -= 1
    # lowest level at which the top cube still obeys mean <= 2^n a^i
    lo = math.ceil(math.log(top_mean / 2 ** n, a))
    while 2 ** n * a ** (lo - 1) >= top_mean:
        lo -= 1
    while 2 ** n * a ** lo < top_mean:
        lo += 1
    return min(lo, hi), hi


def _select_level(pyramid: dict, k_lo: int, k_hi: int, tau: float):
    """Maximal cubes with mean >= tau; returns {k: bool array of selections}."""
    chosen = {}
    covered = None
    for k in range(k_lo, k_hi + 1):
        means = pyramid[k]
        if covered is None:
            sel = means >= tau
            covered = sel.copy()
        else:
            covered = upsample(covered, 2)
            sel = (means >= tau) & ~covered
            covered |= sel
        chosen[k] = sel
    return chosen, covered


def cz_covering(f: GridFunction, a: float, i_range: tuple[int, int] | None = None) -> CZCover:
    """Calderon-Zygmund selection of maximal dyadic cubes at levels ``a^i``.

    For every level i the maximal dyadic cubes with mean at least ``a^i`` are
    selected.  Unless the coarsest cube is itself above ``2^n a^i`` (the
    level is then listed in ``saturated``) every selected cube satisfies
    ``a^i <= M_Q(f) <= 2^n a^i``.  The carved set of a level-i cube removes
    the level-(i+1) cubes it contains.

    Parameters
    ----------
    f : GridFunction
        Function to cover; ``|f|`` is used.
    a : float
        Level base, ``a >= 2^(n+1)``.
    i_range : (int, int), optional
        Inclusive range of levels.  By default the range runs from the
        lowest level at which the coarsest cube is not saturated to the
        highest level with a nonempty selection.
    """
    spec = f.spec
    n = spec.n
    a = float(a)
    # the selection bounds only need a > 2^n; the boundary a = 2^(n+1) is kept usable
    if not a >= 2 ** (n + 1):
        raise InvalidArgument(f"level base a must be at least 2^(n+1)={2 ** (n + 1)}, got {a}")
    v = np.abs(f.values).astype(float)
    fmax = float(v.max())
    if fmax == 0:
        raise DegenerateInput("cannot cover the zero function")
    k_lo, k_hi = scale_range(spec)

    pyramid = {k_hi: v}
    for k in range(k_hi - 1, k_lo - 1, -1):
        pyramid[k] = _halve(pyramid[k + 1], 1)
    top_mean = float(pyramid[k_lo].max())

    if i_range is None:
        i_range = _default_levels(top_mean, fmax, a, n)
    i0, i1 = int(i_range[0]), int(i_range[1])
    if i1 < i0:
        raise InvalidArgument(f"empty level range {i_range}")

    maxf = dyadic_maximal(v, spec)
    sels = {}
    covers = {}
    for i in range(i0, i1 + 2):
        sels[i], covers[i] = _select_level(pyramid, k_lo, k_hi, a ** i)

    flat_idx = np.arange(spec.size).reshape(spec.shape)
    levels, E, means, viol = {}, {}, {}, {}
    saturated = []
    beta = 1.0
    for i in range(i0, i1 + 1):
        upper = covers[i + 1]
        cubes, carved, mus = [], [], []
        dil = np.zeros(spec.shape, dtype=bool)
        for k in range(k_lo, k_hi + 1):
            sel = sels[i][k]
            if not sel.any():
                continue
            b, _ = cube_layout(spec, k)
            dil |= upsample(dilate3(sel), b)
            for m in zip(*np.nonzero(sel)):
                Q = DyadicCube(k, tuple(int(x) for x in m))
                sl = tuple(slice(x * b, (x + 1) * b) for x in Q.m)
                keep = ~upper[sl]
                e = flat_idx[sl][keep]
                mu = float(pyramid[k][m])
                if mu > 2 ** n * a ** i:
                    if i not in saturated:
                        saturated.append(i)
                cubes.append(Q)
                carved.append(np.sort(e))
                mus.append(mu)
                beta = max(beta, math.inf if e.size == 0 else b ** n / e.size)
        levels[i], E[i], means[i] = cubes, carved, mus
        omega = maxf > 4 ** n * a ** i
        viol[i] = int(np.count_nonzero(omega & ~dil))
    return CZCover(a=a, n=n, levels=levels, E=E, means=means, beta=beta,
                   omega_violations=viol, saturated=saturated)
