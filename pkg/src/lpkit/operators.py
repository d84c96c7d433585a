"""Almost-diagonal operators, smooth atoms and molecules, atomic decomposition.

Coordinates on the torus are periodic, so every distance between points or
cube corners is a minimum-image distance.  Derivatives are spectral and
integrals are Riemann sums on the grid.

Derivative bounds use the normalization ``2^{k|beta| + kn/2}`` by default.
``strict=True`` switches to the literal exponents: ``2^{kn(|beta|+1/2)}`` for
atoms and ``2^{k(|beta|+1/2)}`` for synthesis molecules.  The two agree when
n = 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dyadic import DyadicCube, _check_cube, cube_layout
from .errors import (AtomConstructionFailure, CubeResolutionError, DecompositionFailure,
                     FormatError, IncompatibleGrids, IncompatibleWindows, InvalidArgument)
from .filters import FilterPair, representable_window
from .grid import GridFunction, GridSpec, multi_indices, spectral_derivative
from .transform import CoefficientField, analyze, check_window, synthesize

__all__ = [
    "omega_weight",
    "omega_block",
    "AlmostDiagonalMatrix",
    "almost_diagonal_apply",
    "MoleculeSpec",
    "smooth_bump",
    "build_smooth_atom",
    "AtomReport",
    "verify_atom",
    "MoleculeReport",
    "verify_molecule",
    "normalize_molecule",
    "molecule_matrix_detail",
    "molecule_matrix_check",
    "AtomFamily",
    "atomic_synthesize",
    "atomic_decompose",
]

SUPPORT_RADIUS = 1.5  # half side of 3Q in units of the side of Q
ROUNDOFF = 1e-13


# ---------------------------------------------------------------- omega weight

def _omega(dist, k, v, eps, alpha1, alpha2, J, n):
    dist_fac = (1.0 + dist / max(2.0 ** (-k), 2.0 ** (-v))) ** (-J - eps)
    if v <= k:
        gap = (v - k) * (alpha2 + (n + eps) / 2.0)
    else:
        gap = (v - k) * (alpha1 - (n + eps) / 2.0 - J + n)
    return 2.0 ** gap * dist_fac


def _min_image(d, period):
    if period is None:
        return d
    return (d + 0.5 * period) % period - 0.5 * period


def omega_weight(Q: DyadicCube, P: DyadicCube, eps: float, alpha1: float, alpha2: float,
                 J: float, period: float | None = None) -> float:
    """Two-branch weight ``omega_{QP}(eps)`` for ``Q = Q_{k,m}``, ``P = P_{v,h}``.

    ``period`` makes the corner distance periodic (minimum image).

    >>> omega_weight(DyadicCube(3, (1,)), DyadicCube(3, (1,)), 1.0, 0.0, 0.0, 1.0)
    1.0
    """
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    if Q.n != P.n:
        raise InvalidArgument("cubes of different dimension")
    d = _min_image(Q.corner - P.corner, period)
    return float(_omega(float(np.sqrt(np.sum(d * d))), Q.k, P.k, eps, alpha1, alpha2, J, Q.n))


def _lattice_corners(spec: GridSpec, k: int) -> np.ndarray:
    _, M = cube_layout(spec, k)
    idx = np.indices((M,) * spec.n).reshape(spec.n, -1).T
    return idx * 2.0 ** (-k)


def _omega_to_points(spec, k, v, targets, eps, alpha1, alpha2, J, periodic):
    """omega between every scale-k cube (rows) and scale-v corners ``targets``."""
    xq = _lattice_corners(spec, k)
    d = _min_image(xq[:, None, :] - targets[None, :, :], spec.T if periodic else None)
    dist = np.sqrt(np.sum(d * d, axis=-1))
    return _omega(dist, k, v, eps, alpha1, alpha2, J, spec.n)


def omega_block(spec: GridSpec, k: int, v: int, eps: float, alpha1: float, alpha2: float,
                J: float, periodic: bool = True) -> np.ndarray:
    """Matrix of ``omega_{QP}`` for all Q at scale k (rows) and P at scale v."""
    if not eps > 0:
        raise InvalidArgument(f"eps must be positive, got {eps}")
    return _omega_to_points(spec, k, v, _lattice_corners(spec, v), eps, alpha1, alpha2, J, periodic)


# ------------------------------------------------------- almost-diagonal matrices

class AlmostDiagonalMatrix:
    """Block matrix ``a_{QP}`` over one scale window, rows Q and columns P.

    Parameters
    ----------
    blocks : dict
        ``(k, v) -> array (M_k^n, M_v^n)``; absent blocks are zero.  Rows
        and columns follow the lexicographic order of the lattice.
    eps, alpha1, alpha2, J : float
        Parameters of the dominating weight; ``bound`` is the measured
        ``max |a_{QP}| / omega_{QP}(eps)``.
    """

    def __init__(self, spec: GridSpec, window, blocks: dict, eps: float, alpha1: float,
                 alpha2: float, J: float, periodic: bool = True):
        if not eps > 0:
            raise InvalidArgument(f"eps must be positive, got {eps}")
        self.spec = spec
        self.window = (int(window[0]), int(window[1]))
        self.eps, self.alpha1, self.alpha2, self.J = float(eps), float(alpha1), float(alpha2), float(J)
        self.periodic = periodic
        ks = range(self.window[0], self.window[1] + 1)
        sizes = {k: cube_layout(spec, k)[1] ** spec.n for k in ks}
        self.blocks = {}
        bound = 0.0
        for (k, v), B in blocks.items():
            if k not in sizes or v not in sizes:
                raise IncompatibleWindows(f"block ({k}, {v}) outside window {self.window}")
            B = np.asarray(B, dtype=complex)
            if B.shape != (sizes[k], sizes[v]):
                raise InvalidArgument(f"block ({k}, {v}) has shape {B.shape}, "
                                      f"expected {(sizes[k], sizes[v])}")
            if not np.any(B):
                continue
            om = omega_block(spec, k, v, eps, alpha1, alpha2, J, periodic)
            bound = max(bound, float(np.max(np.abs(B) / om)))
            self.blocks[(k, v)] = B
        if not math.isfinite(bound):
            raise InvalidArgument("matrix entries are not finite")
        self.bound = bound

    @classmethod
    def omega(cls, spec: GridSpec, window, eps: float, alpha1: float, alpha2: float, J: float,
              scale: float = 1.0, periodic: bool = True) -> "AlmostDiagonalMatrix":
        """The matrix whose entries are ``scale * omega_{QP}(eps)``."""
        ks = range(window[0], window[1] + 1)
        blocks = {(k, v): scale * omega_block(spec, k, v, eps, alpha1, alpha2, J, periodic)
                  for k in ks for v in ks}
        return cls(spec, window, blocks, eps, alpha1, alpha2, J, periodic)

    @classmethod
    def from_entries(cls, spec: GridSpec, window, entries: dict, eps: float = 1.0,
                     alpha1: float = 0.0, alpha2: float = 0.0, J: float | None = None,
                     periodic: bool = True) -> "AlmostDiagonalMatrix":
        """Build from ``{(Q, P): value}`` with Q, P dyadic cubes."""
        J = float(spec.n) if J is None else J
        blocks: dict = {}
        for (Q, P), val in entries.items():
            for C in (Q, P):
                if not window[0] <= C.k <= window[1]:
                    raise IncompatibleWindows(f"cube {C} outside window {window}")
                _check_cube(spec, C)
            Mq = cube_layout(spec, Q.k)[1]
            Mp = cube_layout(spec, P.k)[1]
            B = blocks.setdefault((Q.k, P.k), np.zeros((Mq ** spec.n, Mp ** spec.n), complex))
            B[np.ravel_multi_index(Q.m, (Mq,) * spec.n), np.ravel_multi_index(P.m, (Mp,) * spec.n)] = val
        return cls(spec, window, blocks, eps, alpha1, alpha2, J, periodic)

    @classmethod
    def identity(cls, spec: GridSpec, window, **kw) -> "AlmostDiagonalMatrix":
        blocks = {(k, k): np.eye(cube_layout(spec, k)[1] ** spec.n)
                  for k in range(window[0], window[1] + 1)}
        kw.setdefault("eps", 1.0)
        kw.setdefault("alpha1", 0.0)
        kw.setdefault("alpha2", 0.0)
        kw.setdefault("J", float(spec.n))
        return cls(spec, window, blocks, **kw)


def almost_diagonal_apply(A: AlmostDiagonalMatrix, lam: CoefficientField, split: bool = False):
    """``(A lam)_{k,m} = sum_{v,h} a_{QP} lam_{v,h}``.

    With ``split=True`` returns ``(total, past, future)`` where ``past`` sums
    the columns with ``v <= k`` and ``future`` those with ``v > k``.
    """
    if lam.spec != A.spec:
        raise IncompatibleGrids("coefficient field and matrix live on different grids")
    if lam.window != A.window:
        raise IncompatibleWindows(f"field window {lam.window} != matrix window {A.window}")
    spec = A.spec
    past, future = {}, {}
    for k in lam.scales:
        shape = lam[k].shape
        acc_p = np.zeros(lam[k].size, complex)
        acc_f = np.zeros(lam[k].size, complex)
        for v in lam.scales:
            B = A.blocks.get((k, v))
            if B is None:
                continue
            if v <= k:
                acc_p += B @ lam[v].ravel()
            else:
                acc_f += B @ lam[v].ravel()
        past[k] = acc_p.reshape(shape)
        future[k] = acc_f.reshape(shape)
    P = CoefficientField(spec, past)
    F = CoefficientField(spec, future)
    total = P + F
    return (total, P, F) if split else total


# ------------------------------------------------------------- molecule params

@dataclass(frozen=True)
class MoleculeSpec:
    """Parameters of the atom and molecule conditions.

    Attributes
    ----------
    alpha1, alpha2 : float
        Class exponents of the weight sequence.
    J : float
        ``n / min(1, p, q)``.
    n : int
        Dimension.
    M : float
        Decay rate, must exceed J.
    delta : float
        Hoelder order of synthesis molecules, in ``(alpha2*, 1]``.
    kappa : float
        Hoelder order of analysis molecules, in ``((J - alpha2)*, 1]``; the
        star is read as the fractional part.
    """

    alpha1: float
    alpha2: float
    J: float
    n: int
    M: float
    delta: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        if not self.M > self.J:
            raise InvalidArgument(f"M={self.M} must exceed J={self.J}")
        if not self.alpha2_star < self.delta <= 1:
            raise InvalidArgument(f"delta={self.delta} outside ({self.alpha2_star}, 1]")
        ks = _frac(self.J - self.alpha2)
        if not ks < self.kappa <= 1:
            raise InvalidArgument(f"kappa={self.kappa} outside ({ks}, 1]")

    @classmethod
    def from_norm(cls, alpha1: float, alpha2: float, np_, n: int, M: float | None = None,
                  delta: float = 1.0, kappa: float = 1.0) -> "MoleculeSpec":
        J = np_.J(n)
        return cls(alpha1, alpha2, J, n, J + 1.0 if M is None else M, delta, kappa)

    @property
    def alpha2_star(self) -> float:
        return _frac(self.alpha2)

    @property
    def floor_alpha2(self) -> int:
        return math.floor(self.alpha2)

    @property
    def N(self) -> int:
        return max(math.floor(self.J - self.n - self.alpha1), -1)

    @property
    def K(self) -> int:
        """Top derivative order of the atom bounds, ``max(0, 1 + floor(alpha2))``."""
        return max(0, 1 + self.floor_alpha2)


def _frac(x: float) -> float:
    return x - math.floor(x)


# ----------------------------------------------------------------------- atoms

def _local_coords(spec: GridSpec, Q: DyadicCube, anchor: str = "center") -> list[np.ndarray]:
    """Grid coordinates relative to the centre (or corner) of Q, in units of its side."""
    _check_cube(spec, Q)
    ref = Q.center if anchor == "center" else Q.corner
    return [2.0 ** Q.k * _min_image(x - c, spec.T) for x, c in zip(spec.coordinates(), ref)]


def _bump1(y: np.ndarray, radius: float) -> np.ndarray:
    out = np.zeros_like(y)
    inside = np.abs(y) < radius
    u = y[inside] / radius
    out[inside] = np.exp(-1.0 / (1.0 - u * u))
    return out


def _tensor_bump(ys, radius: float) -> np.ndarray:
    out = np.ones(ys[0].shape)
    for y in ys:
        out = out * _bump1(y, radius)
    return out


def smooth_bump(Q: DyadicCube, spec: GridSpec, radius: float = SUPPORT_RADIUS) -> GridFunction:
    """Tensor mollifier centred on Q, supported where every ``|y_i| < radius``.

    ``radius = 1.5`` gives support in 3Q; ``radius = 2`` reaches into 4Q.
    """
    _, M = _check_cube(spec, Q)
    if 2 * radius > M:
        raise CubeResolutionError(f"support of radius {radius} wraps around the torus at scale {Q.k}")
    return GridFunction(spec, _tensor_bump(_local_coords(spec, Q), radius))


def _diff_bound(k: int, n: int, order: int, strict: bool) -> float:
    if strict:
        return 2.0 ** (k * n * (order + 0.5))
    return 2.0 ** (k * order + k * n / 2.0)


def _diff_ratio(g: GridFunction, k: int, K: int, strict: bool) -> float:
    n = g.spec.n
    worst = 0.0
    for beta in multi_indices(n, K):
        d = spectral_derivative(g, beta)
        worst = max(worst, float(np.abs(d.values).max()) / _diff_bound(k, n, sum(beta), strict))
    return worst


def _monomials(ys, order: int):
    out = []
    for beta in multi_indices(len(ys), order):
        mono = np.ones(ys[0].shape)
        for y, e in zip(ys, beta):
            if e:
                mono = mono * y ** e
        out.append((beta, mono))
    return out


def build_smooth_atom(Q: DyadicCube, N: int, K: int, spec: GridSpec, fill: float = 0.9,
                      strict: bool = False) -> GridFunction:
    """Smooth atom for Q with ``N`` vanishing moments and derivative bounds to order K.

    For ``N = -1`` this is the tensor mollifier B on 3Q.  Otherwise ``B^2`` is
    corrected by ``-B sum_gamma c_gamma y^gamma`` with the coefficients solving
    the grid Gram system, so that every moment of order at most N vanishes to
    quadrature precision.  The result is scaled
    so the largest derivative ratio equals ``fill``.
    """
    if N < -1 or K < 0:
        raise InvalidArgument(f"need N >= -1 and K >= 0, got N={N}, K={K}")
    if not 0 < fill <= 1:
        raise InvalidArgument(f"fill must lie in (0, 1], got {fill}")
    b, M = _check_cube(spec, Q)
    if M < 3:
        raise CubeResolutionError(f"3Q wraps around the torus at scale {Q.k}")
    ys = _local_coords(spec, Q)
    bump = _tensor_bump(ys, SUPPORT_RADIUS)
    a = bump
    if N >= 0:
        # start from the squared bump, which lies outside span{bump * y^gamma}
        # 3b - 1 interior points per axis; a degree-N fit needs comfortably more
        if 3 * b < 2 * (N + 2):
            raise AtomConstructionFailure(
                f"{3 * b} points across 3Q cannot carry {N + 1} vanishing moment orders")
        mons = [m for _, m in _monomials(ys, N)]
        G = np.array([[np.sum((p * q * bump).ravel()) for q in mons] for p in mons])
        if np.linalg.cond(G) > 1e12:
            raise AtomConstructionFailure(f"moment system is singular (cond {np.linalg.cond(G):.3g})")
        a = bump * bump
        for _ in range(2):
            # one refinement pass removes the round-off left by the first solve
            rhs = np.array([np.sum((p * a).ravel()) for p in mons])
            c = np.linalg.solve(G, rhs)
            a = a - bump * sum(ci * p for ci, p in zip(c, mons))
    g = GridFunction(spec, a)
    ratio = _diff_ratio(g, Q.k, K, strict)
    if not ratio > 0 or not math.isfinite(ratio):
        raise AtomConstructionFailure(f"atom for {Q} vanished after moment removal")
    return GridFunction(spec, a * (fill / ratio))


def _moments(g: GridFunction, ys, order: int):
    """Largest absolute and relative moment ``int y^beta g`` for ``|beta| <= order``."""
    if order < 0:
        return 0.0, 0.0
    v = g.values
    vol = g.spec.cell_volume
    worst_abs, worst_rel = 0.0, 0.0
    for _, mono in _monomials(ys, order):
        s = abs(complex(np.sum((mono * v).ravel()))) * vol
        scale = float(np.sum(np.abs(mono * v).ravel())) * vol
        worst_abs = max(worst_abs, s)
        if scale > 0:
            worst_rel = max(worst_rel, s / scale)
    return worst_abs, worst_rel


@dataclass
class AtomReport:
    """Violations of the support, derivative and moment conditions of one atom.

    ``diff_ratio`` is the largest ``max |d^beta a| / bound_beta``; the
    derivative condition holds when it is at most 1.  Moments are measured in
    coordinates centred on Q and scaled by its side; ``moment_rel`` divides
    by ``int |y^beta a|``.
    """

    support_violation: float
    diff_ratio: float
    moment_abs: float
    moment_rel: float
    N: int
    K: int
    tol: float

    @property
    def support_ok(self) -> bool:
        return self.support_violation == 0.0

    @property
    def diff_ok(self) -> bool:
        return self.diff_ratio <= 1.0

    @property
    def diff_margin(self) -> float:
        return 1.0 - self.diff_ratio

    @property
    def moments_ok(self) -> bool:
        return self.moment_rel < self.tol

    @property
    def passed(self) -> bool:
        return self.support_ok and self.diff_ok and self.moments_ok

    def to_dict(self) -> dict:
        return {
            "support_violation": self.support_violation, "support_ok": self.support_ok,
            "diff_ratio": self.diff_ratio, "diff_margin": self.diff_margin, "diff_ok": self.diff_ok,
            "moment_abs": self.moment_abs, "moment_rel": self.moment_rel,
            "moments_ok": self.moments_ok, "N": self.N, "K": self.K, "passed": self.passed,
        }


def verify_atom(a: GridFunction, Q: DyadicCube, N: int, K: int, strict: bool = False,
                tol: float = 1e-8) -> AtomReport:
    """Check support in 3Q, derivative bounds up to order K and moments up to order N."""
    ys = _local_coords(a.spec, Q)
    outside = np.zeros(a.spec.shape, dtype=bool)
    for y in ys:
        outside |= np.abs(y) >= SUPPORT_RADIUS
    sup = float(np.abs(a.values[outside]).max()) if outside.any() else 0.0
    diff = _diff_ratio(a, Q.k, K, strict)
    m_abs, m_rel = _moments(a, ys, N)
    return AtomReport(sup, diff, m_abs, m_rel, N, K, tol)


# ------------------------------------------------------------------- molecules

@dataclass
class MoleculeReport:
    """Worst ratio ``lhs / rhs`` of each molecule condition.

    A condition holds when its ratio is at most 1; ``margins`` gives
    ``1 - ratio``.  Moment conditions are reported as relative moments and
    pass below ``tol``.
    """

    kind: str
    ratios: dict
    moment_rel: float
    moment_order: int
    tol: float
    notes: list = field(default_factory=list)

    @property
    def margins(self) -> dict:
        return {k: 1.0 - v for k, v in self.ratios.items()}

    @property
    def worst_ratio(self) -> float:
        return max(self.ratios.values(), default=0.0)

    @property
    def moments_ok(self) -> bool:
        return self.moment_rel < self.tol

    @property
    def passed(self) -> bool:
        return self.moments_ok and all(v <= 1.0 for v in self.ratios.values())

    def to_dict(self) -> dict:
        return {"kind": self.kind, "ratios": dict(self.ratios), "margins": self.margins,
                "moment_rel": self.moment_rel, "moment_order": self.moment_order,
                "moments_ok": self.moments_ok, "passed": self.passed, "notes": list(self.notes)}


def _holder_ratio(D: np.ndarray, spec: GridSpec, k: int, dist: np.ndarray, const: float,
                  order: float, decay: float) -> float:
    """Worst ``|D(x) - D(x + s e_i)| / (const s^order (1 + 2^k (|x - x_Q| - s)_+)^-decay)``."""
    b = cube_layout(spec, k)[0]
    steps = sorted({s for s in (1, 2, 4, max(b // 2, 1)) if s <= b})
    worst = 0.0
    for s in steps:
        r = s * spec.h
        env = const * r ** order * (1.0 + 2.0 ** k * np.maximum(dist - r, 0.0)) ** (-decay)
        for ax in range(spec.n):
            diff = np.abs(D - np.roll(D, -s, axis=ax))
            worst = max(worst, float(np.max(diff / env)))
    return worst


def verify_molecule(g: GridFunction, Q: DyadicCube, mspec: MoleculeSpec, kind: str,
                    strict: bool = False, tol: float = 1e-8) -> MoleculeReport:
    """Check the synthesis or analysis molecule conditions of g for the cube Q.

    Distances are measured from the lower-left corner of Q.  The Hoelder
    conditions are sampled over the offsets ``h, 2h, 4h, 2^{-k-1}`` along
    each axis.
    """
    if kind not in ("synthesis", "analysis"):
        raise InvalidArgument(f"kind must be 'synthesis' or 'analysis', got {kind!r}")
    spec = g.spec
    if spec.n != mspec.n:
        raise InvalidArgument(f"molecule parameters are for n={mspec.n}, grid has n={spec.n}")
    k, n = Q.k, spec.n
    ys = _local_coords(spec, Q, anchor="corner")
    dist = np.sqrt(sum(y * y for y in ys)) * 2.0 ** (-k)
    one_d = 1.0 + 2.0 ** k * dist
    M = mspec.M
    absg = np.abs(g.values)
    ratios = {}
    notes = []
    if kind == "synthesis":
        order = mspec.N
        ratios["cond1"] = float(np.max(absg / (2.0 ** (k * n / 2) * one_d ** (-max(M, M - mspec.alpha1)))))
        top = mspec.floor_alpha2
        half = 0.5 if strict else n / 2.0
        for beta in multi_indices(n, top):
            D = np.abs(spectral_derivative(g, beta).values) if sum(beta) else absg
            c = 2.0 ** (k * (sum(beta) + half))
            ratios["cond2"] = max(ratios.get("cond2", 0.0), float(np.max(D / (c * one_d ** (-M)))))
        for beta in multi_indices(n, top):
            if sum(beta) != top:
                continue
            D = spectral_derivative(g, beta).values
            c = 2.0 ** (k * (top + half + mspec.delta))
            r = _holder_ratio(D, spec, k, dist, c, mspec.delta, M)
            ratios["cond3"] = max(ratios.get("cond3", 0.0), r)
        if top < 0:
            notes.append("floor(alpha2) < 0: derivative and Hoelder conditions are vacuous")
    else:
        order = mspec.floor_alpha2
        N = mspec.N
        ratios["cond1.1"] = float(np.max(
            absg / (2.0 ** (k * n / 2) * one_d ** (-max(M, M + n + mspec.alpha2 - mspec.J)))))
        for beta in multi_indices(n, N):
            D = np.abs(spectral_derivative(g, beta).values) if sum(beta) else absg
            c = 2.0 ** (k * (sum(beta) + n / 2.0))
            ratios["cond1.2"] = max(ratios.get("cond1.2", 0.0), float(np.max(D / (c * one_d ** (-M)))))
        for beta in multi_indices(n, N):
            if sum(beta) != N:
                continue
            D = spectral_derivative(g, beta).values
            c = 2.0 ** (k * (N + n / 2.0 + mspec.kappa))
            r = _holder_ratio(D, spec, k, dist, c, mspec.kappa, M)
            ratios["cond1.3"] = max(ratios.get("cond1.3", 0.0), r)
        notes.append("kappa range read with (x)* = fractional part of x")
        if N < 0:
            notes.append("N < 0: derivative and Hoelder conditions are vacuous")
    _, m_rel = _moments(g, ys, order)
    return MoleculeReport(kind, ratios, m_rel, order, tol, notes)


def normalize_molecule(g: GridFunction, Q: DyadicCube, mspec: MoleculeSpec, kind: str,
                       fill: float = 0.9, strict: bool = False) -> GridFunction:
    """Scale g so that its worst molecule ratio equals ``fill``."""
    worst = verify_molecule(g, Q, mspec, kind, strict).worst_ratio
    if not worst > 0:
        raise InvalidArgument("cannot normalize a zero function")
    return g * (fill / worst)


def molecule_matrix_detail(mols: dict, pair: FilterPair, eps: float, alpha1: float,
                           alpha2: float, J: float, window=None, pairs=None,
                           eps_1: float | None = None):
    """Largest ``|<rho_P, phi_Q>| / omega_{QP}(eps)`` with its cube pair.

    Parameters
    ----------
    mols : dict
        ``P -> GridFunction`` with P a dyadic cube.
    window : (int, int), optional
        Scales of the cubes Q; defaults to the representable window.
    pairs : callable, optional
        ``pairs(k, v, m_grid, h)`` returns a boolean mask over the scale-k
        lattice selecting which Q are paired with P = (v, h).

    Returns
    -------
    (float, DyadicCube or None, DyadicCube or None)
    """
    if eps_1 is not None and eps > eps_1:
        raise InvalidArgument(f"eps={eps} exceeds eps_1={eps_1}")
    best, bq, bp = 0.0, None, None
    for P, g in mols.items():
        spec = g.spec
        win = representable_window(spec) if window is None else check_window(spec, window)
        coef = analyze(g, pair, win)
        xp = P.corner[None, :]
        for k in coef.scales:
            c = np.abs(coef[k])
            if not c.any():
                continue
            om = _omega_to_points(spec, k, P.k, xp, eps, alpha1, alpha2, J, True).reshape(c.shape)
            ratio = c / om
            if pairs is not None:
                ratio = np.where(pairs(k, P.k, np.indices(c.shape), P.m), ratio, 0.0)
            idx = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
            if ratio[idx] > best:
                best, bq, bp = float(ratio[idx]), DyadicCube(k, tuple(int(i) for i in idx)), P
    return best, bq, bp


def molecule_matrix_check(mols: dict, pair: FilterPair, eps: float, alpha1: float,
                          alpha2: float, J: float, window=None, pairs=None,
                          eps_1: float | None = None) -> float:
    """Largest ``|<rho_P, phi_Q>| / omega_{QP}(eps)``; see :func:`molecule_matrix_detail`."""
    return molecule_matrix_detail(mols, pair, eps, alpha1, alpha2, J, window, pairs, eps_1)[0]


# -------------------------------------------------------------- atom families

@dataclass
class AtomFamily:
    """Atoms indexed by dyadic cube, with the parameters they were built for."""

    atoms: dict
    normalization: str = "default"
    N: int = -1
    K: int = 1

    def __getitem__(self, Q: DyadicCube) -> GridFunction:
        return self.atoms[Q]

    def __contains__(self, Q) -> bool:
        return Q in self.atoms

    def __len__(self) -> int:
        return len(self.atoms)

    def cubes(self) -> list:
        return sorted(self.atoms)

    def save(self, directory) -> None:
        """Write one LPGF1 file per atom and an ``index.json``."""
        from .io import write_lpgf1

        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        index = {"normalization": self.normalization, "N": self.N, "K": self.K, "atoms": []}
        for i, Q in enumerate(self.cubes()):
            name = f"atom_{i:05d}.lpgf"
            write_lpgf1(d / name, self.atoms[Q])
            index["atoms"].append({"cube": Q.to_list(), "file": name})
        (d / "index.json").write_text(json.dumps(index, indent=1, sort_keys=True))

    @classmethod
    def load(cls, directory) -> "AtomFamily":
        from .io import read_lpgf1

        d = Path(directory)
        try:
            index = json.loads((d / "index.json").read_text())
            atoms = {DyadicCube.from_list(e["cube"]): read_lpgf1(d / e["file"]) for e in index["atoms"]}
            return cls(atoms, index["normalization"], int(index["N"]), int(index["K"]))
        except (OSError, KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{d}: bad atom family: {exc}") from exc


def atomic_synthesize(atoms, lam: CoefficientField, spec: GridSpec | None = None) -> GridFunction:
    """``sum_{k,m} lam_{k,m} a_{k,m}``; every nonzero coefficient needs an atom."""
    spec = lam.spec if spec is None else spec
    if spec != lam.spec:
        raise IncompatibleGrids("coefficient field was built for another grid")
    amap = atoms.atoms if isinstance(atoms, AtomFamily) else atoms
    k_lo, k_hi = lam.window
    for Q in amap:
        if not k_lo <= Q.k <= k_hi:
            raise IncompatibleWindows(f"atom for {Q} outside coefficient window {lam.window}")
    total = np.zeros(spec.shape, complex)
    real = True
    for k, m, v in lam.entries():
        Q = DyadicCube(k, m)
        if Q not in amap:
            raise IncompatibleWindows(f"no atom for nonzero coefficient at {Q}")
        a = amap[Q]
        if a.spec != spec:
            raise IncompatibleGrids(f"atom for {Q} lives on another grid")
        real = real and a.is_real and v.imag == 0
        total += v * a.values
    return GridFunction(spec, total.real if real else total)


def _partition(spec: GridSpec, k: int):
    """Base bump at cube 0 of scale k and the periodic sum of all its lattice shifts."""
    b, M = cube_layout(spec, k)
    if M < 3:
        raise CubeResolutionError(f"3Q wraps around the torus at scale {k}")
    base = _tensor_bump(_local_coords(spec, DyadicCube(k, (0,) * spec.n)), SUPPORT_RADIUS)
    total = np.zeros(spec.shape)
    for off in np.ndindex(*(M,) * spec.n):
        total += np.roll(base, tuple(o * b for o in off), axis=tuple(range(spec.n)))
    return base, total, b, M


def atomic_decompose(f: GridFunction, pair: FilterPair, window=None, K: int = 1,
                     fill: float = 0.9, strict: bool = False):
    """Atoms and coefficients with ``sum lam_{k,m} a_{k,m} = f``.

    The scale-k part ``f_k`` of the reproducing formula is cut into pieces
    ``theta_{k,m} f_k`` by a smooth partition of unity subordinate to the
    cubes 3Q.  Each piece is divided by ``rho / fill``, where rho is its
    largest derivative ratio up to order K, and by the phase of the analysis
    coefficient at that cube; both factors move into ``lam``.  Moments are not
    imposed, so the atoms carry ``N = -1``.  Pieces below ``1e-13 max|f|`` are
    dropped, which bounds the reconstruction error at that level.

    Returns
    -------
    (AtomFamily, CoefficientField)
    """
    spec = f.spec
    window = representable_window(spec) if window is None else window
    k_lo, k_hi = check_window(spec, window)
    lam0 = analyze(f, pair, (k_lo, k_hi))
    n = spec.n
    atoms = {}
    coeffs = {}
    # pieces at round-off level carry no signal and an arbitrary sign
    cutoff = ROUNDOFF * float(np.abs(f.values).max(initial=0.0))
    for k in range(k_lo, k_hi + 1):
        fk = synthesize(lam0.restricted(k, k), pair).values
        if f.is_real:
            fk = fk.real
        base, total, b, M = _partition(spec, k)
        out = np.zeros((M,) * n, complex)
        if np.abs(fk).max() > cutoff:
            for m in np.ndindex(*(M,) * n):
                theta = np.roll(base, tuple(x * b for x in m), axis=tuple(range(n))) / total
                piece = GridFunction(spec, theta * fk)
                if np.abs(piece.values).max() <= cutoff:
                    continue
                rho = _diff_ratio(piece, k, K, strict)
                if not math.isfinite(rho):
                    raise DecompositionFailure(f"non-finite derivative bound on cube {DyadicCube(k, m)}")
                u = lam0[k][m]
                ph = u / abs(u) if u != 0 else 1.0
                if f.is_real:
                    # real input gives real coefficients; keep the atoms real
                    ph = 1.0 if ph.real >= 0 else -1.0
                atom = piece * (fill / (rho * ph))
                if _diff_ratio(atom, k, K, strict) > 1.0 + 1e-12:
                    raise DecompositionFailure(f"piece on cube {DyadicCube(k, m)} misses the derivative bound")
                atoms[DyadicCube(k, m)] = atom
                out[m] = rho / fill * ph
        coeffs[k] = out
    return AtomFamily(atoms, "strict" if strict else "default", -1, K), CoefficientField(spec, coeffs)
