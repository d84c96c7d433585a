"""Radial Littlewood-Paley filter pairs.

A filter pair is given by two radial Fourier-side profiles ``eta`` (for phi)
and ``psi`` (for psi).  Both are written as functions of ``u = log2 r`` so
that dilation by ``2^k`` becomes a shift by ``k``.  ``eta`` vanishes for
``|u| >= 1`` (support ``[1/2, 2]``), and the dual profile is

    psi(r) = eta(r) / sum_j eta(2^-j r)^2,

which makes ``sum_k eta(2^-k r) psi(2^-k r) = 1`` for every ``r > 0``.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import CubeResolutionError, InvalidArgument
from .grid import GridSpec, SpectralMultiplier

__all__ = [
    "FilterPair",
    "FilterReport",
    "build_filter_pair",
    "filter_symbol",
    "verify_filter_pair",
    "representable_window",
    "profile_csv",
    "KINDS",
]

KINDS = ("bump", "cosine")

INNER_LO, INNER_HI = 3.0 / 5.0, 5.0 / 3.0


def _bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    ui = u[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ui * ui))
    return out


def _cosine(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.cos(0.5 * np.pi * u[inside]) ** 3
    return out


_PROFILES = {"bump": _bump, "cosine": _cosine}


@dataclass(frozen=True)
class FilterPair:
    """Admissible radial pair (phi, psi) described by its Fourier profiles.

    Attributes
    ----------
    kind : str
        ``"bump"`` (C-infinity mollifier) or ``"cosine"`` (C^2 raised cosine).
    normalized : bool
        If False the dual profile is ``eta`` itself and the partition of
        unity fails; kept for negative tests.
    c_lower : float
        Closed-form lower bound of ``eta`` on ``[3/5, 5/3]``.
    """

    kind: str
    normalized: bool
    c_lower: float

    def eta_u(self, u) -> np.ndarray:
        return _PROFILES[self.kind](np.asarray(u, dtype=float))

    def denominator_u(self, u) -> np.ndarray:
        """``sum_j eta(2^-j r)^2`` as a function of ``u``; 1-periodic."""
        u = np.asarray(u, dtype=float)
        u = np.where(np.isfinite(u), u, 0.0)
        fr = u - np.floor(u)
        return self.eta_u(fr) ** 2 + self.eta_u(fr - 1.0) ** 2

    def psi_u(self, u) -> np.ndarray:
        e = self.eta_u(u)
        if not self.normalized:
            return e
        # the denominator is positive wherever e is; keep zeros out of the division
        d = np.where(e > 0, self.denominator_u(u), 1.0)
        return np.where(e > 0, e / d, 0.0)

    @staticmethod
    def _log2(r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > 0, np.log2(np.where(r > 0, r, 1.0)), -np.inf)

    def eta(self, r) -> np.ndarray:
        """Profile of phi at radius r (zero at r = 0)."""
        return self.eta_u(self._log2(r))

    def psi(self, r) -> np.ndarray:
        return self.psi_u(self._log2(r))

    def partition_sum(self, r, k_span: int = 12) -> np.ndarray:
        """``sum_k eta(2^-k r) psi(2^-k r)`` over ``|k - log2 r| <= k_span``."""
        u = self._log2(r)
        base = np.floor(np.where(np.isfinite(u), u, 0.0))
        total = np.zeros_like(u)
        for d in range(-k_span, k_span + 1):
            v = u - (base + d)
            total = total + self.eta_u(v) * self.psi_u(v)
        return total


def build_filter_pair(kind: str = "bump", normalized: bool = True) -> FilterPair:
    if kind not in _PROFILES:
        raise InvalidArgument(f"unknown filter kind {kind!r}; choose from {KINDS}")
    prof = _PROFILES[kind]
    ends = np.log2(np.array([INNER_LO, INNER_HI]))
    # profiles decrease in |u|, so the minimum over the inner annulus sits at an end
    c_lower = float(prof(ends).min())
    return FilterPair(kind, bool(normalized), c_lower)


def filter_symbol(pair: FilterPair, which: str, k: int, spec: GridSpec) -> SpectralMultiplier:
    """Tabulate ``F phi(2^-k xi)`` (or psi, or the conjugate phi) on the grid."""
    u = FilterPair._log2(spec.radial_frequency()) - k
    if which in ("phi", "phi_tilde"):
        # the profile is real, so conjugation changes nothing
        sym = pair.eta_u(u)
    elif which == "psi":
        sym = pair.psi_u(u)
    else:
        raise InvalidArgument(f"unknown symbol {which!r}")
    return SpectralMultiplier(spec, sym)


def representable_window(spec: GridSpec) -> tuple[int, int]:
    """Scales whose annulus meets the grid frequencies and lattice.

    ``k_min`` is the least k whose outer radius ``2^(k+1)`` exceeds the lowest
    nonzero frequency ``2 pi / T``; ``k_max`` is the largest k whose outer
    radius stays below the Nyquist radius ``pi / h`` and whose lattice
    spacing ``2^-k`` is a whole number of grid cells.
    """
    mant, exp = math.frexp(spec.T)
    if mant != 0.5:
        raise CubeResolutionError(f"side length T={spec.T} is not a power of two")
    a = exp - 1
    k_min = math.floor(math.log2(2 * math.pi / spec.T))
    while 2.0 ** (k_min + 1) <= 2 * math.pi / spec.T:
        k_min += 1
    while 2.0 ** k_min > 2 * math.pi / spec.T:
        k_min -= 1
    k_max = spec.L - a
    while 2.0 ** (k_max + 1) > math.pi / spec.h:
        k_max -= 1
    k_min = max(k_min, -a)
    return k_min, k_max


@dataclass
class FilterReport:
    kind: str
    samples: int
    ass1_max_outside: float
    ass2_min_inner: float
    c_lower: float
    ass3_deviation: float
    max_terms: int
    tol: float

    @property
    def ass1_ok(self) -> bool:
        return self.ass1_max_outside == 0.0

    @property
    def ass2_ok(self) -> bool:
        return self.c_lower > 0 and self.ass2_min_inner >= self.c_lower

    @property
    def ass3_ok(self) -> bool:
        return self.ass3_deviation < self.tol

    @property
    def passed(self) -> bool:
        return self.ass1_ok and self.ass2_ok and self.ass3_ok

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "samples": self.samples,
            "ass1_max_outside": self.ass1_max_outside, "ass1_ok": self.ass1_ok,
            "ass2_min_inner": self.ass2_min_inner, "c_lower": self.c_lower,
            "ass2_ok": self.ass2_ok,
            "ass3_deviation": self.ass3_deviation, "ass3_ok": self.ass3_ok,
            "max_terms": self.max_terms, "tol": self.tol, "passed": self.passed,
        }


def verify_filter_pair(pair: FilterPair, samples: int = 10_000, tol: float = 1e-12) -> FilterReport:
    """Check support, inner lower bound and partition of unity on log-spaced radii."""
    if samples < 100:
        raise InvalidArgument(f"need at least 100 samples, got {samples}")
    outside = np.concatenate([np.geomspace(1e-2, 0.5, samples // 2),
                              np.geomspace(2.0, 1e2, samples // 2)])
    inner = np.geomspace(INNER_LO, INNER_HI, samples)
    radii = np.geomspace(1e-2, 1e2, samples)
    ass1 = float(np.abs(pair.eta(outside)).max())
    ass2 = float(pair.eta(inner).min())
    dev = float(np.abs(pair.partition_sum(radii) - 1.0).max())
    u = np.log2(radii)
    terms = np.zeros(radii.shape, dtype=int)
    for k in range(-10, 11):
        terms += (pair.eta_u(u - k) != 0).astype(int)
    return FilterReport(pair.kind, samples, ass1, ass2, pair.c_lower, dev,
                        int(terms.max()), tol)


def profile_csv(pair: FilterPair, samples: int = 512) -> str:
    """CSV text with columns ``r, eta, psi`` on log-spaced radii in [1/4, 4]."""
    r = np.geomspace(0.25, 4.0, samples)
    buf = io.StringIO()
    buf.write("r,eta,psi\n")
    for ri, e, s in zip(r, pair.eta(r), pair.psi(r)):
        buf.write(f"{ri!r},{float(e)!r},{float(s)!r}\n")
    return buf.getvalue()
