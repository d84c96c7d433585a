"""Seeded random inputs for the inequality harnesses.

One 64-bit seed and a case index select an independent Philox stream, so
cases can be generated in any order (or in parallel) with identical output.
"""
from __future__ import annotations

import math

import numpy as np

from .dyadic import cube_layout
from .errors import InvalidArgument
from .filters import representable_window
from .grid import GridFunction, GridSpec
from .maximal import FunctionSequence
from .transform import CoefficientField

__all__ = [
    "case_rng",
    "band_mask",
    "band_function",
    "interior_function",
    "octave_bands",
    "scale_sequence",
    "random_field",
    "no_growth",
]

AMP_LO, AMP_HI = 1e-2, 1e2


def case_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for case ``index`` of run ``seed``."""
    if seed < 0 or index < 0:
        raise InvalidArgument("seed and index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + int(index)))


def band_mask(spec: GridSpec, r_lo: float, r_hi: float) -> np.ndarray:
    """Boolean mask of nonzero frequencies with ``r_lo <= |xi| <= r_hi``."""
    r = spec.radial_frequency()
    return (r >= r_lo) & (r <= r_hi) & (r > 0)


def band_function(spec: GridSpec, rng: np.random.Generator, r_lo: float, r_hi: float,
                  real: bool = True) -> GridFunction:
    """Random function with spectrum in ``r_lo <= |xi| <= r_hi``.

    Each Fourier mode gets a log-uniform amplitude in ``[1e-2, 1e2]`` and a
    uniform phase.  Real output symmetrizes the spectrum, which keeps it in
    the same radial band.
    """
    mask = band_mask(spec, r_lo, r_hi)
    if not mask.any():
        raise InvalidArgument(f"no grid frequency in band [{r_lo}, {r_hi}]")
    amp = np.exp(rng.uniform(math.log(AMP_LO), math.log(AMP_HI), spec.shape))
    phase = rng.uniform(0.0, 2.0 * np.pi, spec.shape)
    coef = np.where(mask, amp * np.exp(1j * phase), 0.0)
    v = np.fft.ifftn(coef) * spec.size
    return GridFunction(spec, v.real if real else v)


def interior_function(spec: GridSpec, rng: np.random.Generator, window, real: bool = True) -> GridFunction:
    """Band-limited function whose spectrum lies in ``[2^{k_lo+1}, 2^{k_hi-1}]``.

    Every frequency in that band is fully resolved by the scales of the
    window, so the truncated reproducing formula is exact on it.
    """
    k_lo, k_hi = window
    return band_function(spec, rng, 2.0 ** (k_lo + 1), 2.0 ** (k_hi - 1), real)


def octave_bands(spec: GridSpec) -> list[tuple[float, float]]:
    """Nonempty octave bands ``[2^k, 2^{k+1}]`` for k in the representable window."""
    k_lo, k_hi = representable_window(spec)
    bands = []
    for k in range(k_lo, k_hi + 1):
        lo, hi = 2.0 ** k, min(2.0 ** (k + 1), math.pi / spec.h)
        if band_mask(spec, lo, hi).any():
            bands.append((lo, hi))
    return bands


def scale_sequence(spec: GridSpec, rng: np.random.Generator, k_range, real: bool = True) -> FunctionSequence:
    """One band-limited function per scale; bands are cycled when scales outnumber them."""
    bands = octave_bands(spec)
    k0, k1 = k_range
    return FunctionSequence({k: band_function(spec, rng, *bands[(k - k0) % len(bands)], real)
                             for k in range(k0, k1 + 1)})


def random_field(spec: GridSpec, rng: np.random.Generator, window, density: float = 1.0) -> CoefficientField:
    """Complex Gaussian coefficients with log-uniform scale factors.

    ``density < 1`` zeroes a random fraction of the entries.
    """
    coeffs = {}
    for k in range(window[0], window[1] + 1):
        _, M = cube_layout(spec, k)
        shape = (M,) * spec.n
        z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        z *= np.exp(rng.uniform(math.log(AMP_LO), math.log(AMP_HI)))
        if density < 1:
            z = np.where(rng.uniform(size=shape) < density, z, 0.0)
        coeffs[k] = z
    return CoefficientField(spec, coeffs)


def no_growth(small: float, large: float, tol: float = 0.10) -> bool:
    """Whether a worst-case statistic grows by less than ``tol`` (relative)."""
    return large < (1.0 + tol) * small
