import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpkit.corpus import (band_function, case_rng, interior_function, no_growth, octave_bands, random_field,
                          scale_sequence)
from lpkit.errors import InvalidArgument
from lpkit.grid import dft, make_grid


def test_case_rng_is_order_independent():
    a = case_rng(7, 3).standard_normal(4)
    case_rng(7, 2).standard_normal(10)
    assert np.array_equal(a, case_rng(7, 3).standard_normal(4))
    assert not np.array_equal(a, case_rng(7, 4).standard_normal(4))
    with pytest.raises(InvalidArgument):
        case_rng(-1)


@given(st.integers(0, 10 ** 6))
def test_interior_function_spectrum(seed):
    spec = make_grid(1, 8, 1.0)
    f = interior_function(spec, case_rng(seed, 0), (2, 6))
    F = np.abs(dft(f))
    r = spec.radial_frequency()
    assert f.is_real
    assert np.all(F[(r < 8) | (r > 32)] < 1e-9 * F.max())


def test_band_function_empty_band():
    with pytest.raises(InvalidArgument):
        band_function(make_grid(1, 4, 1.0), case_rng(0), 1.0, 2.0)


def test_octave_bands_and_sequences():
    spec = make_grid(1, 6, 1.0)
    bands = octave_bands(spec)
    assert bands[0] == (4.0, 8.0)
    seq = scale_sequence(spec, case_rng(0), (0, 9))
    assert seq.k_range == (0, 9)


def test_random_field_density():
    spec = make_grid(1, 8, 1.0)
    full = random_field(spec, case_rng(0), (2, 7))
    sparse = random_field(spec, case_rng(0), (2, 7), density=0.2)
    assert full.count() == sum(2 ** k for k in range(2, 8))
    assert sparse.count() < full.count() / 2


@pytest.mark.parametrize("small, large, ok", [(1.0, 1.09, True), (1.0, 1.1, False), (2.0, 1.0, True)])
def test_no_growth(small, large, ok):
    assert no_growth(small, large) is ok
