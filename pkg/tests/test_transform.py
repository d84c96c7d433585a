import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpkit.corpus import case_rng, interior_function, random_field
from lpkit.dyadic import DyadicCube
from lpkit.errors import CubeResolutionError, IncompatibleWindows, InvalidArgument
from lpkit.filters import build_filter_pair
from lpkit.grid import GridFunction, make_grid
from lpkit.transform import (CoefficientField, NormParams, analyze, check_window, coefficient_bound_check,
                             f_norm, peak_functional, scale_components, seq_norm, sup_inf_functionals,
                             synthesize)
from lpkit.weights import constant_weight_sequence

# [DERIVED] mpmath, f = cos(40 pi x) on L = 8 (notes/oracles.py)
LAM_7_3 = -0.03186893319865247
F_NORM = {0: 0.2599462600870208, 1: 33.27312129113866}


@pytest.fixture
def cosine_f():
    spec = make_grid(1, 8, 1.0)
    return GridFunction.from_callable(spec, lambda x: np.cos(40 * np.pi * x))


def test_norm_params():
    assert NormParams(2.0, 0.5).J(1) == 2.0
    assert NormParams(2.0, 3.0).J(2) == 2.0
    with pytest.raises(InvalidArgument):
        NormParams(0.0, 1.0)


def test_check_window():
    spec = make_grid(1, 8, 1.0)
    assert check_window(spec, (2, 8)) == (2, 8)
    for bad in ((1, 5), (3, 9), (5, 4)):
        with pytest.raises(CubeResolutionError):
            check_window(spec, bad)


def test_coefficient_field_algebra():
    spec = make_grid(1, 5, 1.0)
    a = CoefficientField.from_entries(spec, (2, 3), {(2, (1,)): 2.0, (3, (7,)): -1j})
    assert a.count() == 2
    assert (a * 2 - a - a).max_abs() == 0
    assert a.abs()[3][7] == 1.0
    assert a.restricted(3, 3).window == (3, 3)
    with pytest.raises(IncompatibleWindows):
        CoefficientField.from_entries(spec, (2, 3), {(4, (0,)): 1.0})


def test_analyze_single_cosine(cosine_f, bump_pair):
    lam = analyze(cosine_f, bump_pair, (2, 8))
    assert lam[7][3] == pytest.approx(LAM_7_3, rel=1e-12, abs=0)
    # the mode lies outside the annulus of scale 4; only round-off remains
    assert np.max(np.abs(lam[4])) < 1e-15


@pytest.mark.parametrize("s", [0, 1])
def test_norms_of_single_cosine(cosine_f, bump_pair, s):
    t = constant_weight_sequence(cosine_f.spec, s, (2, 8), 2.0)
    npq = NormParams(2.0, 2.0)
    fn = f_norm(cosine_f, t, npq, bump_pair, (2, 8))
    sn = seq_norm(analyze(cosine_f, bump_pair, (2, 8)), t, npq)
    assert fn == pytest.approx(F_NORM[s], rel=1e-12)
    # for p = q = 2 and a single mode the two norms coincide
    assert sn == pytest.approx(F_NORM[s], rel=1e-12)


@pytest.mark.parametrize("n, L, window, tol", [(1, 9, (2, 6), 1e-6), (2, 6, (2, 5), 1e-5)])
def test_reconstruction(pair, n, L, window, tol):
    spec = make_grid(n, L, 1.0)
    for i in range(3):
        f = interior_function(spec, case_rng(0, i), window)
        g = synthesize(analyze(f, pair, window), pair)
        assert np.linalg.norm((g.values - f.values).ravel()) / np.linalg.norm(f.values.ravel()) < tol


@given(st.integers(0, 2 ** 31), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_analyze_is_linear(seed, c):
    spec = make_grid(1, 6, 1.0)
    pair = build_filter_pair("bump")
    r = np.random.default_rng(seed)
    f = GridFunction(spec, r.standard_normal(spec.shape))
    g = GridFunction(spec, r.standard_normal(spec.shape))
    lhs = analyze(f + g * c, pair, (2, 5))
    rhs = analyze(f, pair, (2, 5)) + analyze(g, pair, (2, 5)) * c
    assert (lhs - rhs).max_abs() <= 1e-12 * (1 + abs(c)) * max(1.0, lhs.max_abs())


def test_scale_components_sum_to_band(bump_pair):
    spec = make_grid(1, 8, 1.0)
    f = interior_function(spec, case_rng(1, 0), (2, 8))
    comps = scale_components(f, bump_pair, (2, 8), "psi")
    assert comps[5].is_real


@pytest.mark.parametrize("s", [-1.0, 0.0, 1.0])
def test_coefficient_bound_single_entry_is_one(s):
    spec = make_grid(1, 8, 1.0)
    t = constant_weight_sequence(spec, s, (2, 6), 2.0)
    for k in range(2, 7):
        lam = CoefficientField.from_entries(spec, (2, 6), {(k, (1,)): 0.3 + 0.4j})
        assert coefficient_bound_check(lam, t, NormParams(2.0, 2.0)) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(0, 2 ** 31), st.sampled_from([(2.0, 2.0), (1.5, 2.0), (2.0, 1.5), (3.0, 0.7)]))
def test_coefficient_bound_on_random_fields(seed, pq):
    spec = make_grid(1, 7, 1.0)
    t = constant_weight_sequence(spec, 0.5, (2, 6), pq[0])
    lam = random_field(spec, case_rng(seed % 1000, 0), (2, 6), density=0.5)
    assert coefficient_bound_check(lam, t, NormParams(*pq)) <= 1 + 1e-12


def test_delta_mode_equals_standard_for_constant_weights():
    spec = make_grid(1, 7, 1.0)
    t = constant_weight_sequence(spec, 1.0, (2, 6), 1.5)
    lam = random_field(spec, case_rng(0, 0), (2, 6))
    npq = NormParams(1.5, 2.5)
    assert seq_norm(lam, t, npq, ("delta", 1.0)) == pytest.approx(seq_norm(lam, t, npq), rel=1e-12)
    with pytest.raises(InvalidArgument):
        seq_norm(lam, t, npq, ("delta", 1.5))


def test_peak_functional_brute_force():
    spec = make_grid(1, 5, 1.0)
    lam = random_field(spec, case_rng(2, 0), (2, 3))
    out = peak_functional(lam, 1.5, 2.0)
    for k in lam.scales:
        a = np.abs(lam[k])
        M = a.size
        for m in range(M):
            d = [min(abs(h - m), M - abs(h - m)) for h in range(M)]
            ref = sum(a[h] ** 1.5 * (1 + d[h]) ** -2.0 for h in range(M)) ** (1 / 1.5)
            assert out[k][m] == pytest.approx(ref, rel=1e-12)
    with pytest.raises(InvalidArgument):
        peak_functional(lam, 1.0, 1.0)


def test_sup_inf_bracket_coefficients(bump_pair):
    spec = make_grid(1, 8, 1.0)
    f = interior_function(spec, case_rng(4, 0), (2, 6))
    lam = analyze(f, bump_pair, (2, 6))
    sup, inf = sup_inf_functionals(f, bump_pair, 1, (2, 6))
    for k in lam.scales:
        assert np.all(np.abs(lam[k]) <= sup[k].real + 1e-15)
        assert np.all(inf[k].real <= sup[k].real)
    with pytest.raises(CubeResolutionError):
        sup_inf_functionals(f, bump_pair, 3, (2, 6))


def test_cube_lattice_matches_sample_points(cosine_f, bump_pair):
    lam = analyze(cosine_f, bump_pair, (7, 7))
    Q = DyadicCube(7, (3,))
    # sampling point of lambda_Q is the lower-left corner of Q
    ref = 2 ** -3.5 * bump_pair.eta(np.array([40 * np.pi / 128]))[0] * np.cos(40 * np.pi * Q.corner[0])
    assert lam[7][3] == pytest.approx(ref, rel=1e-12)
