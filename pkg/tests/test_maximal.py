import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpkit.corpus import case_rng, scale_sequence
from lpkit.errors import DegenerateInput, IncompatibleGrids, InvalidArgument, ParameterDomainViolation
from lpkit.grid import GridFunction, lp_norm, make_grid
from lpkit.maximal import (FunctionSequence, discrete_convolution_bound, fefferman_stein_pair_ratio,
                           hl_maximal, kernel_maximal_ratio, m_sigma, vector_maximal_ratio)
from lpkit.weights import constant_weight_sequence


@pytest.fixture
def seq():
    spec = make_grid(1, 7, 1.0)
    return scale_sequence(spec, case_rng(3, 0), (0, 3))


def test_function_sequence_checks():
    a = GridFunction.zeros(make_grid(1, 4, 1.0))
    b = GridFunction.zeros(make_grid(1, 5, 1.0))
    with pytest.raises(IncompatibleGrids):
        FunctionSequence({0: a, 1: b})
    with pytest.raises(InvalidArgument):
        FunctionSequence({0: a, 2: a})


def test_m_sigma_one_is_hl():
    spec = make_grid(1, 5, 1.0)
    f = GridFunction(spec, np.random.default_rng(0).standard_normal(spec.shape))
    assert np.array_equal(m_sigma(f, 1.0).values, hl_maximal(f).values)
    with pytest.raises(InvalidArgument):
        m_sigma(f, 0.0)


@given(st.floats(0.5, 3.0), st.integers(0, 2 ** 31))
def test_m_sigma_dominates(sigma, seed):
    spec = make_grid(1, 5, 1.0)
    f = GridFunction(spec, np.random.default_rng(seed).standard_normal(spec.shape))
    assert np.all(m_sigma(f, sigma).values >= np.abs(f.values) * (1 - 1e-12))


def test_vector_ratio_at_least_one(seq):
    t = constant_weight_sequence(seq.spec, 0.5, (0, 3), 2.0)
    assert vector_maximal_ratio(seq, t, 2.0, 2.0) >= 1.0


def test_vector_ratio_needs_covering_weights(seq):
    t = constant_weight_sequence(seq.spec, 0.5, (0, 3), 2.0)
    with pytest.raises(InvalidArgument):
        vector_maximal_ratio(seq, t, 2.0, 2.0, shift=1)


def test_shift_uses_class_exponent(seq):
    # t_k = 2^k: shifting by one scale divides the numerator by 2 and the factor restores it
    t = constant_weight_sequence(seq.spec, 1.0, (-1, 4), 2.0)
    base = vector_maximal_ratio(seq, t, 2.0, 2.0)
    for shift in (1, -1):
        assert vector_maximal_ratio(seq, t, 2.0, 2.0, shift=shift) == pytest.approx(base, rel=1e-12)


@pytest.mark.parametrize("direction, K", [("past", 1.0), ("past", 0.5), ("future", 1.0), ("future", 1.5)])
def test_kernel_rejects_domain(seq, direction, K):
    t = constant_weight_sequence(seq.spec, 1.0, (0, 3), 2.0)
    with pytest.raises(ParameterDomainViolation):
        kernel_maximal_ratio(seq, t, 2.0, 2.0, K, direction)


def test_kernel_accepts_domain(seq):
    t = constant_weight_sequence(seq.spec, 1.0, (0, 3), 2.0)
    past = kernel_maximal_ratio(seq, t, 2.0, 2.0, 2.0, "past")
    fut = kernel_maximal_ratio(seq, t, 2.0, 2.0, 0.0, "future")
    assert past >= 1.0 and fut >= 1.0
    with pytest.raises(InvalidArgument):
        kernel_maximal_ratio(seq, t, 2.0, 2.0, 0.0, "sideways")


def test_fefferman_stein_with_unit_weight():
    spec = make_grid(1, 6, 1.0)
    f = GridFunction(spec, np.random.default_rng(1).standard_normal(spec.shape))
    one = GridFunction.constant(spec, 1.0)
    r = fefferman_stein_pair_ratio(f, one, 2.0)
    assert r == pytest.approx(lp_norm(hl_maximal(f), 2) ** 2 / lp_norm(f, 2) ** 2, rel=1e-12)


def test_discrete_convolution_zero_cases():
    spec = make_grid(1, 4, 1.0)
    z = FunctionSequence({0: GridFunction.zeros(spec), 1: GridFunction.zeros(spec)})
    one = FunctionSequence({0: GridFunction.constant(spec, 1.0), 1: GridFunction.constant(spec, 1.0)})
    assert discrete_convolution_bound(z, z, 0.5, 1.0, 2.0, 2.0) == (0.0, 0.0)
    with pytest.raises(DegenerateInput):
        discrete_convolution_bound(one, z, 0.5, 1.0, 2.0, 2.0)
    lhs, rhs = discrete_convolution_bound(one, one, 0.5, 1.0, 2.0, 2.0)
    # ||g_k f_j||_1 = 1; delta_0 = 1, delta_1 = 1.5, eta_0 = 1.5, eta_1 = 1
    assert lhs == pytest.approx(5.0)
    assert rhs == pytest.approx(2.0)
