import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpkit.errors import InvalidArgument
from lpkit.grid import GridFunction, make_grid
from lpkit.weights import (WeightSequence, XClassParams, ap_constant, ap_constant_detail, ap_depth_sweep,
                           conjugate, constant_weight_sequence, make_power_weight_sequence,
                           measure_comparison_check, power_weight, power_weight_in_ap,
                           reverse_holder_epsilon, same_muckenhoupt_check, x_class_constants)

# [DERIVED] plain-loop dyadic A_2 estimate of |x - 1/2|^{1/2} at L = 6 (notes/oracles.py)
A2_HALF_L6 = 1.2626571598973302


def test_conjugate():
    assert conjugate(2.0) == 2.0
    assert conjugate(1.0) == math.inf
    assert conjugate(math.inf) == 1.0


def test_params_standard():
    prm = XClassParams.standard(0.5, 1.0, 2.0)
    assert (prm.sigma1, prm.sigma2, prm.theta) == (2.0, 2.0, 1.0)
    with pytest.raises(InvalidArgument):
        XClassParams(0, 0, 1, 1, 2.0, theta=3.0)


def test_weight_sequence_validation():
    spec = make_grid(1, 4, 1.0)
    with pytest.raises(InvalidArgument):
        WeightSequence(spec, {0: np.ones(16), 2: np.ones(16)}, 2.0)
    with pytest.raises(InvalidArgument):
        WeightSequence(spec, {}, 2.0)
    t = constant_weight_sequence(spec, 1.0, (0, 3), 2.0)
    assert t.k_range == (0, 3)
    assert t.covers(1, 2) and not t.covers(1, 4)
    assert t.shifted(2).k_range == (2, 5)


def test_local_norms_of_constant_sequence():
    spec = make_grid(1, 6, 1.0)
    t = constant_weight_sequence(spec, 1.0, (0, 4), 2.0)
    # ||2^k | L_2(Q)|| = 2^k 2^{-k/2}
    for k in t.scales:
        assert np.allclose(t.local_norms(k), 2.0 ** (k / 2), rtol=1e-14)


def test_ap_constant_of_one_is_exact():
    assert ap_constant(GridFunction.constant(make_grid(2, 4, 1.0), 1.0), 2.0) == 1.0


def test_ap_matches_oracle():
    assert ap_constant(power_weight(make_grid(1, 6, 1.0), 0.5), 2.0) == pytest.approx(A2_HALF_L6, rel=1e-13)
    assert ap_depth_sweep(0.5, 2.0, [6])[0] == pytest.approx(A2_HALF_L6, rel=1e-13)


def test_ap_detail_worst_cube_touches_singularity():
    c, Q = ap_constant_detail(power_weight(make_grid(1, 8, 1.0), 1.0), 2.0)
    # the worst interval reaches the singular point 1/2
    assert Q.corner[0] <= 0.5 <= Q.corner[0] + Q.side
    assert c > 1


@pytest.mark.parametrize("a, p, n, inside", [(0.5, 2, 1, True), (1.0, 2, 1, False), (-1.0, 2, 1, False),
                                             (1.5, 2, 2, True), (-0.99, 1.5, 1, True)])
def test_power_weight_in_ap(a, p, n, inside):
    assert power_weight_in_ap(a, p, n) is inside


def test_ap_boundary_grows_interior_plateaus():
    half = ap_depth_sweep(0.5, 2.0, [8, 10, 12])
    one = ap_depth_sweep(1.0, 2.0, [8, 10, 12])
    assert half[-1] / half[0] < 1.05
    assert one[1] > one[0] and one[2] > one[1]


@given(st.floats(-0.9, 0.9), st.floats(0.1, 5.0))
def test_ap_scale_invariant(a, c):
    w = power_weight(make_grid(1, 6, 1.0), a)
    assert ap_constant(w * c, 2.0) == pytest.approx(ap_constant(w, 2.0), rel=1e-12)


@given(st.floats(-0.9, 0.9))
def test_ap_at_least_one(a):
    assert ap_constant(power_weight(make_grid(1, 6, 1.0), a), 2.0) >= 1 - 1e-12


@pytest.mark.parametrize("s", [-1.0, 0.0, 0.5, 2.0])
def test_power_sequence_unit_constants(s):
    spec = make_grid(1, 6, 1.0)
    t = constant_weight_sequence(spec, s, (0, 5), 2.0)
    rep = x_class_constants(t, t.params)
    assert abs(rep.C1 - 1) <= 1e-12 and abs(rep.C2 - 1) <= 1e-12
    assert rep.alpha_fit == pytest.approx((s, s), abs=1e-12)


def test_product_sequence_constants_depth_stable():
    spec = make_grid(1, 8, 1.0)
    om = power_weight(spec, 0.25)
    t = make_power_weight_sequence(0.5, om, 2.0, 1.0, (0, 6))
    shallow = x_class_constants(t, t.params, 4)
    deep = x_class_constants(t, t.params, 8)
    assert math.isfinite(deep.C1) and math.isfinite(deep.C2)
    assert max(deep.C1, deep.C2) < 1.1 * max(shallow.C1, shallow.C2)
    assert deep.alpha_fit[1] >= deep.alpha_fit[0] - 1e-9


def test_power_sequence_needs_r_below_p():
    spec = make_grid(1, 5, 1.0)
    with pytest.raises(InvalidArgument):
        make_power_weight_sequence(1.0, power_weight(spec, 0.2), 2.0, 2.0, (0, 3))


def test_same_muckenhoupt_spread_is_one():
    spec = make_grid(1, 6, 1.0)
    t = make_power_weight_sequence(1.0, power_weight(spec, 0.25), 2.0, 1.0, (0, 3))
    consts, spread = same_muckenhoupt_check(t, 2.0, 1.0)
    assert spread == pytest.approx(1.0, rel=1e-12)
    assert len(consts) == 4


def test_reverse_holder_constant_weight():
    eps, ratios = reverse_holder_epsilon(GridFunction.constant(make_grid(1, 5, 1.0), 2.0))
    assert eps == 0.4
    assert all(r == pytest.approx(1.0) for r in ratios.values())


def test_measure_comparison_holds_for_ap_weight():
    w = power_weight(make_grid(1, 6, 1.0), 0.5)
    assert measure_comparison_check(w, 2.0, 6) <= 1 + 1e-12
