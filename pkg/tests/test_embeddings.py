import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpkit.corpus import case_rng, interior_function, random_field
from lpkit.embeddings import (EmbeddingCase, elementary_embedding_check, sobolev_condition,
                              sobolev_condition_detail, sobolev_ratio)
from lpkit.errors import DegenerateInput, InvalidArgument
from lpkit.filters import build_filter_pair
from lpkit.grid import make_grid
from lpkit.transform import CoefficientField
from lpkit.weights import constant_weight_sequence

PAIR = build_filter_pair("bump")


@given(st.integers(0, 10 ** 6), st.floats(0.3, 3.0), st.floats(1.0, 3.0), st.floats(1.0, 4.0))
def test_elementary_inequality(seed, q, grow, p):
    spec = make_grid(1, 7, 1.0)
    f = interior_function(spec, case_rng(seed, 0), (2, 7))
    t = constant_weight_sequence(spec, 0.5, (2, 7), p)
    lhs, rhs = elementary_embedding_check(f, t, p, q, q * grow, PAIR, (2, 7))
    assert lhs <= rhs


def test_elementary_equal_exponents_and_sup():
    spec = make_grid(1, 7, 1.0)
    f = interior_function(spec, case_rng(0, 0), (2, 7))
    t = constant_weight_sequence(spec, 1.0, (2, 7), 2.0)
    lhs, rhs = elementary_embedding_check(f, t, 2.0, 1.5, 1.5, PAIR, (2, 7))
    assert lhs == rhs
    lhs, rhs = elementary_embedding_check(f, t, 2.0, 1.5, math.inf, PAIR, (2, 7))
    assert lhs <= rhs
    with pytest.raises(InvalidArgument):
        elementary_embedding_check(f, t, 2.0, 2.0, 1.0, PAIR, (2, 7))


def test_classical_condition_is_one():
    spec = make_grid(1, 10, 1.0)
    t = constant_weight_sequence(spec, 1.0, (2, 9), 2.0)
    w = constant_weight_sequence(spec, 0.75, (2, 9), 4.0)
    assert abs(sobolev_condition(t, w) - 1.0) <= 1e-12


@pytest.mark.parametrize("k", [2, 5, 9])
def test_single_entry_ratio_closed_form(k):
    # [DERIVED] one entry at scale k: ratio 2^{k (s1 - 1/p1 - s0 + 1/p0)}
    spec = make_grid(1, 10, 1.0)
    s0, p0, p1 = 1.0, 2.0, 4.0
    s1 = s0 - 1 / p0 + 1 / p1 + 0.25
    t = constant_weight_sequence(spec, s0, (2, 9), p0)
    w = constant_weight_sequence(spec, s1, (2, 9), p1)
    lam = CoefficientField.from_entries(spec, (2, 9), {(k, (1,)): 2.0 - 1j})
    assert sobolev_ratio(lam, t, w, p0, 2.0, p1, 2.0) == pytest.approx(2.0 ** (k / 4), rel=1e-12)
    sup, Q = sobolev_condition_detail(t, w)
    assert Q.k == 9 and sup == pytest.approx(2.0 ** (9 / 4), rel=1e-12)


def test_classical_ratio_bounded_on_fields():
    spec = make_grid(1, 10, 1.0)
    t = constant_weight_sequence(spec, 1.0, (2, 9), 2.0)
    w = constant_weight_sequence(spec, 0.75, (2, 9), 4.0)
    for i in range(5):
        lam = random_field(spec, case_rng(0, i), (2, 9))
        assert sobolev_ratio(lam, t, w, 2.0, 2.0, 4.0, 2.0) <= 1.0 + 1e-12


def test_sobolev_errors():
    spec = make_grid(1, 6, 1.0)
    t = constant_weight_sequence(spec, 1.0, (2, 5), 2.0)
    w = constant_weight_sequence(spec, 1.0, (2, 4), 4.0)
    with pytest.raises(InvalidArgument):
        sobolev_condition(t, w)
    with pytest.raises(InvalidArgument):
        sobolev_ratio(CoefficientField.zeros(spec, (2, 5)), t, t, 2.0, 2.0, 2.0, 2.0)
    with pytest.raises(DegenerateInput):
        sobolev_ratio(CoefficientField.zeros(spec, (2, 5)), t, t, 2.0, 2.0, 4.0, 2.0)


def test_embedding_case_json():
    case = EmbeddingCase(2.0, 2.0, 4.0, 2.0, 1.0, {8: 0.5, 4: 0.7})
    d = json.loads(case.to_json())
    assert list(d["ratios"]) == ["4", "8"]
    assert d["source"] == {"p": 2.0, "q": 2.0}
