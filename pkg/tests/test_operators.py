import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpkit.corpus import case_rng, interior_function, random_field
from lpkit.dyadic import DyadicCube
from lpkit.errors import (AtomConstructionFailure, CubeResolutionError, FormatError, IncompatibleWindows,
                          InvalidArgument)
from lpkit.grid import GridFunction, make_grid
from lpkit.operators import (AlmostDiagonalMatrix, AtomFamily, MoleculeSpec, almost_diagonal_apply,
                             atomic_decompose, atomic_synthesize, build_smooth_atom, molecule_matrix_check,
                             molecule_matrix_detail, normalize_molecule, omega_block, omega_weight,
                             smooth_bump, verify_atom, verify_molecule)
from lpkit.transform import CoefficientField, NormParams

# [DERIVED] mpmath evaluation of the two-branch weight at the cube corners (notes/oracles.py)
OMEGA_CASES = [
    ((3, (1,)), (5, (20,)), 1.0, 0.5, 0.5, 1.0, 0.02),
    ((5, (20,)), (3, (1,)), 1.0, 0.5, 0.5, 1.0, 0.005),
    ((2, (1, 3)), (4, (0, 2)), 0.5, 1.0, 2.0, 2.0, 0.02698730471238441),
]


@pytest.mark.parametrize("Q, P, eps, a1, a2, J, expect", OMEGA_CASES)
def test_omega_weight_oracle(Q, P, eps, a1, a2, J, expect):
    assert omega_weight(DyadicCube(*Q), DyadicCube(*P), eps, a1, a2, J) == pytest.approx(expect, rel=1e-13)


def test_omega_weight_periodic_distance():
    Q, P = DyadicCube(3, (0,)), DyadicCube(3, (7,))
    far = omega_weight(Q, P, 1.0, 0.0, 0.0, 1.0)
    near = omega_weight(Q, P, 1.0, 0.0, 0.0, 1.0, period=1.0)
    # corners 7/8 apart, or 1/8 apart on the torus
    assert far == pytest.approx(8.0 ** -2)
    assert near == pytest.approx(0.5 ** 2)
    with pytest.raises(InvalidArgument):
        omega_weight(Q, P, 0.0, 0.0, 0.0, 1.0)


def test_omega_block_matches_pointwise():
    spec = make_grid(1, 6, 1.0)
    B = omega_block(spec, 3, 4, 0.5, 0.2, 0.7, 1.0)
    assert B.shape == (8, 16)
    assert B[2, 11] == pytest.approx(omega_weight(DyadicCube(3, (2,)), DyadicCube(4, (11,)),
                                                  0.5, 0.2, 0.7, 1.0, period=1.0), rel=1e-14)


def test_identity_apply():
    spec = make_grid(1, 6, 1.0)
    A = AlmostDiagonalMatrix.identity(spec, (2, 5))
    lam = random_field(spec, case_rng(0, 0), (2, 5))
    assert (almost_diagonal_apply(A, lam) - lam).max_abs() == 0
    assert A.bound == 1.0


def test_split_sums_to_total():
    spec = make_grid(1, 6, 1.0)
    A = AlmostDiagonalMatrix.omega(spec, (2, 5), 1.0, 0.5, 0.5, 1.0)
    lam = random_field(spec, case_rng(0, 1), (2, 5))
    total, past, future = almost_diagonal_apply(A, lam, split=True)
    assert (past + future - total).max_abs() == 0
    assert future[5].max() == 0 and past[2].any()
    assert A.bound == pytest.approx(1.0)


def test_from_entries_bound():
    spec = make_grid(1, 6, 1.0)
    Q, P = DyadicCube(3, (1,)), DyadicCube(5, (20,))
    A = AlmostDiagonalMatrix.from_entries(spec, (2, 5), {(Q, P): 0.1}, eps=1.0, alpha1=0.5,
                                          alpha2=0.5, J=1.0)
    # periodic corner distance equals the plain one here (|1/8 - 5/8| = 1/2)
    assert A.bound == pytest.approx(0.1 / 0.02, rel=1e-12)
    with pytest.raises(IncompatibleWindows):
        AlmostDiagonalMatrix.from_entries(spec, (2, 4), {(Q, P): 0.1})


def test_apply_window_mismatch():
    spec = make_grid(1, 6, 1.0)
    A = AlmostDiagonalMatrix.identity(spec, (2, 5))
    with pytest.raises(IncompatibleWindows):
        almost_diagonal_apply(A, CoefficientField.zeros(spec, (2, 4)))


@given(st.integers(0, 2 ** 31), st.floats(-3, 3))
def test_apply_is_linear(seed, c):
    spec = make_grid(1, 5, 1.0)
    A = AlmostDiagonalMatrix.omega(spec, (2, 4), 0.5, 0.0, 0.0, 1.0)
    a = random_field(spec, case_rng(seed % 997, 0), (2, 4))
    b = random_field(spec, case_rng(seed % 997, 1), (2, 4))
    lhs = almost_diagonal_apply(A, a + b * c)
    rhs = almost_diagonal_apply(A, a) + almost_diagonal_apply(A, b) * c
    assert (lhs - rhs).max_abs() <= 1e-10 * max(1.0, lhs.max_abs())


def test_molecule_spec_validation():
    np_ = NormParams(2.0, 2.0)
    ms = MoleculeSpec.from_norm(1.5, 1.5, np_, 1)
    assert (ms.J, ms.M, ms.N, ms.K) == (1.0, 2.0, -1, 2)
    with pytest.raises(InvalidArgument):
        MoleculeSpec(0.5, 0.5, 1.0, 1, M=1.0)
    with pytest.raises(InvalidArgument):
        MoleculeSpec(0.5, 0.5, 1.0, 1, M=2.0, delta=0.4)
    assert MoleculeSpec.from_norm(-2.5, 0.0, np_, 1).N == 2


@pytest.mark.parametrize("n, L, Q", [(1, 10, DyadicCube(5, (7,))), (1, 8, DyadicCube(3, (0,))),
                                     (2, 6, DyadicCube(3, (2, 5)))])
@pytest.mark.parametrize("N", [-1, 0, 1, 2])
def test_atom_round_trip(n, L, Q, N):
    spec = make_grid(n, L, 1.0)
    a = build_smooth_atom(Q, N, 2, spec)
    rep = verify_atom(a, Q, N, 2)
    assert rep.passed, rep.to_dict()
    assert rep.diff_margin == pytest.approx(0.1, abs=1e-9)


def test_strict_normalization():
    # the two bounds coincide for n = 1; for n = 2 the strict one is larger
    Q1 = DyadicCube(4, (3,))
    spec1 = make_grid(1, 9, 1.0)
    assert np.array_equal(build_smooth_atom(Q1, 0, 1, spec1).values,
                          build_smooth_atom(Q1, 0, 1, spec1, strict=True).values)
    spec2 = make_grid(2, 6, 1.0)
    Q2 = DyadicCube(3, (2, 5))
    a = build_smooth_atom(Q2, 0, 1, spec2)
    b = build_smooth_atom(Q2, 0, 1, spec2, strict=True)
    assert np.abs(b.values).max() > np.abs(a.values).max()
    assert verify_atom(b, Q2, 0, 1, strict=True).passed
    assert not verify_atom(b, Q2, 0, 1).diff_ok


def test_raw_bump_fails_moments_wide_bump_fails_support():
    spec = make_grid(1, 9, 1.0)
    Q = DyadicCube(4, (3,))
    b = build_smooth_atom(Q, -1, 1, spec)
    assert not verify_atom(b, Q, 0, 1).moments_ok
    wide = smooth_bump(Q, spec, radius=2.0)
    assert verify_atom(wide * 1e-6, Q, -1, 1).support_violation > 0


def test_atom_construction_errors():
    spec = make_grid(1, 6, 1.0)
    with pytest.raises(CubeResolutionError):
        build_smooth_atom(DyadicCube(1, (0,)), 0, 1, spec)
    with pytest.raises(AtomConstructionFailure):
        build_smooth_atom(DyadicCube(6, (3,)), 3, 1, spec)
    with pytest.raises(InvalidArgument):
        build_smooth_atom(DyadicCube(3, (3,)), -2, 1, spec)


def test_normalized_atom_is_synthesis_molecule():
    spec = make_grid(1, 10, 1.0)
    Q = DyadicCube(5, (7,))
    ms = MoleculeSpec.from_norm(0.5, 0.5, NormParams(2.0, 2.0), 1, M=3.0)
    g = normalize_molecule(build_smooth_atom(Q, ms.N, ms.K, spec), Q, ms, "synthesis")
    rep = verify_molecule(g, Q, ms, "synthesis")
    assert rep.passed
    assert rep.worst_ratio == pytest.approx(0.9)
    assert set(rep.ratios) == {"cond1", "cond2", "cond3"}
    # a constant tail violates the decay condition far from Q
    bad = verify_molecule(g + 0.5 * float(np.abs(g.values).max()), Q, ms, "synthesis")
    assert bad.ratios["cond1"] > 1


def test_analysis_molecule_conditions():
    spec = make_grid(1, 10, 1.0)
    Q = DyadicCube(5, (7,))
    ms = MoleculeSpec.from_norm(-0.5, 0.5, NormParams(2.0, 2.0), 1, M=3.0)
    g = normalize_molecule(build_smooth_atom(Q, 0, 1, spec), Q, ms, "analysis")
    rep = verify_molecule(g, Q, ms, "analysis")
    assert set(rep.ratios) == {"cond1.1", "cond1.2", "cond1.3"}
    assert rep.passed
    with pytest.raises(InvalidArgument):
        verify_molecule(g, Q, ms, "both")


def test_molecule_matrix_bounded(bump_pair):
    spec = make_grid(1, 10, 1.0)
    ms = MoleculeSpec.from_norm(0.5, 0.5, NormParams(2.0, 2.0), 1, M=3.0)
    mols = {DyadicCube(v, (3,)): build_smooth_atom(DyadicCube(v, (3,)), ms.N, ms.K, spec) for v in (4, 5, 6)}
    r, Q, P = molecule_matrix_detail(mols, bump_pair, 0.5, 0.5, 0.5, ms.J, window=(2, 8))
    assert 0 < r < np.inf and Q is not None and P in mols
    assert molecule_matrix_check(mols, bump_pair, 0.5, 0.5, 0.5, ms.J, window=(2, 8)) == r
    with pytest.raises(InvalidArgument):
        molecule_matrix_check(mols, bump_pair, 1.0, 0.5, 0.5, ms.J, eps_1=0.5)


def test_atomic_decompose_round_trip(bump_pair):
    spec = make_grid(1, 9, 1.0)
    f = interior_function(spec, case_rng(0, 0), (2, 6))
    fam, lam = atomic_decompose(f, bump_pair, (2, 6))
    g = atomic_synthesize(fam, lam)
    assert g.is_real
    assert np.linalg.norm(g.values - f.values) / np.linalg.norm(f.values) < 1e-12
    for Q in fam.cubes()[::25]:
        assert verify_atom(fam[Q], Q, -1, 1).passed


def test_atomic_decompose_is_homogeneous(bump_pair):
    spec = make_grid(1, 8, 1.0)
    f = interior_function(spec, case_rng(1, 0), (2, 6))
    _, lam = atomic_decompose(f, bump_pair, (2, 6))
    _, lam3 = atomic_decompose(f * 3.0, bump_pair, (2, 6))
    assert (lam3 - lam * 3.0).max_abs() <= 1e-12 * lam3.max_abs()


def test_atomic_synthesize_missing_atom():
    spec = make_grid(1, 6, 1.0)
    lam = CoefficientField.from_entries(spec, (2, 3), {(3, (1,)): 1.0})
    with pytest.raises(IncompatibleWindows):
        atomic_synthesize({}, lam)


def test_atom_family_save_load(tmp_path, bump_pair):
    spec = make_grid(1, 7, 1.0)
    f = interior_function(spec, case_rng(2, 0), (2, 5))
    fam, _ = atomic_decompose(f, bump_pair, (2, 5))
    fam.save(tmp_path / "fam")
    back = AtomFamily.load(tmp_path / "fam")
    assert back.cubes() == fam.cubes()
    assert all(np.array_equal(back[Q].values, fam[Q].values) for Q in fam.cubes())
    (tmp_path / "fam" / "index.json").write_text("{}")
    with pytest.raises(FormatError):
        AtomFamily.load(tmp_path / "fam")
