import numpy as np
import pytest

from qdesign.dual_design import (
    PINV_RCOND,
    AlignmentMissing,
    BAssignment,
    PlaneShapeMismatch,
    ShapeMismatch,
    b_ops_dim2,
    default_alignment,
    hermitian_basis,
    solve_b_from_sic,
    verify_b_conditions,
)
from qdesign.finite_field import FiniteField
from qdesign.geometry import IncidenceStructure, dual_plane, share_line_matrix
from qdesign.sic import SearchConfig, search_fiducial, sic_dim2_exact, wh_orbit

QUTRIT_FIDUCIAL = np.array([0, 1, -1]) / np.sqrt(2)


def bloch(B):
    return np.array([np.trace(B @ s).real for s in (
        np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]]))])


def test_qubit_b_operator_traces():
    a = b_ops_dim2()
    B = a.operators
    assert np.allclose(np.einsum("aii->a", B), 1 / 3)
    assert np.allclose(np.einsum("aij,aji->a", B, B), 2 / 9)
    shared = share_line_matrix(a.dual_plane)
    # oracle: Tr(B_a B_b) = 1/18 + (n_a . n_b)/6 for Bloch-form operators
    n = np.array([bloch(b) for b in B]) * np.sqrt(3)
    for i in range(6):
        for j in range(6):
            if i != j:
                expect = 1 / 18 + (n[i] @ n[j]) / 6
                assert np.trace(B[i] @ B[j]).real == pytest.approx(expect)
                assert expect == pytest.approx(1 / 18 if shared[i, j] else -1 / 9)


def test_qubit_b_operators_pass():
    rep = verify_b_conditions(b_ops_dim2(), 1e-12)
    assert rep.passed and rep.implication_holds
    assert max(rep.normalization, rep.self_trace, rep.shared_line, rep.non_shared) < 1e-12


def test_qubit_line_sums_are_tetrahedron():
    S = b_ops_dim2().line_sums()
    P = sic_dim2_exact().projectors()
    assert np.abs(S - P).max() < 1e-12


def test_zero_operators():
    a = b_ops_dim2()
    rep = verify_b_conditions(BAssignment(2, a.dual_plane, np.zeros_like(a.operators)))
    assert rep.normalization == pytest.approx(1 / 3)
    assert not rep.passed and rep.implication_holds is None


def test_swapped_pair_breaks_shared_line_condition():
    a = b_ops_dim2()
    ops = a.operators.copy()
    shared = share_line_matrix(a.dual_plane)
    # move the x- operator onto a point collinear with x+
    plus, minus = 0, int(np.flatnonzero(~shared[0])[1])
    other = int(np.flatnonzero(shared[0])[0])
    ops[[minus, other]] = ops[[other, minus]]
    rep = verify_b_conditions(BAssignment(2, a.dual_plane, ops), 1e-12)
    assert not rep.passed
    i, j = rep.witnesses["shared_line"]
    assert shared[i, j]
    assert abs(np.trace(ops[i] @ ops[j]).real - 1 / 18) > 1e-3


def test_unitary_conjugation_keeps_conditions_and_implication():
    rng = np.random.default_rng(1)
    U, _ = np.linalg.qr(rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    a = b_ops_dim2()
    ops = U @ a.operators @ U.conj().T
    rep = verify_b_conditions(BAssignment(2, a.dual_plane, ops), 1e-12)
    assert rep.passed and rep.implication_holds
    assert rep.derived_overlap <= rep.derived_bound


def test_solve_qubit():
    a = solve_b_from_sic(sic_dim2_exact())
    assert a.constraint_residual < 1e-10
    assert verify_b_conditions(a, 1e-10).passed


def test_solve_qutrit_reports_conditions():
    a = solve_b_from_sic(wh_orbit(QUTRIT_FIDUCIAL))
    assert a.constraint_residual < 1e-10
    rep = verify_b_conditions(a)
    report = rep.to_json()
    assert set(report) >= {"normalization", "self_trace", "shared_line", "non_shared"}


def test_solve_output_is_hermitian():
    a = solve_b_from_sic(wh_orbit(QUTRIT_FIDUCIAL))
    assert np.abs(a.operators - a.operators.conj().transpose(0, 2, 1)).max() < 1e-14


def test_solve_invariant_under_constraint_order():
    sic = wh_orbit(QUTRIT_FIDUCIAL)
    dual = dual_plane(FiniteField(3))
    a = solve_b_from_sic(sic, dual)
    basis = hermitian_basis(3)
    P = np.empty((9, 3, 3), dtype=complex)
    P[default_alignment(sic, dual)] = sic.projectors()
    rhs = np.einsum("aij,lji->la", basis, P).real
    inc = dual.incidence.T.astype(float)
    perm = np.random.default_rng(0).permutation(9)
    coords = np.linalg.pinv(inc[perm], rcond=PINV_RCOND) @ rhs[perm]
    B = np.einsum("pa,aij->pij", coords, basis)
    assert np.abs(B - a.operators).max() < 1e-10


def test_hermitian_basis_orthonormal():
    for N in (2, 3, 4):
        E = hermitian_basis(N)
        assert len(E) == N * N
        assert np.allclose(np.einsum("aij,bji->ab", E, E), np.eye(N * N))
        assert np.allclose(E, E.conj().transpose(0, 2, 1))


def test_shape_errors():
    dual = dual_plane(FiniteField(2))
    short = IncidenceStructure(5, [[x for x in ln if x != 5] for ln in dual.lines])
    with pytest.raises(ShapeMismatch):
        solve_b_from_sic(sic_dim2_exact(), short)
    a = b_ops_dim2()
    with pytest.raises(PlaneShapeMismatch):
        verify_b_conditions(BAssignment(2, a.dual_plane, a.operators[:5]))


def test_alignment_errors():
    fid = search_fiducial(4, SearchConfig(seed=0))
    with pytest.raises(AlignmentMissing):
        solve_b_from_sic(fid.orbit())
    a = solve_b_from_sic(fid.orbit(), alignment=range(16))
    assert a.constraint_residual < 1e-10
    with pytest.raises(AlignmentMissing):
        solve_b_from_sic(sic_dim2_exact(), alignment=[0, 0, 1, 2])


def test_json_round_trip():
    a = solve_b_from_sic(sic_dim2_exact())
    back = BAssignment.from_json(a.to_json())
    assert np.array_equal(back.operators, a.operators)
    assert back.dual_plane == a.dual_plane
