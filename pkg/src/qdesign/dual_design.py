"""Hermitian operators on the points of a dual affine plane.

Each dual point alpha carries an operator B_alpha; the operators on a dual
line should sum to that line's rank-1 projector and obey

    Tr B_a       = 1/(N+1)
    Tr B_a^2     = N/(N+1)^2
    Tr B_a B_b   = 1/(N(N+1)^2)   a != b on a common line
    Tr B_a B_b   = -1/(N+1)^2     a, b on no common line

:func:`solve_b_from_sic` works backward from a SIC: it returns the
minimum-norm solution of the line-sum equations, computed in the real
N^2-dimensional space of Hermitian matrices, and leaves the trace
conditions to :func:`verify_b_conditions`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import QDesignError
from .finite_field import FiniteField, is_prime
from .geometry import IncidenceStructure, dual_plane, share_line_matrix
from .sic import SicCandidate

DEFAULT_TOL = 1e-12
PINV_RCOND = 1e-10


class ShapeMismatch(QDesignError):
    pass


PlaneShapeMismatch = ShapeMismatch


class AlignmentMissing(QDesignError):
    pass


PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass
class BAssignment:
    N: int
    dual_plane: IncidenceStructure
    operators: np.ndarray                 # (n_points, N, N)
    constraint_residual: float | None = None

    def line_sums(self) -> np.ndarray:
        M = self.dual_plane.incidence.astype(float)
        return np.einsum("al,aij->lij", M, self.operators)

    def to_json(self) -> dict:
        data = {
            "N": self.N,
            "dual_plane": self.dual_plane.to_json(),
            "operators": [
                [[[float(z.real), float(z.imag)] for z in row] for row in op]
                for op in self.operators
            ],
        }
        if self.constraint_residual is not None:
            data["constraint_residual"] = self.constraint_residual
        return data

    @classmethod
    def from_json(cls, data: dict) -> "BAssignment":
        ops = np.array(
            [[[complex(re, im) for re, im in row] for row in op] for op in data["operators"]],
            dtype=complex,
        )
        return cls(int(data["N"]), IncidenceStructure.from_json(data["dual_plane"]), ops,
                   data.get("constraint_residual"))


def b_ops_dim2() -> BAssignment:
    """The six operators ``I/6 +- sigma/(2 sqrt 3)`` on the dual order-2 plane.

    Dual points are the lines of the order-2 affine plane.  Striation s gets
    Pauli matrix x, y, z in turn, with sign + on the intercept-0 line and -
    on the other; the two lines of a striation are the dual points sharing
    no dual line, so each +- pair lands on a non-collinear pair.  The sum
    over the dual line of phase-space point (a, b) has Bloch vector
    ``((-1)^a, (-1)^b, (-1)^(a+b)) / sqrt 3``, matching the ordering of
    :func:`qdesign.sic.sic_dim2_exact`.
    """
    from .geometry import build_affine_plane

    plane = build_affine_plane(FiniteField(2))
    dual = dual_plane(FiniteField(2))
    ops = np.zeros((dual.n_points, 2, 2), dtype=complex)
    for s, pauli in zip(plane.striations, "xyz"):
        for sign, line in zip((1, -1), s):
            ops[line] = np.eye(2) / 6 + sign * PAULI[pauli] / (2 * np.sqrt(3))
    # dual point j is plane line j (dualize keeps line order as point order)
    return BAssignment(2, dual, ops)


@dataclass
class BConditionReport:
    normalization: float
    self_trace: float
    shared_line: float
    non_shared: float
    line_sum: float
    tol: float
    witnesses: dict = field(default_factory=dict)
    derived_overlap: float | None = None
    derived_purity: float | None = None
    derived_bound: float | None = None

    @property
    def trace_conditions_pass(self) -> bool:
        return max(self.normalization, self.self_trace, self.shared_line,
                   self.non_shared) <= self.tol

    @property
    def implication_holds(self) -> bool | None:
        """When the four trace conditions pass, the line sums must be SIC-like."""
        if not self.trace_conditions_pass:
            return None
        return max(self.derived_overlap, self.derived_purity) <= self.derived_bound

    @property
    def passed(self) -> bool:
        return self.trace_conditions_pass and self.line_sum <= self.tol

    def to_json(self) -> dict:
        return {
            "normalization": self.normalization,
            "self_trace": self.self_trace,
            "shared_line": self.shared_line,
            "non_shared": self.non_shared,
            "line_sum": self.line_sum,
            "derived_overlap": self.derived_overlap,
            "derived_purity": self.derived_purity,
            "tol": self.tol,
            "trace_conditions_pass": self.trace_conditions_pass,
            "witnesses": self.witnesses,
        }


def _check_shape(N: int, dual: IncidenceStructure, n_ops: int | None = None):
    if dual.n_points != N * (N + 1) or dual.n_lines != N * N:
        raise ShapeMismatch(
            f"dual plane of order {N} needs {N * (N + 1)} points and {N * N} lines, "
            f"got {dual.n_points} and {dual.n_lines}"
        )
    if n_ops is not None and n_ops != dual.n_points:
        raise ShapeMismatch(f"{n_ops} operators for {dual.n_points} points")


def verify_b_conditions(a: BAssignment, tol: float = DEFAULT_TOL) -> BConditionReport:
    N = a.N
    _check_shape(N, a.dual_plane, len(a.operators))
    B = a.operators
    w = {}
    tr = np.einsum("aii->a", B).real
    norm_dev = np.abs(tr - 1 / (N + 1))
    gram = np.einsum("aij,bji->ab", B, B).real
    self_dev = np.abs(np.diag(gram) - N / (N + 1) ** 2)
    shared = share_line_matrix(a.dual_plane)
    off = ~np.eye(len(B), dtype=bool)
    shared_dev = np.where(shared, np.abs(gram - 1 / (N * (N + 1) ** 2)), 0.0)
    non_dev = np.where(~shared & off, np.abs(gram + 1 / (N + 1) ** 2), 0.0)
    for name, dev in (("shared_line", shared_dev), ("non_shared", non_dev)):
        if dev.max() > tol:
            i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
            w[name] = [int(i), int(j)]
    if norm_dev.max() > tol:
        w["normalization"] = int(np.argmax(norm_dev))
    S = a.line_sums()
    # rank-1 projector: idempotent with unit trace
    idem = np.abs(np.einsum("lij,ljk->lik", S, S) - S).max(axis=(1, 2))
    unit = np.abs(np.einsum("lii->l", S).real - 1)
    line_dev = np.maximum(idem, unit)
    if line_dev.max() > tol:
        w["line_sum"] = int(np.argmax(line_dev))
    overlaps = np.einsum("lij,mji->lm", S, S).real
    off_l = ~np.eye(len(S), dtype=bool)
    return BConditionReport(
        normalization=float(norm_dev.max()),
        self_trace=float(self_dev.max()),
        shared_line=float(shared_dev.max()),
        non_shared=float(non_dev.max()),
        line_sum=float(line_dev.max()),
        tol=tol,
        witnesses=w,
        derived_overlap=float(np.abs(overlaps[off_l] - 1 / (N + 1)).max()),
        derived_purity=float(np.abs(np.diag(overlaps) - 1).max()),
        derived_bound=(N + 1) ** 2 * tol,
    )


def hermitian_basis(N: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of N x N Hermitian matrices.

    Identity/sqrt(N) first, then symmetric and antisymmetric off-diagonal
    elements, then traceless diagonal ones.
    """
    out = [np.eye(N, dtype=complex) / np.sqrt(N)]
    for j in range(N):
        for k in range(j + 1, N):
            s = np.zeros((N, N), dtype=complex)
            s[j, k] = s[k, j] = 1 / np.sqrt(2)
            a = np.zeros((N, N), dtype=complex)
            a[j, k], a[k, j] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            out += [s, a]
    for d in range(1, N):
        m = np.zeros((N, N), dtype=complex)
        m[np.arange(d), np.arange(d)] = 1
        m[d, d] = -d
        out.append(m / np.sqrt(d * (d + 1)))
    return np.array(out)


def default_alignment(sic: SicCandidate, dual: IncidenceStructure) -> list[int]:
    """SIC element ``j*N + k`` goes to the dual line labelled ``"j,k"``."""
    N = sic.N
    if not is_prime(N):
        raise AlignmentMissing(
            f"no default alignment for non-prime N = {N}; pass one explicitly"
        )
    try:
        return [dual.line_index(f"{j},{k}") for j in range(N) for k in range(N)]
    except ValueError as exc:
        raise AlignmentMissing("dual plane lines are not labelled by phase-space points") from exc


def solve_b_from_sic(sic: SicCandidate, dual: IncidenceStructure | None = None,
                     alignment=None) -> BAssignment:
    N = sic.N
    if dual is None:
        dual = dual_plane(FiniteField.of_order(N))
    _check_shape(N, dual)
    if alignment is None:
        alignment = default_alignment(sic, dual)
    alignment = list(alignment)
    if sorted(alignment) != list(range(dual.n_lines)):
        raise AlignmentMissing("alignment must map SIC elements one-to-one onto dual lines")
    basis = hermitian_basis(N)
    P = np.empty((dual.n_lines, N, N), dtype=complex)
    P[alignment] = sic.projectors()
    # real coordinates, rows = lines
    rhs = np.einsum("aij,lji->la", basis, P).real
    inc = dual.incidence.T.astype(float)                 # lines x points
    coords = np.linalg.pinv(inc, rcond=PINV_RCOND) @ rhs
    B = np.einsum("pa,aij->pij", coords, basis)
    sums = np.einsum("lp,pij->lij", inc, B)
    residual = float(np.abs(sums - P).max())
    return BAssignment(N, dual, B, residual)
