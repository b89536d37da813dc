"""Quantum nets: line projectors and phase-space point operators.

Striation ``s`` of the affine plane is assigned basis ``s`` of a complete MUB
set and the line with intercept ``j`` gets vector ``j``.  Point operators are
``A = sum of P over lines through the point - I``; the trace properties are
then checked numerically rather than assumed.

Matrix-valued deviations are measured in the spectral norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import QDesignError
from .geometry import AffinePlane
from .mub import MubSet

DEFAULT_TOL = 1e-10


class IncompleteMubSet(QDesignError):
    pass


class OrderMismatch(QDesignError):
    pass


class NotUnitTrace(QDesignError):
    pass


class NotHermitian(QDesignError):
    pass


@dataclass
class QuantumNet:
    N: int
    plane: AffinePlane
    line_projectors: np.ndarray  # (n_lines, N, N), canonical line order
    point_operators: np.ndarray  # (N^2, N, N)

    def to_json(self) -> dict:
        def enc(ops):
            return [[[[float(z.real), float(z.imag)] for z in row] for row in op] for op in ops]

        return {
            "N": self.N,
            "plane": self.plane.to_json(),
            "projectors": enc(self.line_projectors),
            "point_operators": enc(self.point_operators),
        }


def build_quantum_net(mubs: MubSet, plane: AffinePlane) -> QuantumNet:
    N = plane.order
    if mubs.N != N:
        raise OrderMismatch(f"MUB dimension {mubs.N} != plane order {N}")
    if len(mubs.bases) != N + 1:
        raise IncompleteMubSet(f"need {N + 1} bases, got {len(mubs.bases)}")
    P = np.zeros((plane.structure.n_lines, N, N), dtype=complex)
    for s, lines in enumerate(plane.striations):
        projs = mubs.bases[s].projectors()
        for j, line in enumerate(lines):
            P[line] = projs[j]
    M = plane.structure.incidence.astype(float)
    A = np.einsum("al,lij->aij", M, P) - np.eye(N)[None]
    return QuantumNet(N, plane, P, A)


def _spec(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


@dataclass
class NetReport:
    trace: float
    orthogonality: float
    line_sums: float
    parallel: float
    nonparallel: float
    tol: float
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return max(self.trace, self.orthogonality, self.line_sums, self.parallel,
                   self.nonparallel) <= self.tol


def verify_net(net: QuantumNet, tol: float = DEFAULT_TOL) -> NetReport:
    N = net.N
    A, P = net.point_operators, net.line_projectors
    s = net.plane.structure
    w = {}
    tr = np.einsum("aii->a", A).real / N
    trace_dev = np.abs(tr - 1.0 / N)
    gram = np.einsum("aij,bji->ab", A, A).real / N**2
    orth_dev = np.abs(gram - np.eye(len(A)) / N)
    sums = np.einsum("al,aij->lij", s.incidence.astype(float), A) / N
    line_dev = np.array([_spec(sums[j] - P[j]) for j in range(len(P))])
    w["line_sums"] = int(np.argmax(line_dev))
    overlaps = np.einsum("lij,mji->lm", P, P).real
    stri = np.empty(len(P), dtype=int)
    for k, lines in enumerate(net.plane.striations):
        stri[list(lines)] = k
    same = stri[:, None] == stri[None, :]
    off = ~np.eye(len(P), dtype=bool)
    par_dev = np.abs(overlaps[same & off]).max(initial=0.0)
    nonpar_dev = np.abs(overlaps[~same] - 1.0 / N).max(initial=0.0)
    return NetReport(
        trace=float(trace_dev.max()),
        orthogonality=float(orth_dev.max()),
        line_sums=float(line_dev.max()),
        parallel=float(par_dev),
        nonparallel=float(nonpar_dev),
        tol=tol,
        witnesses=w,
    )


@dataclass
class CorrespondenceReport:
    """Deviations of ``k * Tr(M) = |S_M|`` style identities with ``k = N``."""

    singleton: float
    intersection: float
    line_cardinality: float
    line_intersection: float
    identity: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.singleton, self.intersection, self.line_cardinality,
                   self.line_intersection, self.identity) <= self.tol


def trace_cardinality_check(net: QuantumNet, tol: float = DEFAULT_TOL) -> CorrespondenceReport:
    N = net.N
    k = N
    A, P = net.point_operators / N, net.line_projectors
    s = net.plane.structure
    single = np.abs(k * np.einsum("aii->a", A).real - 1).max()
    inter = np.abs(k * np.einsum("aij,bji->ab", A, A).real - np.eye(len(A))).max()
    card = np.abs(k * np.einsum("lii->l", P).real - N).max()
    M = s.incidence.astype(float)
    sizes = M.T @ M
    line_inter = np.abs(k * np.einsum("lij,mji->lm", P, P).real - sizes).max()
    total = A.sum(axis=0)
    ident = max(abs(k * np.trace(total).real - N * N), _spec(total - np.eye(N)))
    return CorrespondenceReport(float(single), float(inter), float(card), float(line_inter),
                                float(ident), tol)


@dataclass
class WignerFunction:
    values: np.ndarray   # one real value per phase-space point
    net: QuantumNet
    max_imag: float = 0.0

    def line_sum(self, line: int) -> float:
        return float(self.values[list(self.net.plane.lines[line])].sum())

    def striation_sums(self, s: int) -> list[float]:
        return [self.line_sum(j) for j in self.net.plane.striations[s]]


def wigner_function(rho, net: QuantumNet, tol: float = DEFAULT_TOL) -> WignerFunction:
    rho = np.asarray(rho, dtype=complex)
    N = net.N
    if rho.shape != (N, N):
        raise OrderMismatch(f"density matrix must be {N}x{N}, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise NotHermitian("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise NotUnitTrace(f"trace is {np.trace(rho).real:.3g}, expected 1")
    W = np.einsum("ij,aji->a", rho, net.point_operators) / N
    return WignerFunction(W.real.copy(), net, float(np.abs(W.imag).max()))
