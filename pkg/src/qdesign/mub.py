"""Complete sets of mutually unbiased bases in prime-power dimension.

For an odd prime power q the bases are the computational basis plus, for
each r in GF(q), the basis whose m-th vector has x-component
``exp(2 pi i tr(r x^2 + m x) / p) / sqrt(q)``.  For q = 2 the three Pauli
eigenbases are returned.  Even characteristic with q > 2 has no
quadratic-character construction of this form and is rejected.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import QDesignError
from .finite_field import FiniteField

DEFAULT_TOL = 1e-10


class UnsupportedCharacteristic(QDesignError):
    pass


class DimensionMismatch(QDesignError):
    pass


class Check(NamedTuple):
    deviation: float
    passed: bool


@dataclass(frozen=True)
class Basis:
    """Orthonormal basis; ``vectors[i]`` is the i-th basis vector."""

    vectors: np.ndarray

    @property
    def N(self) -> int:
        return self.vectors.shape[1]

    def projectors(self) -> np.ndarray:
        v = self.vectors
        return v[:, :, None] * v[:, None, :].conj()


@dataclass(frozen=True)
class MubSet:
    N: int
    bases: list[Basis] = field(default_factory=list)
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.bases)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "provenance": self.provenance,
            "bases": [
                [[[float(z.real), float(z.imag)] for z in v] for v in b.vectors]
                for b in self.bases
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MubSet":
        bases = [
            Basis(np.array([[complex(re, im) for re, im in v] for v in b]))
            for b in data["bases"]
        ]
        return cls(int(data["N"]), bases, data.get("provenance", "imported"))


def _canonical_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each vector so its first nonzero component is real positive."""
    out = vectors.copy()
    for i, v in enumerate(out):
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if nz.size:
            z = v[nz[0]]
            out[i] = v * (abs(z) / z)
            out[i, nz[0]] = abs(z)
    return out


def pauli_bases() -> list[Basis]:
    s = 1 / np.sqrt(2)
    z = np.eye(2, dtype=complex)
    x = np.array([[s, s], [s, -s]], dtype=complex)
    y = np.array([[s, 1j * s], [s, -1j * s]], dtype=complex)
    return [Basis(z), Basis(x), Basis(y)]


def build_mubs(field: FiniteField) -> MubSet:
    q, p = field.q, field.p
    if q == 2:
        return MubSet(2, pauli_bases(), "pauli")
    if p == 2:
        raise UnsupportedCharacteristic(
            f"q = {q}: complete MUB sets exist for every prime power, but the "
            "even-characteristic (Galois ring) construction is not implemented"
        )
    x = np.arange(q)
    x2 = field.mul(x, x)
    bases = [Basis(np.eye(q, dtype=complex))]
    for r in range(q):
        rx2 = field.mul(r, x2)
        vecs = np.empty((q, q), dtype=complex)
        for m in range(q):
            t = field.trace(field.add(rx2, field.mul(m, x)))
            vecs[m] = np.exp(2j * np.pi * np.asarray(t) / p) / np.sqrt(q)
        bases.append(Basis(_canonical_phase(vecs)))
    out = MubSet(q, bases, "quadratic-character")
    assert count_bound_check(out)
    return out


def check_unbiased(b1: Basis, b2: Basis, tol: float = DEFAULT_TOL) -> Check:
    """Largest | |<v_i|w_j>|^2 - 1/N | over the two bases."""
    if b1.vectors.shape != b2.vectors.shape:
        raise DimensionMismatch(f"{b1.vectors.shape} vs {b2.vectors.shape}")
    overlaps = np.abs(b1.vectors.conj() @ b2.vectors.T) ** 2
    dev = float(np.max(np.abs(overlaps - 1.0 / b1.N)))
    return Check(dev, dev <= tol)


def check_basis(b: Basis, tol: float = DEFAULT_TOL) -> Check:
    gram = b.vectors.conj() @ b.vectors.T
    dev = float(np.max(np.abs(gram - np.eye(len(b.vectors)))))
    return Check(dev, dev <= tol)


def count_bound_check(m: MubSet) -> bool:
    return len(m.bases) <= m.N + 1


@dataclass
class MubReport:
    N: int
    n_bases: int
    orthonormality: float
    unbiasedness: float
    within_bound: bool
    passed: bool


def verify_mubs(m: MubSet, tol: float = DEFAULT_TOL) -> MubReport:
    ortho = max((check_basis(b).deviation for b in m.bases), default=0.0)
    unb = 0.0
    for i in range(len(m.bases)):
        for j in range(i + 1, len(m.bases)):
            unb = max(unb, check_unbiased(m.bases[i], m.bases[j]).deviation)
    bound = count_bound_check(m)
    return MubReport(m.N, len(m.bases), ortho, unb, bound, ortho <= tol and unb <= tol and bound)
