"""Counting model of SIC measurements on a dual affine plane.

Ontic states are the N(N+1) dual-plane points and epistemic states are the
N^2 dual lines.  Preparing epistemic state i and asking about state j gives
"yes" with probability ``|line_i & line_j| / (N+1)``, i.e. the fraction of
ontic states compatible with i that also lie in j.

The model only reproduces the N^2 states of one SIC.  No attempt is made to
extend it to all of quantum theory: a non-contextual model of that kind is
excluded by the Kochen-Specker theorem.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .dual_design import ShapeMismatch, default_alignment
from .errors import QDesignError
from .finite_field import FiniteField
from .geometry import IncidenceStructure, dual_plane
from .sic import SicCandidate


class IndexOutOfRange(QDesignError):
    pass


@dataclass(frozen=True)
class ToyModel:
    N: int
    dual_plane: IncidenceStructure

    @classmethod
    def of_order(cls, N: int) -> "ToyModel":
        return cls.from_structure(N, dual_plane(FiniteField.of_order(N)))

    @classmethod
    def from_structure(cls, N: int, s: IncidenceStructure, validate: bool = True) -> "ToyModel":
        if validate and (
            s.n_points != N * (N + 1)
            or s.n_lines != N * N
            or any(len(ln) != N + 1 for ln in s.lines)
        ):
            raise ShapeMismatch(f"not a dual affine plane of order {N}")
        return cls(N, s)

    @property
    def n_states(self) -> int:
        return self.dual_plane.n_lines

    def state(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.n_states:
            raise IndexOutOfRange(f"epistemic state {i} not in [0, {self.n_states})")
        return self.dual_plane.lines[i]


def yes_probability(model: ToyModel, i: int, j: int) -> Fraction:
    a, b = model.state(i), model.state(j)
    return Fraction(len(set(a) & set(b)), len(a))


def probability_table(model: ToyModel) -> list[list[Fraction]]:
    n = model.n_states
    return [[yes_probability(model, i, j) for j in range(n)] for i in range(n)]


def simulate(model: ToyModel, i: int, j: int, trials: int, seed: int = 0) -> float:
    """Empirical yes-frequency: ontic state drawn uniformly from line i."""
    if trials < 1:
        raise QDesignError("trials must be >= 1")
    a, b = model.state(i), set(model.state(j))
    rng = np.random.default_rng(seed)
    draws = np.asarray(a)[rng.integers(0, len(a), size=trials)]
    hits = np.isin(draws, list(b)).sum()
    return float(hits) / trials


def compare_to_quantum(model: ToyModel, sic: SicCandidate, alignment=None) -> float:
    """Max over i != j of |counting probability - Tr(P_i P_j)|.

    ``alignment[e]`` is the epistemic state (dual line) of SIC element e.
    """
    if sic.N != model.N:
        raise ShapeMismatch(f"SIC dimension {sic.N} != model order {model.N}")
    if alignment is None:
        alignment = default_alignment(sic, model.dual_plane)
    alignment = list(alignment)
    G = sic.overlaps()
    worst = 0.0
    n = len(alignment)
    for e in range(n):
        for f in range(n):
            if e != f:
                p = yes_probability(model, alignment[e], alignment[f])
                worst = max(worst, abs(float(p) - G[e, f]))
    return worst
