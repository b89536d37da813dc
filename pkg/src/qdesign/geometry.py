"""Incidence structures: affine planes over GF(q), striations, Latin squares,
duality, and the combinatorial checks that go with them.

Phase-space conventions for :func:`build_affine_plane` over GF(q):

* point ``(a, b)`` has index ``a*q + b`` (field elements in integer encoding);
* striation 0 holds the vertical lines ``{(c, b) : b}``, ordered by ``c``;
* striation ``1 + m`` holds the lines ``{(a, m*a + c) : a}`` of slope ``m``,
  ordered by intercept ``c``.

Lines are stored in sorted lexicographic order, so striations refer to them
by index.  Labels travel with points and lines through canonical sorting
and through :func:`dualize`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import kernels
from .errors import QDesignError
from .finite_field import FiniteField


class PointSetMismatch(QDesignError):
    pass


class InvalidLatinSquare(QDesignError):
    pass


class IncidenceStructure:
    """Points ``0..n_points-1`` and lines as sorted point tuples.

    Repeated lines are allowed; duals of small structures can need them.
    """

    def __init__(self, n_points: int, lines, point_labels=None, line_labels=None):
        lines = [tuple(sorted(int(x) for x in ln)) for ln in lines]
        for ln in lines:
            if any(not 0 <= x < n_points for x in ln):
                raise QDesignError(f"line {ln} has points outside [0, {n_points})")
            if len(set(ln)) != len(ln):
                raise QDesignError(f"line {ln} repeats a point")
        if point_labels is None:
            point_labels = [f"p{i}" for i in range(n_points)]
        if line_labels is None:
            line_labels = [f"l{i}" for i in range(len(lines))]
        if len(point_labels) != n_points or len(line_labels) != len(lines):
            raise QDesignError("label count does not match points/lines")
        order = sorted(range(len(lines)), key=lambda i: lines[i])
        self.n_points = n_points
        self.lines: tuple[tuple[int, ...], ...] = tuple(lines[i] for i in order)
        self.point_labels: tuple[str, ...] = tuple(str(x) for x in point_labels)
        self.line_labels: tuple[str, ...] = tuple(str(line_labels[i]) for i in order)
        self._sort_order = tuple(order)
        self._incidence = None

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @property
    def incidence(self) -> np.ndarray:
        """Boolean matrix, rows = points, columns = lines."""
        if self._incidence is None:
            m = np.zeros((self.n_points, self.n_lines), dtype=bool)
            for j, ln in enumerate(self.lines):
                m[list(ln), j] = True
            m.setflags(write=False)
            self._incidence = m
        return self._incidence

    def lines_through(self, point: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.incidence[point])]

    def line_index(self, label: str) -> int:
        return self.line_labels.index(label)

    def point_index(self, label: str) -> int:
        return self.point_labels.index(label)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IncidenceStructure)
            and self.n_points == other.n_points
            and self.lines == other.lines
        )

    def __repr__(self) -> str:
        return f"IncidenceStructure(n_points={self.n_points}, n_lines={self.n_lines})"

    def to_json(self) -> dict:
        return {
            "n_points": self.n_points,
            "lines": [list(ln) for ln in self.lines],
            "point_labels": list(self.point_labels),
            "line_labels": list(self.line_labels),
        }

    @classmethod
    def from_json(cls, data: dict) -> "IncidenceStructure":
        return cls(
            data["n_points"], data["lines"], data.get("point_labels"), data.get("line_labels")
        )


@dataclass(frozen=True)
class Striation:
    n_points: int
    lines: tuple[tuple[int, ...], ...]

    def is_partition(self) -> bool:
        seen = sorted(x for ln in self.lines for x in ln)
        return seen == list(range(self.n_points))


@dataclass(frozen=True)
class AffinePlane:
    order: int
    field: FiniteField
    structure: IncidenceStructure
    striations: tuple[tuple[int, ...], ...]

    @property
    def n_points(self) -> int:
        return self.structure.n_points

    @property
    def lines(self):
        return self.structure.lines

    def point(self, a: int, b: int) -> int:
        return a * self.order + b

    def striation(self, s: int) -> Striation:
        return Striation(self.n_points, tuple(self.lines[j] for j in self.striations[s]))

    def to_json(self) -> dict:
        data = self.structure.to_json()
        data["order"] = self.order
        data["striations"] = [list(s) for s in self.striations]
        return data


def build_affine_plane(field: FiniteField) -> AffinePlane:
    q = field.q
    elems = np.arange(q)
    raw_lines, labels, groups = [], [], []
    verticals = []
    for c in range(q):
        verticals.append(len(raw_lines))
        raw_lines.append(tuple(c * q + b for b in range(q)))
        labels.append(f"x={c}")
    groups.append(verticals)
    for m in range(q):
        slope = []
        mx = field.mul(m, elems)
        for c in range(q):
            ys = field.add(mx, c)
            slope.append(len(raw_lines))
            raw_lines.append(tuple(int(a) * q + int(y) for a, y in zip(elems, ys)))
            labels.append(f"y={m}x+{c}")
        groups.append(slope)
    point_labels = [f"{a},{b}" for a in range(q) for b in range(q)]
    structure = IncidenceStructure(q * q, raw_lines, point_labels, labels)
    new_index = {old: new for new, old in enumerate(structure._sort_order)}
    striations = tuple(tuple(new_index[i] for i in g) for g in groups)
    assert len(striations) <= q + 1
    return AffinePlane(q, field, structure, striations)


# -- verification ---------------------------------------------------------

@dataclass
class AxiomReport:
    joining_line: bool
    unique_parallel: bool
    noncollinear_triple: bool
    n_points: int
    n_lines: int
    order: int | None
    parallel_classes: int
    striation_decomposable: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.joining_line and self.unique_parallel and self.noncollinear_triple


def _parallel_classes(s: IncidenceStructure):
    """Group lines by 'equal or disjoint'; None if that is not an equivalence."""
    inter = s.incidence.T.astype(np.int64) @ s.incidence.astype(np.int64)
    parallel = inter == 0
    np.fill_diagonal(parallel, True)
    classes, assigned = [], np.full(s.n_lines, -1)
    for j in range(s.n_lines):
        if assigned[j] >= 0:
            continue
        members = np.flatnonzero(parallel[j])
        if np.any(assigned[members] >= 0):
            return None
        assigned[members] = len(classes)
        classes.append([int(x) for x in members])
    for cls in classes:
        sub = parallel[np.ix_(cls, cls)]
        if not sub.all():
            return None
    return classes


def check_affine_axioms(s: IncidenceStructure) -> AxiomReport:
    M = s.incidence.astype(np.int64)
    witnesses = {}
    # 1. every pair of distinct points lies on exactly one line
    pair_counts = M @ M.T
    off = ~np.eye(s.n_points, dtype=bool)
    bad = np.argwhere((pair_counts != 1) & off)
    joining = bad.size == 0
    if not joining:
        a, b = (int(x) for x in bad[0])
        witnesses["joining_line"] = {"points": [a, b], "lines": int(pair_counts[a, b])}
    # 2. through a point off a line there is exactly one line disjoint from it
    disjoint = (M.T @ M) == 0
    through = M @ disjoint.astype(np.int64)        # [point, line] -> # parallels via point
    bad = np.argwhere((M == 0) & (through != 1))
    unique_parallel = bad.size == 0
    if not unique_parallel:
        a, ln = (int(x) for x in bad[0])
        witnesses["unique_parallel"] = {"point": a, "line": ln, "parallels": int(through[a, ln])}
    # 3. some triple of points is on no common line
    noncollinear = False
    if s.n_points >= 3:
        for a, b in combinations(range(s.n_points), 2):
            common = M[a] * M[b]
            others = np.ones(s.n_points, dtype=bool)
            others[[a, b]] = False
            covered = (M @ common) > 0
            free = np.flatnonzero(others & ~covered)
            if free.size:
                noncollinear = True
                witnesses["noncollinear_triple"] = [a, b, int(free[0])]
                break
    root = int(round(np.sqrt(s.n_points)))
    order = root if root * root == s.n_points and s.n_lines == root * (root + 1) else None
    classes = _parallel_classes(s)
    decomposable = classes is not None and all(
        Striation(s.n_points, tuple(s.lines[j] for j in cls)).is_partition() for cls in classes
    )
    return AxiomReport(
        joining_line=joining,
        unique_parallel=unique_parallel,
        noncollinear_triple=noncollinear,
        n_points=s.n_points,
        n_lines=s.n_lines,
        order=order,
        parallel_classes=len(classes) if classes is not None else 0,
        striation_decomposable=decomposable,
        witnesses=witnesses,
    )


def check_striations_unbiased(s1: Striation, s2: Striation) -> bool:
    if s1.n_points != s2.n_points or sorted(x for ln in s1.lines for x in ln) != sorted(
        x for ln in s2.lines for x in ln
    ):
        raise PointSetMismatch("striations cover different point sets")
    return all(len(set(a) & set(b)) == 1 for a in s1.lines for b in s2.lines)


# -- Latin squares ----------------------------------------------------------

@dataclass(frozen=True)
class LatinSquare:
    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.cells)
        full = list(range(n))
        arr = np.asarray(self.cells)
        if arr.shape != (n, n):
            raise InvalidLatinSquare("square must be n x n")
        if any(sorted(row) != full for row in arr.tolist()) or any(
            sorted(col) != full for col in arr.T.tolist()
        ):
            raise InvalidLatinSquare("each symbol must appear once per row and column")

    @classmethod
    def from_array(cls, arr) -> "LatinSquare":
        return cls(tuple(tuple(int(x) for x in row) for row in np.asarray(arr)))

    @property
    def order(self) -> int:
        return len(self.cells)

    def array(self) -> np.ndarray:
        return np.array(self.cells, dtype=int)


def cyclic_square(n: int) -> LatinSquare:
    """Addition table of Z_n."""
    return LatinSquare.from_array((np.arange(n)[:, None] + np.arange(n)[None, :]) % n)


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    """True iff superposing the squares shows every ordered symbol pair once."""
    if a.order != b.order:
        return False
    pairs = {(x, y) for ra, rb in zip(a.cells, b.cells) for x, y in zip(ra, rb)}
    return len(pairs) == a.order**2


def mols_from_plane(plane: AffinePlane) -> list[LatinSquare]:
    """One Latin square per striation other than rows and columns.

    Rows are the slope-0 lines, columns the vertical lines, so cell
    ``(r, c)`` is the point ``(a, b) = (c, r)``; its symbol is the position,
    within the striation, of the line through that point.
    """
    q = plane.order
    assert len(plane.striations) >= 3
    squares = []
    for s in plane.striations[2:]:
        line_pos = np.empty(plane.n_points, dtype=int)
        for pos, j in enumerate(s):
            line_pos[list(plane.lines[j])] = pos
        cells = [[int(line_pos[plane.point(c, r)]) for c in range(q)] for r in range(q)]
        squares.append(LatinSquare.from_array(cells))
    return squares


class MateStatus:
    FOUND = "found"
    NONE = "none"                    # search space exhausted, no mate exists
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class MateResult:
    status: str
    mate: LatinSquare | None
    nodes: int


def search_orthogonal_mate(sq: LatinSquare, budget: int = 10**9) -> MateResult:
    """Exact-cover search for a Latin square orthogonal to ``sq``.

    Options are triples (row, column, mate symbol) covering four families of
    constraints: each cell filled once, each symbol once per row, once per
    column, and each (sq symbol, mate symbol) pair once.  The mate's first
    row is fixed to ``0..n-1``, which loses no generality because relabeling
    the mate's symbols preserves orthogonality.
    """
    if not isinstance(sq, LatinSquare):
        sq = LatinSquare.from_array(sq)
    n = sq.order
    cells = sq.cells
    rows, triples = [], []
    for r in range(n):
        for c in range(n):
            for s in range(n):
                if r == 0 and s != c:
                    continue
                rows.append((
                    r * n + c,
                    n * n + r * n + s,
                    2 * n * n + c * n + s,
                    3 * n * n + cells[r][c] * n + s,
                ))
                triples.append((r, c, s))
    status, chosen, nodes = kernels.exact_cover(4 * n * n, rows, budget)
    if status == kernels.FOUND:
        grid = [[0] * n for _ in range(n)]
        for i in chosen:
            r, c, s = triples[i]
            grid[r][c] = s
        mate = LatinSquare.from_array(grid)
        assert are_orthogonal(sq, mate)
        return MateResult(MateStatus.FOUND, mate, nodes)
    if status == kernels.NONE:
        return MateResult(MateStatus.NONE, None, nodes)
    return MateResult(MateStatus.BUDGET_EXHAUSTED, None, nodes)


# -- duality ----------------------------------------------------------------

def dualize(s: IncidenceStructure) -> IncidenceStructure:
    """Swap points and lines: input line j becomes point j, and input point
    alpha becomes the line of input lines through alpha.  Labels follow."""
    new_lines = [s.lines_through(a) for a in range(s.n_points)]
    return IncidenceStructure(s.n_lines, new_lines, s.line_labels, s.point_labels)


def dual_plane(field: FiniteField) -> IncidenceStructure:
    return dualize(build_affine_plane(field).structure)


@dataclass
class CountReport:
    n_points: bool
    n_lines: bool
    line_size: bool
    point_degree: bool
    lines_meet_once: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all((self.n_points, self.n_lines, self.line_size, self.point_degree,
                    self.lines_meet_once))


def check_dual_counts(s: IncidenceStructure, N: int) -> CountReport:
    w = {}
    ok_points = s.n_points == N * (N + 1)
    if not ok_points:
        w["n_points"] = {"expected": N * (N + 1), "found": s.n_points}
    ok_lines = s.n_lines == N * N
    if not ok_lines:
        w["n_lines"] = {"expected": N * N, "found": s.n_lines}
    bad = [j for j, ln in enumerate(s.lines) if len(ln) != N + 1]
    if bad:
        w["line_size"] = {"line": bad[0], "size": len(s.lines[bad[0]])}
    M = s.incidence.astype(np.int64)
    degree = M.sum(axis=1)
    bad_pts = np.flatnonzero(degree != N)
    if bad_pts.size:
        w["point_degree"] = {"point": int(bad_pts[0]), "degree": int(degree[bad_pts[0]])}
    inter = M.T @ M
    off = ~np.eye(s.n_lines, dtype=bool)
    bad_pairs = np.argwhere((inter != 1) & off)
    if bad_pairs.size:
        a, b = (int(x) for x in bad_pairs[0])
        w["lines_meet_once"] = {"lines": [a, b], "common": int(inter[a, b])}
    return CountReport(ok_points, ok_lines, not bad, bad_pts.size == 0, bad_pairs.size == 0, w)


def share_line_matrix(s: IncidenceStructure) -> np.ndarray:
    """``[a, b]`` is True when distinct points a, b lie on a common line."""
    M = s.incidence.astype(np.int64)
    shared = (M @ M.T) > 0
    np.fill_diagonal(shared, False)
    return shared
