"""Pure-Python/numpy implementations of the hot kernels.

Each function here has a compiled twin in ``_kernels.pyx`` with the same
signature and the same deterministic traversal order, so both backends
return identical solutions and node counts.
"""
from __future__ import annotations

import numpy as np

FOUND, NONE, BUDGET = 0, 1, 2


def exact_cover(n_columns: int, rows, budget: int):
    """Knuth's Algorithm X with dancing links.

    ``rows`` is a sequence of column-index sequences.  The column with the
    fewest remaining options is branched on, lowest index first among ties;
    options within a column are tried in row order.  ``budget`` caps the
    number of options selected.

    Returns ``(status, solution_rows, nodes)`` where ``status`` is one of
    ``FOUND``, ``NONE`` (search space exhausted) or ``BUDGET``.
    """
    n_nodes = n_columns + 1 + sum(len(r) for r in rows)
    L = list(range(n_nodes))
    R = list(range(n_nodes))
    U = list(range(n_nodes))
    D = list(range(n_nodes))
    C = [0] * n_nodes
    row_of = [-1] * n_nodes
    size = [0] * (n_columns + 1)
    root = n_columns
    # Header ring: columns 0..n_columns-1, root at index n_columns.
    for c in range(n_columns + 1):
        L[c] = c - 1 if c > 0 else root
        R[c] = c + 1 if c < n_columns else 0
        C[c] = c
    node = n_columns + 1
    for r, cols in enumerate(rows):
        first = -1
        for c in cols:
            C[node] = c
            row_of[node] = r
            U[node] = U[c]
            D[node] = c
            D[U[c]] = node
            U[c] = node
            size[c] += 1
            if first < 0:
                first = node
                L[node] = R[node] = node
            else:
                L[node] = L[first]
                R[node] = first
                R[L[first]] = node
                L[first] = node
            node += 1

    def cover(c):
        L[R[c]] = L[c]
        R[L[c]] = R[c]
        i = D[c]
        while i != c:
            j = R[i]
            while j != i:
                U[D[j]] = U[j]
                D[U[j]] = D[j]
                size[C[j]] -= 1
                j = R[j]
            i = D[i]

    def uncover(c):
        i = U[c]
        while i != c:
            j = L[i]
            while j != i:
                size[C[j]] += 1
                U[D[j]] = j
                D[U[j]] = j
                j = L[j]
            i = U[i]
        L[R[c]] = c
        R[L[c]] = c

    # Iterative search; stack holds the chosen node at each depth.
    nodes = 0
    stack: list[int] = []
    columns: list[int] = []

    def choose():
        best, best_size = -1, None
        c = R[root]
        while c != root:
            if best_size is None or size[c] < best_size:
                best, best_size = c, size[c]
            c = R[c]
        return best

    if R[root] == root:
        return FOUND, [], 0
    c = choose()
    cover(c)
    columns.append(c)
    stack.append(D[c])
    while stack:
        r = stack[-1]
        c = columns[-1]
        if r == c:
            # Column exhausted: backtrack.
            uncover(c)
            stack.pop()
            columns.pop()
            if not stack:
                break
            r = stack[-1]
            j = L[r]
            while j != r:
                uncover(C[j])
                j = L[j]
            stack[-1] = D[r]
            continue
        nodes += 1
        if nodes > budget:
            return BUDGET, [], nodes - 1
        j = R[r]
        while j != r:
            cover(C[j])
            j = R[j]
        if R[root] == root:
            return FOUND, sorted(row_of[n] for n in stack), nodes
        c = choose()
        if size[c] == 0:
            # Dead end: undo this row and advance to the next option.
            j = L[r]
            while j != r:
                uncover(C[j])
                j = L[j]
            stack[-1] = D[r]
            continue
        cover(c)
        columns.append(c)
        stack.append(D[c])
    return NONE, [], nodes


_phase_cache: dict[int, tuple] = {}


def _phases(n: int):
    if n not in _phase_cache:
        w = np.exp(2j * np.pi * np.arange(n) / n)
        j = np.arange(n)[:, None, None]
        k = np.arange(n)[None, :, None]
        x = np.arange(n)[None, None, :]
        shifted = w[(k * (x - j)) % n]      # omega^{k(x-j)}
        back = w[(-k * x) % n]              # omega^{-kx}
        fwd_idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n   # f[x-j]
        bwd_idx = (np.arange(n)[None, :] + np.arange(n)[:, None]) % n   # f[x+j]
        _phase_cache[n] = (shifted, back, fwd_idx, bwd_idx)
    return _phase_cache[n]


def wh_overlaps(f: np.ndarray):
    """Overlaps ``c[j, k] = <f| X^j Z^k |f>`` and the shifted vectors.

    Returns ``(c, Df, Dhf)`` with ``Df[j, k] = X^j Z^k f`` and
    ``Dhf[j, k] = (X^j Z^k)^dagger f``.
    """
    n = f.shape[0]
    shifted, back, fwd_idx, bwd_idx = _phases(n)
    Df = shifted * f[fwd_idx][:, None, :]
    Dhf = back * f[bwd_idx][:, None, :]
    c = Df @ f.conj()
    return c, Df, Dhf


def wh_potential_grad(f: np.ndarray):
    """Orbit frame potential and its ambient gradient for a unit vector f.

    The potential is ``(N^2/2) * sum_{(j,k) != 0} (|c_jk|^2 - 1/(N+1))^2``,
    which equals the pairwise sum over the whole Weyl-Heisenberg orbit by
    covariance.  The gradient is returned as the complex vector
    ``2 dF/d(conj f)``, i.e. the steepest-ascent direction in R^(2N).
    """
    f = np.ascontiguousarray(f, dtype=np.complex128)
    n = f.shape[0]
    c, Df, Dhf = wh_overlaps(f)
    r = np.abs(c) ** 2 - 1.0 / (n + 1)
    r[0, 0] = 0.0
    value = 0.5 * n * n * float(np.sum(r * r))
    weight_df = (r * c.conj())[:, :, None]
    weight_dh = (r * c)[:, :, None]
    grad = 2.0 * n * n * np.sum(weight_df * Df + weight_dh * Dhf, axis=(0, 1))
    return value, grad
