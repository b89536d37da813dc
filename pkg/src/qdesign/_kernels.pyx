# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_purekernels`` for the reference semantics."""
from libc.math cimport cos, sin, M_PI
from libc.stdlib cimport malloc, free

import numpy as np

cdef enum:
    C_FOUND = 0
    C_NONE = 1
    C_BUDGET = 2

FOUND, NONE, BUDGET = C_FOUND, C_NONE, C_BUDGET


cdef struct Links:
    int *L
    int *R
    int *U
    int *D
    int *C
    int *size
    int root


cdef inline void _cover(Links *lk, int c) noexcept nogil:
    cdef int i, j
    lk.L[lk.R[c]] = lk.L[c]
    lk.R[lk.L[c]] = lk.R[c]
    i = lk.D[c]
    while i != c:
        j = lk.R[i]
        while j != i:
            lk.U[lk.D[j]] = lk.U[j]
            lk.D[lk.U[j]] = lk.D[j]
            lk.size[lk.C[j]] -= 1
            j = lk.R[j]
        i = lk.D[i]


cdef inline void _uncover(Links *lk, int c) noexcept nogil:
    cdef int i, j
    i = lk.U[c]
    while i != c:
        j = lk.L[i]
        while j != i:
            lk.size[lk.C[j]] += 1
            lk.U[lk.D[j]] = j
            lk.D[lk.U[j]] = j
            j = lk.L[j]
        i = lk.U[i]
    lk.L[lk.R[c]] = c
    lk.R[lk.L[c]] = c


cdef inline int _choose(Links *lk) noexcept nogil:
    cdef int c = lk.R[lk.root]
    cdef int best = -1
    cdef int best_size = -1
    while c != lk.root:
        if best_size < 0 or lk.size[c] < best_size:
            best = c
            best_size = lk.size[c]
        c = lk.R[c]
    return best


cdef inline void _unselect(Links *lk, int r) noexcept nogil:
    cdef int j = lk.L[r]
    while j != r:
        _uncover(lk, lk.C[j])
        j = lk.L[j]


cdef long long _search(Links *lk, int *stack, int *columns, long long budget,
                       int *status, int *depth_out) noexcept nogil:
    cdef long long nodes = 0
    cdef int depth = 0
    cdef int r, c, j
    c = _choose(lk)
    _cover(lk, c)
    columns[0] = c
    stack[0] = lk.D[c]
    depth = 1
    while depth > 0:
        r = stack[depth - 1]
        c = columns[depth - 1]
        if r == c:
            _uncover(lk, c)
            depth -= 1
            if depth == 0:
                break
            r = stack[depth - 1]
            _unselect(lk, r)
            stack[depth - 1] = lk.D[r]
            continue
        nodes += 1
        if nodes > budget:
            status[0] = C_BUDGET
            return nodes - 1
        j = lk.R[r]
        while j != r:
            _cover(lk, lk.C[j])
            j = lk.R[j]
        if lk.R[lk.root] == lk.root:
            status[0] = C_FOUND
            depth_out[0] = depth
            return nodes
        c = _choose(lk)
        if lk.size[c] == 0:
            _unselect(lk, r)
            stack[depth - 1] = lk.D[r]
            continue
        _cover(lk, c)
        columns[depth] = c
        stack[depth] = lk.D[c]
        depth += 1
    status[0] = C_NONE
    return nodes


def exact_cover(int n_columns, rows, long long budget):
    cdef int n_nodes = n_columns + 1
    for cols in rows:
        n_nodes += len(cols)
    cdef Links lk
    cdef int *row_of = <int *> malloc(n_nodes * sizeof(int))
    cdef int *stack = <int *> malloc((n_columns + 1) * sizeof(int))
    cdef int *columns = <int *> malloc((n_columns + 1) * sizeof(int))
    lk.L = <int *> malloc(n_nodes * sizeof(int))
    lk.R = <int *> malloc(n_nodes * sizeof(int))
    lk.U = <int *> malloc(n_nodes * sizeof(int))
    lk.D = <int *> malloc(n_nodes * sizeof(int))
    lk.C = <int *> malloc(n_nodes * sizeof(int))
    lk.size = <int *> malloc((n_columns + 1) * sizeof(int))
    lk.root = n_columns
    cdef int i, c, node, first, status = C_NONE, depth = 0
    cdef long long nodes = 0
    try:
        for i in range(n_nodes):
            lk.L[i] = lk.R[i] = lk.U[i] = lk.D[i] = i
            lk.C[i] = 0
            row_of[i] = -1
        for c in range(n_columns + 1):
            lk.L[c] = c - 1 if c > 0 else lk.root
            lk.R[c] = c + 1 if c < n_columns else 0
            lk.C[c] = c
            lk.size[c] = 0
        node = n_columns + 1
        for i, cols in enumerate(rows):
            first = -1
            for c in cols:
                if c < 0 or c >= n_columns:
                    raise ValueError(f"column index {c} out of range")
                lk.C[node] = c
                row_of[node] = i
                lk.U[node] = lk.U[c]
                lk.D[node] = c
                lk.D[lk.U[c]] = node
                lk.U[c] = node
                lk.size[c] += 1
                if first < 0:
                    first = node
                    lk.L[node] = node
                    lk.R[node] = node
                else:
                    lk.L[node] = lk.L[first]
                    lk.R[node] = first
                    lk.R[lk.L[first]] = node
                    lk.L[first] = node
                node += 1
        if lk.R[lk.root] == lk.root:
            return FOUND, [], 0
        with nogil:
            nodes = _search(&lk, stack, columns, budget, &status, &depth)
        if status == C_FOUND:
            return FOUND, sorted(row_of[stack[i]] for i in range(depth)), nodes
        return status, [], nodes
    finally:
        free(lk.L); free(lk.R); free(lk.U); free(lk.D); free(lk.C)
        free(lk.size); free(row_of); free(stack); free(columns)


def wh_potential_grad(f):
    """Orbit frame potential and ambient gradient; loop twin of the numpy version."""
    fa = np.ascontiguousarray(f, dtype=np.complex128)
    cdef int n = fa.shape[0]
    cdef double complex[::1] fv = fa
    cdef int j, k, x, p1, p2
    cdef double cr, ci, r, ar, ai, total = 0.0
    cdef double s = 1.0 / (n + 1)
    # one scratch block: f, phases, per-j shifted copies, displaced vectors, gradient
    cdef double *buf = <double *> malloc(16 * n * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double *fr = buf
    cdef double *fi = buf + n
    cdef double *wr = buf + 2 * n
    cdef double *wi = buf + 3 * n
    cdef double *sr = buf + 4 * n
    cdef double *si = buf + 5 * n
    cdef double *br = buf + 6 * n
    cdef double *bi = buf + 7 * n
    cdef double *dr = buf + 8 * n
    cdef double *di = buf + 9 * n
    cdef double *hr = buf + 10 * n
    cdef double *hi = buf + 11 * n
    cdef double *gr = buf + 12 * n
    cdef double *gi = buf + 13 * n
    for x in range(n):
        fr[x] = fv[x].real
        fi[x] = fv[x].imag
        wr[x] = cos(2.0 * M_PI * x / n)
        wi[x] = sin(2.0 * M_PI * x / n)
        gr[x] = 0.0
        gi[x] = 0.0
    with nogil:
        for j in range(n):
            for x in range(n):
                sr[x] = fr[(x - j + n) % n]
                si[x] = fi[(x - j + n) % n]
                br[x] = fr[(x + j) % n]
                bi[x] = fi[(x + j) % n]
            for k in range(n):
                if j == 0 and k == 0:
                    continue
                cr = 0.0
                ci = 0.0
                p1 = (n - (k * j) % n) % n       # omega^{k(x-j)} at x = 0
                p2 = 0                           # omega^{-kx}
                for x in range(n):
                    dr[x] = wr[p1] * sr[x] - wi[p1] * si[x]
                    di[x] = wr[p1] * si[x] + wi[p1] * sr[x]
                    hr[x] = wr[p2] * br[x] - wi[p2] * bi[x]
                    hi[x] = wr[p2] * bi[x] + wi[p2] * br[x]
                    # conj(f[x]) * D f[x]
                    cr = cr + fr[x] * dr[x] + fi[x] * di[x]
                    ci = ci + fr[x] * di[x] - fi[x] * dr[x]
                    p1 = p1 + k
                    if p1 >= n:
                        p1 = p1 - n
                    p2 = p2 - k
                    if p2 < 0:
                        p2 = p2 + n
                r = cr * cr + ci * ci - s
                total = total + r * r
                ar = r * cr
                ai = r * ci
                # g += r conj(c) Df + r c Dh f
                for x in range(n):
                    gr[x] = gr[x] + ar * dr[x] + ai * di[x] + ar * hr[x] - ai * hi[x]
                    gi[x] = gi[x] + ar * di[x] - ai * dr[x] + ar * hi[x] + ai * hr[x]
    grad = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] gv = grad
    for x in range(n):
        gv[x] = (2.0 * n * n) * (gr[x] + 1j * gi[x])
    free(buf)
    return 0.5 * n * n * total, grad
