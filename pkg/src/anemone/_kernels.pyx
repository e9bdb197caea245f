# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernel lane.

C implementations of the batched random walk with restart and the induced
normalized adjacency builder. Semantics, RNG sequence, and floating-point
operation order are bit-identical to ``_kernels_py``; the parity suite
locks the two lanes together.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

LANE = "compiled"

ctypedef unsigned long long u64
ctypedef long long i64

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

cdef u64 GOLDEN = <u64>0x9E3779B97F4A7C15
cdef u64 MIX1 = <u64>0xBF58476D1CE4E5B9
cdef u64 MIX2 = <u64>0x94D049BB133111EB
# 2^-53, exact: scales a 53-bit integer into [0, 1).
cdef double U53 = 1.0 / 9007199254740992.0


cdef inline u64 _next(u64* state) noexcept nogil:
    cdef u64 z
    state[0] = state[0] + GOLDEN
    z = state[0]
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline double _uniform01(u64* state) noexcept nogil:
    return <double>(_next(state) >> 11) * U53


cdef inline u64 _randint(u64* state, u64 n) noexcept nogil:
    # Multiply-shift mapping of a 64-bit draw onto [0, n).
    return <u64>((<u128>_next(state) * <u128>n) >> 64)


cdef inline bint _has_edge(const i64* indptr, const i64* indices, i64 u, i64 v) noexcept nogil:
    cdef i64 lo = indptr[u]
    cdef i64 hi = indptr[u + 1]
    cdef i64 mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and indices[lo] == v


def rwr_batch(const i64[::1] indptr, const i64[::1] indices,
              const i64[::1] targets, int k, double restart_prob,
              long long budget, const u64[::1] seeds):
    """Batched random walk with restart; see the pure lane's docstring."""
    cdef Py_ssize_t b_total = targets.shape[0]
    nodes_arr = np.empty((b_total, k), dtype=np.int64)
    nreal_arr = np.empty(b_total, dtype=np.int64)
    cdef i64[:, ::1] nodes = nodes_arr
    cdef i64[::1] n_real = nreal_arr
    cdef Py_ssize_t b
    cdef i64 t, cur, lo, deg
    cdef int found, i, dup
    cdef long long steps
    cdef u64 state
    with nogil:
        for b in range(b_total):
            t = targets[b]
            for i in range(k):
                nodes[b, i] = t
            found = 1
            if k > 1 and indptr[t + 1] > indptr[t]:
                state = seeds[b]
                cur = t
                steps = 0
                while found < k and steps < budget:
                    steps = steps + 1
                    if _uniform01(&state) < restart_prob:
                        cur = t
                    else:
                        lo = indptr[cur]
                        deg = indptr[cur + 1] - lo
                        if deg == 0:
                            break
                        cur = indices[lo + <i64>_randint(&state, <u64>deg)]
                        dup = 0
                        for i in range(found):
                            if nodes[b, i] == cur:
                                dup = 1
                                break
                        if dup == 0:
                            nodes[b, found] = cur
                            found = found + 1
            n_real[b] = found
    return nodes_arr, nreal_arr


def induced_norm_adj(const i64[::1] indptr, const i64[::1] indices,
                     const i64[:, ::1] nodes, const i64[::1] n_real):
    """Batched D^{-1/2} (A + I) D^{-1/2}; see the pure lane's docstring."""
    cdef Py_ssize_t b_total = nodes.shape[0]
    cdef int k = <int>nodes.shape[1]
    out_arr = np.zeros((b_total, k, k), dtype=np.float64)
    dinv_arr = np.empty(k, dtype=np.float64)
    cdef double[:, :, ::1] out = out_arr
    cdef double[::1] dinv = dinv_arr
    cdef const i64* ip = &indptr[0]
    cdef const i64* ix = NULL
    if indices.shape[0] > 0:
        ix = &indices[0]
    cdef Py_ssize_t b
    cdef int i, j, m
    cdef double s
    with nogil:
        for b in range(b_total):
            m = <int>n_real[b]
            for i in range(m):
                for j in range(i + 1, m):
                    if _has_edge(ip, ix, nodes[b, i], nodes[b, j]):
                        out[b, i, j] = 1.0
                        out[b, j, i] = 1.0
            for i in range(k):
                out[b, i, i] = out[b, i, i] + 1.0
            for i in range(k):
                s = 0.0
                for j in range(k):
                    s = s + out[b, i, j]
                dinv[i] = 1.0 / sqrt(s)
            for i in range(k):
                for j in range(k):
                    out[b, i, j] = out[b, i, j] * dinv[i] * dinv[j]
    return out_arr
