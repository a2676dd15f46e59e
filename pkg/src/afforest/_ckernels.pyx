# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics.

Loops run without the GIL so batches can be processed by several threads.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint64_t

cnp.import_array()


def enumerate_parents(int64_t start, int64_t stop, const int32_t[::1] nodes,
                      const int64_t[::1] radix, const int64_t[::1] pred_offsets,
                      const int32_t[::1] pred_flat, Py_ssize_t n):
    cdef Py_ssize_t batch = stop - start
    parents_arr = np.full((batch, n), -1, dtype=np.int32)
    cdef int32_t[:, ::1] parents = parents_arr
    cdef Py_ssize_t nd = nodes.shape[0]
    cdef int64_t[::1] digit = np.zeros(max(nd, 1), dtype=np.int64)
    cdef Py_ssize_t b, d, node
    cdef int64_t idx = start
    with nogil:
        for d in range(nd - 1, -1, -1):
            digit[d] = idx % radix[d]
            idx = idx // radix[d]
        for b in range(batch):
            for d in range(nd):
                node = nodes[d]
                parents[b, node] = pred_flat[pred_offsets[node] + digit[d]]
            # mixed-radix increment, last digit fastest
            d = nd - 1
            while d >= 0:
                digit[d] += 1
                if digit[d] < radix[d]:
                    break
                digit[d] = 0
                d -= 1
    return parents_arr


def sample_parents(const uint64_t[:, ::1] draws, const int32_t[::1] nodes,
                   const int64_t[::1] radix, const int64_t[::1] pred_offsets,
                   const int32_t[::1] pred_flat, Py_ssize_t n):
    cdef Py_ssize_t batch = draws.shape[0]
    parents_arr = np.full((batch, n), -1, dtype=np.int32)
    cdef int32_t[:, ::1] parents = parents_arr
    cdef Py_ssize_t b, d, node
    with nogil:
        for b in range(batch):
            for d in range(nodes.shape[0]):
                node = nodes[d]
                parents[b, node] = pred_flat[pred_offsets[node] + <int64_t>(draws[b, node] % <uint64_t>radix[d])]
    return parents_arr


def marginals_table(const int32_t[:, ::1] parents, const int64_t[::1] order,
                    const double[::1] table):
    cdef Py_ssize_t batch = parents.shape[0], n = parents.shape[1]
    out_arr = np.empty((batch, n))
    prod_arr = np.zeros(batch)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] prod = prod_arr
    cdef int64_t[::1] mask = np.zeros(n, dtype=np.int64)
    cdef double[::1] below = np.zeros(n)
    cdef Py_ssize_t b, t, i
    cdef int32_t p
    cdef double val
    with nogil:
        for b in range(batch):
            for i in range(n):
                mask[i] = (<int64_t>1) << i
                below[i] = 0.0
            for t in range(n):
                i = order[t]
                val = table[mask[i]]
                out[b, i] = val - below[i]
                p = parents[b, i]
                if p >= 0:
                    mask[p] |= mask[i]
                    below[p] += val
                else:
                    prod[b] += val
    return out_arr, prod_arr


def marginals_separable(const int32_t[:, ::1] parents, const int64_t[::1] order,
                        const double[::1] weights, const double[::1] by_size):
    cdef Py_ssize_t batch = parents.shape[0], n = parents.shape[1]
    out_arr = np.empty((batch, n))
    prod_arr = np.zeros(batch)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] prod = prod_arr
    cdef int64_t[::1] size = np.zeros(n, dtype=np.int64)
    cdef double[::1] wsum = np.zeros(n)
    cdef double[::1] below = np.zeros(n)
    cdef Py_ssize_t b, t, i
    cdef int32_t p
    cdef double val
    with nogil:
        for b in range(batch):
            for i in range(n):
                size[i] = 1
                wsum[i] = weights[i]
                below[i] = 0.0
            for t in range(n):
                i = order[t]
                val = wsum[i] + by_size[size[i]]
                out[b, i] = val - below[i]
                p = parents[b, i]
                if p >= 0:
                    size[p] += size[i]
                    wsum[p] += wsum[i]
                    below[p] += val
                else:
                    prod[b] += val
    return out_arr, prod_arr


def superadditive_violation(const double[::1] table, int n, double tol):
    cdef int64_t u, low, rest, sub, q
    cdef int64_t top = (<int64_t>1) << n
    cdef int64_t found_q = -1, found_s = -1
    with nogil:
        u = 3
        while u < top and found_q < 0:
            low = u & -u
            if u != low:
                rest = u ^ low
                # ascending submasks of rest, excluding rest itself
                sub = 0
                while sub != rest:
                    q = low | sub
                    if table[u] < table[q] + table[u ^ q] - tol:
                        found_q = q
                        found_s = u ^ q
                        break
                    sub = (sub - rest) & rest
            u += 1
    return found_q, found_s
