# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: the theta-step map-and-merge and the Gauss-map
sample iteration.

Operation-for-operation twin of cfx._kernels_py (multiply, add, min, max,
identical merge predicate; compiled with -ffp-contract=off so no fused
multiply-add sneaks in), which makes the two backends bit-identical.  The
cell loop releases the GIL, so callers may partition [j0, j1) across
threads; outputs concatenated in cell order do not depend on the
partitioning.
"""

from libc.math cimport floor
from libc.stdlib cimport free, malloc

import numpy as np

BACKEND = "c"


cdef struct Pair:
    double lo
    double hi


cdef inline bint _pair_less(Pair a, Pair b) noexcept nogil:
    # order by lo then hi; tie order does not affect the merged result
    if a.lo < b.lo:
        return True
    if a.lo > b.lo:
        return False
    return a.hi < b.hi


cdef void _insertion_sort(Pair *p, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef Pair key
    for i in range(1, n):
        key = p[i]
        j = i - 1
        while j >= 0 and _pair_less(key, p[j]):
            p[j + 1] = p[j]
            j -= 1
        p[j + 1] = key


cdef void _sort_pairs(Pair *p, Py_ssize_t n) noexcept nogil:
    """Iterative quicksort with inlined comparisons (qsort's comparator
    callback dominates the runtime otherwise); median-of-three pivot,
    insertion sort below 16, larger partition deferred to an explicit
    stack so the depth stays <= log2(n)."""
    cdef Py_ssize_t stack_lo[64]
    cdef Py_ssize_t stack_hi[64]
    cdef int top
    cdef Py_ssize_t lo, hi, i, j, mid
    cdef Pair pivot, tmp
    if n < 2:
        return
    stack_lo[0] = 0
    stack_hi[0] = n - 1
    top = 1
    while top:
        top -= 1
        lo = stack_lo[top]
        hi = stack_hi[top]
        while hi - lo > 15:
            mid = lo + ((hi - lo) >> 1)
            if _pair_less(p[mid], p[lo]):
                tmp = p[lo]; p[lo] = p[mid]; p[mid] = tmp
            if _pair_less(p[hi], p[mid]):
                tmp = p[mid]; p[mid] = p[hi]; p[hi] = tmp
                if _pair_less(p[mid], p[lo]):
                    tmp = p[lo]; p[lo] = p[mid]; p[mid] = tmp
            pivot = p[mid]
            i = lo
            j = hi
            while i <= j:
                while _pair_less(p[i], pivot):
                    i += 1
                while _pair_less(pivot, p[j]):
                    j -= 1
                if i <= j:
                    tmp = p[i]; p[i] = p[j]; p[j] = tmp
                    i += 1
                    j -= 1
            if j - lo < hi - i:
                if i < hi:
                    stack_lo[top] = i
                    stack_hi[top] = hi
                    top += 1
                hi = j
            else:
                if lo < j:
                    stack_lo[top] = lo
                    stack_hi[top] = j
                    top += 1
                lo = i
        _insertion_sort(p + lo, hi - lo + 1)


def theta_merge(row_start, src, slope, offset, fib_start, fib_lo, fib_hi, j0, j1, eps):
    """Map-and-merge step for target cells j0 <= j < j1.

    Same contract as the numpy fallback: returns (counts per cell, merged
    interval lows, merged interval highs).
    """
    cdef long long[:] rs_v = row_start
    cdef int[:] src_v = src
    cdef double[:] s_v = slope
    cdef double[:] t_v = offset
    cdef long long[:] fs_v = fib_start
    cdef double[:] flo_v = fib_lo
    cdef double[:] fhi_v = fib_hi
    cdef Py_ssize_t a = j0, b = j1
    cdef double merge_eps = eps

    cdef Py_ssize_t n = b - a
    counts_arr = np.zeros(n, dtype=np.int64)
    cdef long long[:] counts = counts_arr

    # upper bound on output size and scratch size
    cdef Py_ssize_t j, r, i, m, total = 0, biggest = 0
    cdef Py_ssize_t cell_m
    with nogil:
        for j in range(a, b):
            cell_m = 0
            for r in range(rs_v[j], rs_v[j + 1]):
                cell_m += fs_v[src_v[r] + 1] - fs_v[src_v[r]]
            total += cell_m
            if cell_m > biggest:
                biggest = cell_m
    if total == 0:
        return counts_arr, np.empty(0), np.empty(0)

    out_lo_arr = np.empty(total)
    out_hi_arr = np.empty(total)
    cdef double[:] out_lo = out_lo_arr
    cdef double[:] out_hi = out_hi_arr

    cdef Pair *scratch = <Pair *> malloc(biggest * sizeof(Pair))
    if scratch == NULL:
        raise MemoryError("theta_merge scratch allocation failed")

    cdef Py_ssize_t cursor = 0, k, f0, f1
    cdef double sl, of, e1, e2, cur_lo, cur_hi
    try:
        with nogil:
            for j in range(a, b):
                m = 0
                for r in range(rs_v[j], rs_v[j + 1]):
                    sl = s_v[r]
                    of = t_v[r]
                    f0 = fs_v[src_v[r]]
                    f1 = fs_v[src_v[r] + 1]
                    for i in range(f0, f1):
                        e1 = sl * flo_v[i] + of
                        e2 = sl * fhi_v[i] + of
                        if e1 <= e2:
                            scratch[m].lo = e1
                            scratch[m].hi = e2
                        else:
                            scratch[m].lo = e2
                            scratch[m].hi = e1
                        m += 1
                if m == 0:
                    continue
                _sort_pairs(scratch, m)
                k = 0
                cur_lo = scratch[0].lo
                cur_hi = scratch[0].hi
                for i in range(1, m):
                    if scratch[i].lo <= cur_hi + merge_eps:
                        if scratch[i].hi > cur_hi:
                            cur_hi = scratch[i].hi
                    else:
                        out_lo[cursor] = cur_lo
                        out_hi[cursor] = cur_hi
                        cursor += 1
                        k += 1
                        cur_lo = scratch[i].lo
                        cur_hi = scratch[i].hi
                out_lo[cursor] = cur_lo
                out_hi[cursor] = cur_hi
                cursor += 1
                counts[j - a] = k + 1
    finally:
        free(scratch)
    return counts_arr, out_lo_arr[:cursor].copy(), out_hi_arr[:cursor].copy()


def gk_iterate(x, depth):
    """Iterate the Gauss map on the sample array in place (zeros stay put)."""
    cdef double[:] xv = x
    cdef Py_ssize_t i, n = xv.shape[0]
    cdef int d, dd = depth
    cdef double v
    with nogil:
        for i in range(n):
            v = xv[i]
            for d in range(dd):
                if v > 1e-300:
                    v = 1.0 / v
                    v = v - floor(v)
            xv[i] = v
    return x
