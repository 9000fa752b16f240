# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core; the bit-identical twin of ``_pykernels``.

Every floating-point reduction runs in the same order as the numpy fallback
(sequential cumulative sums, feature-by-feature distance accumulation), so
switching backends never changes a result.
"""

import numpy as np

from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc


cdef inline bint _pair_less(double va, Py_ssize_t ia, double vb, Py_ssize_t ib) noexcept nogil:
    return va < vb or (va == vb and ia < ib)


cdef inline void _swap_pairs(double* v, Py_ssize_t* idx, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef double tv = v[a]
    cdef Py_ssize_t ti = idx[a]
    v[a] = v[b]
    idx[a] = idx[b]
    v[b] = tv
    idx[b] = ti


cdef void _sort_pairs(double* v, Py_ssize_t* idx, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    """Sort (value, index) pairs on [lo, hi) ascending.

    All pairs are distinct (indices are unique), so the order is total and
    matches numpy's stable argsort of the values. Quicksort with a
    median-of-three pivot, insertion sort below 16 elements, and the smaller
    partition pushed first to bound the stack at O(log n).
    """
    cdef Py_ssize_t stack_lo[64]
    cdef Py_ssize_t stack_hi[64]
    cdef int top = 1
    cdef Py_ssize_t l, h, i, j, mid
    cdef double pv, tv
    cdef Py_ssize_t pi, ti
    stack_lo[0] = lo
    stack_hi[0] = hi
    while top > 0:
        top -= 1
        l = stack_lo[top]
        h = stack_hi[top]
        while h - l > 16:
            mid = l + (h - l) // 2
            if _pair_less(v[mid], idx[mid], v[l], idx[l]):
                _swap_pairs(v, idx, l, mid)
            if _pair_less(v[h - 1], idx[h - 1], v[l], idx[l]):
                _swap_pairs(v, idx, l, h - 1)
            if _pair_less(v[h - 1], idx[h - 1], v[mid], idx[mid]):
                _swap_pairs(v, idx, mid, h - 1)
            pv = v[mid]
            pi = idx[mid]
            i = l - 1
            j = h
            while True:
                i += 1
                while _pair_less(v[i], idx[i], pv, pi):
                    i += 1
                j -= 1
                while _pair_less(pv, pi, v[j], idx[j]):
                    j -= 1
                if i >= j:
                    break
                _swap_pairs(v, idx, i, j)
            if j + 1 - l <= h - j - 1:
                stack_lo[top] = l
                stack_hi[top] = j + 1
                top += 1
                l = j + 1
            else:
                stack_lo[top] = j + 1
                stack_hi[top] = h
                top += 1
                h = j + 1
        for i in range(l + 1, h):
            tv = v[i]
            ti = idx[i]
            j = i - 1
            while j >= l and _pair_less(tv, ti, v[j], idx[j]):
                v[j + 1] = v[j]
                idx[j + 1] = idx[j]
                j -= 1
            v[j + 1] = tv
            idx[j + 1] = ti


def pareto_nondominated(scores):
    """Boolean mask of points not dominated by any other (finite scores)."""
    s = np.ascontiguousarray(scores, dtype=np.float64)
    cdef double[:, ::1] sv = s
    cdef Py_ssize_t n = sv.shape[0]
    cdef Py_ssize_t m = sv.shape[1]
    out = np.ones(n, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    cdef Py_ssize_t i, j, k
    cdef bint ge_all, gt_any
    with nogil:
        for i in range(n):
            for j in range(n):
                if j == i:
                    continue
                ge_all = True
                gt_any = False
                for k in range(m):
                    if sv[j, k] < sv[i, k]:
                        ge_all = False
                        break
                    elif sv[j, k] > sv[i, k]:
                        gt_any = True
                if ge_all and gt_any:
                    ov[i] = 0
                    break
    return out.view(np.bool_)


def best_split(x, y, w, min_leaf):
    """Best weighted-Gini split over the columns of ``x``; see the fallback
    for the full contract."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    cdef double[:, ::1] xv = x
    cdef double[::1] yv = y
    cdef double[::1] wv = w
    cdef Py_ssize_t m = xv.shape[0]
    cdef Py_ssize_t f = xv.shape[1]
    cdef Py_ssize_t leaf = min_leaf

    cdef double total_w = 0.0
    cdef double total_s = 0.0
    cdef Py_ssize_t i, j, k
    for i in range(m):
        total_w += wv[i]
    for i in range(m):
        total_s += wv[i] * yv[i]
    if total_w <= 0.0 or m < 2 * leaf:
        return -1, 0.0, 0.0
    cdef double parent = 1.0 - (
        total_s * total_s + (total_w - total_s) * (total_w - total_s)
    ) / (total_w * total_w)

    cdef double* vals = <double*> malloc(m * sizeof(double))
    cdef Py_ssize_t* idxs = <Py_ssize_t*> malloc(m * sizeof(Py_ssize_t))
    if vals == NULL or idxs == NULL:
        free(vals)
        free(idxs)
        raise MemoryError()
    cdef Py_ssize_t best_feature = -1
    cdef double best_threshold = 0.0
    cdef double best_gain = -INFINITY
    cdef double cw, cs, wl, sl, wr, sr, gl, gr, gain
    cdef Py_ssize_t row
    try:
        with nogil:
            for j in range(f):
                for i in range(m):
                    vals[i] = xv[i, j]
                    idxs[i] = i
                _sort_pairs(vals, idxs, 0, m)
                cw = 0.0
                cs = 0.0
                for k in range(m - 1):
                    row = idxs[k]
                    cw += wv[row]
                    cs += wv[row] * yv[row]
                    if vals[k] < vals[k + 1] and k + 1 >= leaf and m - k - 1 >= leaf:
                        wl = cw
                        sl = cs
                        wr = total_w - wl
                        sr = total_s - sl
                        if wl > 0.0:
                            gl = 1.0 - (sl * sl + (wl - sl) * (wl - sl)) / (wl * wl)
                        else:
                            gl = 0.0
                        if wr > 0.0:
                            gr = 1.0 - (sr * sr + (wr - sr) * (wr - sr)) / (wr * wr)
                        else:
                            gr = 0.0
                        gain = parent - (wl * gl + wr * gr) / total_w
                        if gain > best_gain:
                            best_gain = gain
                            best_threshold = (vals[k] + vals[k + 1]) / 2.0
                            best_feature = j
    finally:
        free(vals)
        free(idxs)
    if best_feature < 0:
        return -1, 0.0, 0.0
    return int(best_feature), float(best_threshold), float(best_gain)


def knn_indices(x, k):
    """Indices of each row's k nearest neighbors (self excluded, ties toward
    the smaller row index)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] xv = x
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t f = xv.shape[1]
    cdef Py_ssize_t kk = k
    if not 1 <= kk < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    out = np.empty((n, kk), dtype=np.int64)
    cdef long long[:, ::1] ov = out

    cdef double* d2 = <double*> malloc(n * sizeof(double))
    cdef double* best_d = <double*> malloc(kk * sizeof(double))
    cdef Py_ssize_t* best_i = <Py_ssize_t*> malloc(kk * sizeof(Py_ssize_t))
    if d2 == NULL or best_d == NULL or best_i == NULL:
        free(d2)
        free(best_d)
        free(best_i)
        raise MemoryError()

    cdef Py_ssize_t i, t, c, pos
    cdef double xi, diff, d
    try:
        with nogil:
            for i in range(n):
                for t in range(n):
                    d2[t] = 0.0
                for c in range(f):
                    xi = xv[i, c]
                    for t in range(n):
                        diff = xv[t, c] - xi
                        d2[t] += diff * diff
                d2[i] = INFINITY
                for pos in range(kk):
                    best_d[pos] = INFINITY
                    best_i[pos] = n
                for t in range(n):
                    d = d2[t]
                    if d > best_d[kk - 1] or (d == best_d[kk - 1] and t >= best_i[kk - 1]):
                        continue
                    pos = kk - 1
                    while pos > 0 and (
                        d < best_d[pos - 1] or (d == best_d[pos - 1] and t < best_i[pos - 1])
                    ):
                        best_d[pos] = best_d[pos - 1]
                        best_i[pos] = best_i[pos - 1]
                        pos -= 1
                    best_d[pos] = d
                    best_i[pos] = t
                for pos in range(kk):
                    ov[i, pos] = best_i[pos]
    finally:
        free(d2)
        free(best_d)
        free(best_i)
    return out
