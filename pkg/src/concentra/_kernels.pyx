# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; see ``_fallback`` for the reference semantics."""

from cython.parallel import prange
from libc.math cimport sqrt, ceil, floor
from libc.stdlib cimport malloc, free, qsort

import numpy as np
cimport numpy as cnp

cnp.import_array()

NAME = "cython"

ctypedef long long i64


cdef inline i64 floordiv(i64 a, i64 b) noexcept nogil:
    # b > 0
    cdef i64 q = a / b
    if (a % b != 0) and (a < 0):
        q -= 1
    return q


cdef inline i64 isqrt64(i64 n) noexcept nogil:
    cdef i64 r = <i64>sqrt(<double>n)
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


cdef void _dt_line(i64* f, i64 m, i64 inf, i64* s, i64* t, i64* out) noexcept nogil:
    cdef i64 q = 0, u, i, w, v
    s[0] = 0
    t[0] = 0
    for u in range(1, m):
        while q >= 0 and (t[q] - s[q]) * (t[q] - s[q]) + f[s[q]] > (t[q] - u) * (t[q] - u) + f[u]:
            q -= 1
        if q < 0:
            q = 0
            s[0] = u
            t[0] = 0
        else:
            i = s[q]
            w = 1 + floordiv(u * u - i * i + f[u] - f[i], 2 * (u - i))
            if w < m:
                q += 1
                s[q] = u
                t[q] = w
    u = m - 1
    while u >= 0:
        i = s[q]
        v = (u - i) * (u - i) + f[i]
        out[u] = v if v < inf else inf
        if u == t[q]:
            q -= 1
        u -= 1


def dt_lines(i64[:, ::1] f, i64 inf, int nthreads=1):
    """In-place exact 1-D squared distance transform of every row of ``f``."""
    cdef Py_ssize_t nl = f.shape[0], k
    cdef i64 m = f.shape[1], u
    cdef i64* buf
    if nl == 0 or m == 0:
        return
    for k in prange(nl, nogil=True, num_threads=max(nthreads, 1), schedule="static"):
        buf = <i64*>malloc(3 * m * sizeof(i64))
        _dt_line(&f[k, 0], m, inf, buf, buf + m, buf + 2 * m)
        for u in range(m):
            f[k, u] = buf[2 * m + u]
        free(buf)


cdef int _cmp_pair(const void* a, const void* b) noexcept nogil:
    cdef i64 x = (<i64*>a)[0]
    cdef i64 y = (<i64*>b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


def dilation_area(i64[::1] run_row, i64[::1] run_lo, i64[::1] run_hi,
                  i64[::1] row_ptr, i64 row0, i64 thr, int nthreads=1):
    """Number of lattice cells within squared index distance ``thr`` of a run set."""
    cdef i64 nrows = row_ptr.shape[0] - 1
    cdef i64 R = isqrt64(thr)
    cdef i64 total = 0
    cdef i64 Y, k0, k1, a, b, n, p, d, cur_lo, cur_hi, acc
    cdef i64* pairs
    cdef i64* widths = <i64*>malloc((R + 1) * sizeof(i64))
    for d in range(R + 1):
        widths[d] = isqrt64(thr - d * d)
    for Y in prange(-R, nrows + R, nogil=True, num_threads=max(nthreads, 1), schedule="dynamic"):
        k0 = Y - R
        if k0 < 0:
            k0 = 0
        k1 = Y + R
        if k1 > nrows - 1:
            k1 = nrows - 1
        if k0 > k1:
            continue
        a = row_ptr[k0]
        b = row_ptr[k1 + 1]
        n = b - a
        if n == 0:
            continue
        pairs = <i64*>malloc(2 * n * sizeof(i64))
        for p in range(n):
            d = run_row[a + p] - (row0 + Y)
            if d < 0:
                d = -d
            pairs[2 * p] = run_lo[a + p] - widths[d]
            pairs[2 * p + 1] = run_hi[a + p] + widths[d]
        qsort(pairs, n, 2 * sizeof(i64), _cmp_pair)
        acc = 0
        cur_lo = pairs[0]
        cur_hi = pairs[1]
        for p in range(1, n):
            if pairs[2 * p] > cur_hi:
                acc = acc + cur_hi - cur_lo + 1
                cur_lo = pairs[2 * p]
                cur_hi = pairs[2 * p + 1]
            elif pairs[2 * p + 1] > cur_hi:
                cur_hi = pairs[2 * p + 1]
        acc = acc + cur_hi - cur_lo + 1
        total += acc
        free(pairs)
    free(widths)
    return total


def disc_counts(i64[:, ::1] prefix, double[:, ::1] centers, double s2, int nthreads=1):
    """Occupied-cell counts inside closed discs of squared radius ``s2``."""
    cdef Py_ssize_t ny = prefix.shape[0], nx = prefix.shape[1] - 1
    cdef Py_ssize_t M = centers.shape[0], k
    cdef i64 j, lo, hi, acc
    cdef double cx, cy, dy2, half
    out = np.zeros(M, dtype=np.int64)
    cdef i64[::1] o = out
    for k in prange(M, nogil=True, num_threads=max(nthreads, 1), schedule="static"):
        cx = centers[k, 0]
        cy = centers[k, 1]
        acc = 0
        for j in range(ny):
            dy2 = (j - cy) * (j - cy)
            if dy2 > s2:
                continue
            half = sqrt(s2 - dy2)
            lo = <i64>ceil(cx - half)
            hi = <i64>floor(cx + half) + 1
            if lo < 0:
                lo = 0
            if hi > nx:
                hi = nx
            if hi > lo:
                acc = acc + prefix[j, hi] - prefix[j, lo]
        o[k] = acc
    return out
