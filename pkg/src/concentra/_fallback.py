"""Pure-Python implementations of the hot kernels.

Same signatures and integer-exact results as the compiled ``_kernels``
extension; used when the extension is unavailable or when
``CONCENTRA_BACKEND=python`` is set.
"""
from __future__ import annotations

from math import isqrt

import numpy as np

NAME = "python"


def _dt_line(f, inf):
    m = len(f)
    s = [0] * m
    t = [0] * m
    q = 0
    for u in range(1, m):
        fu = f[u]
        while q >= 0 and (t[q] - s[q]) ** 2 + f[s[q]] > (t[q] - u) ** 2 + fu:
            q -= 1
        if q < 0:
            q = 0
            s[0] = u
            t[0] = 0
        else:
            i = s[q]
            w = 1 + (u * u - i * i + fu - f[i]) // (2 * (u - i))
            if w < m:
                q += 1
                s[q] = u
                t[q] = w
    out = [0] * m
    for u in range(m - 1, -1, -1):
        i = s[q]
        v = (u - i) ** 2 + f[i]
        out[u] = v if v < inf else inf
        if u == t[q]:
            q -= 1
    return out


def dt_lines(f: np.ndarray, inf: int, nthreads: int = 1) -> None:
    """In-place exact 1-D squared distance transform of every row of ``f``.

    ``f`` is a C-contiguous int64 array of shape (lines, m); entries equal to
    ``inf`` mark lines positions without a source. Results are clamped to
    ``inf``.
    """
    for k in range(f.shape[0]):
        f[k, :] = _dt_line(f[k].tolist(), int(inf))


def dilation_area(run_row: np.ndarray, run_lo: np.ndarray, run_hi: np.ndarray,
                  row_ptr: np.ndarray, row0: int, thr: int, nthreads: int = 1) -> int:
    """Number of lattice cells within squared index distance ``thr`` of a run set.

    Runs are inclusive column intervals grouped per source row in CSR form:
    source row ``row0 + k`` owns runs ``row_ptr[k]:row_ptr[k+1]``.
    """
    nrows = len(row_ptr) - 1
    R = isqrt(int(thr))
    widths = np.array([isqrt(int(thr) - d * d) for d in range(R + 1)], dtype=np.int64)
    total = 0
    for Y in range(-R, nrows + R):
        k0 = max(0, Y - R)
        k1 = min(nrows - 1, Y + R)
        if k0 > k1:
            continue
        a, b = row_ptr[k0], row_ptr[k1 + 1]
        if a == b:
            continue
        w = widths[np.abs(run_row[a:b] - (row0 + Y))]
        lo = run_lo[a:b] - w
        hi = run_hi[a:b] + w
        order = np.argsort(lo, kind="stable")
        lo = lo[order]
        hi = np.maximum.accumulate(hi[order])
        # a new merged block starts where lo exceeds every hi seen so far
        starts = np.ones(len(lo), dtype=bool)
        starts[1:] = lo[1:] > hi[:-1]
        idx = np.flatnonzero(starts)
        ends = np.append(idx[1:] - 1, len(lo) - 1)
        total += int(np.sum(hi[ends] - lo[idx] + 1))
    return total


def disc_counts(prefix: np.ndarray, centers: np.ndarray, s2: float,
                nthreads: int = 1) -> np.ndarray:
    """Occupied-cell counts inside closed discs of squared radius ``s2``.

    ``prefix`` has shape (ny, nx + 1) and holds per-row cumulative occupancy;
    ``centers`` is (M, 2) in fractional index coordinates (i, j).
    """
    ny, nx1 = prefix.shape
    nx = nx1 - 1
    out = np.zeros(len(centers), dtype=np.int64)
    rows = np.arange(ny)
    for k, (cx, cy) in enumerate(centers):
        dy2 = (rows - cy) ** 2
        ok = dy2 <= s2
        if not ok.any():
            continue
        j = rows[ok]
        half = np.sqrt(s2 - dy2[ok])
        lo = np.clip(np.ceil(cx - half), 0, nx).astype(np.int64)
        hi = np.clip(np.floor(cx + half) + 1, 0, nx).astype(np.int64)
        hi = np.maximum(hi, lo)
        out[k] = int(np.sum(prefix[j, hi] - prefix[j, lo]))
    return out
