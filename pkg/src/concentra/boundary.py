"""Polygonal boundaries, outward normals and perimeter estimates.

The boundary is the marching-squares contour of the occupancy indicator on
the lattice of cell centers: vertices sit on midpoints of cell edges that
separate an occupied from an empty cell. Loops keep the set on their left.
Saddle squares are split, i.e. the square's center counts as empty.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import GridSet, has_margin, padded
from .errors import EmptySet

# Vertex slots on a dual square, in doubled index units relative to (2i, 2j).
_EDGE = {"B": (1, 0), "R": (2, 1), "T": (1, 2), "L": (0, 1)}

# case = BL + 2 BR + 4 TR + 8 TL  ->  oriented segments (set on the left)
_CASES = {
    1: [("B", "L")], 2: [("R", "B")], 4: [("T", "R")], 8: [("L", "T")],
    14: [("L", "B")], 13: [("B", "R")], 11: [("R", "T")], 7: [("T", "L")],
    3: [("R", "L")], 12: [("L", "R")], 6: [("T", "B")], 9: [("B", "T")],
    5: [("B", "L"), ("T", "R")], 10: [("R", "B"), ("L", "T")],
}

SMOOTHING_PASSES = 16
CORNER_TURN = np.deg2rad(80.0)
CORNER_WINDOW = 2


def corner_mask(v: np.ndarray) -> np.ndarray:
    """Vertices where the contour turns by at least 80 degrees within +-2 vertices.

    Staircase wiggles on a smooth curve alternate in sign and cancel over a
    few vertices; a genuine corner does not.
    """
    n = len(v)
    if n <= 2 * CORNER_WINDOW + 1:
        return np.ones(n, dtype=bool)
    d = np.roll(v, -1, axis=0) - v
    ang = np.arctan2(d[:, 1], d[:, 0])
    turn = (ang - np.roll(ang, 1) + np.pi) % (2 * np.pi) - np.pi
    total = sum(np.roll(turn, k) for k in range(-CORNER_WINDOW, CORNER_WINDOW + 1))
    return np.abs(total) >= CORNER_TURN


def _smooth(v: np.ndarray, passes: int) -> np.ndarray:
    """Repeated (prev + cur + next) / 3 averaging with corner vertices pinned."""
    if passes == 0:
        return v
    pinned = corner_mask(v)[:, None]
    for _ in range(passes):
        v = np.where(pinned, v, (np.roll(v, 1, axis=0) + v + np.roll(v, -1, axis=0)) / 3.0)
    return v


def _segments(v: np.ndarray):
    w = np.roll(v, -1, axis=0)
    d = w - v
    length = np.hypot(d[:, 0], d[:, 1])
    normal = np.column_stack([d[:, 1], -d[:, 0]]) / length[:, None]
    return 0.5 * (v + w), normal, length


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Closed loops of a set boundary.

    ``loops`` holds the raw marching-squares vertices; ``smooth_loops`` the
    vertex-averaged polygon used for corrected lengths and normals.
    """

    h: float
    loops: list
    smooth_loops: list
    passes: int

    def segments(self, smoothed: bool = True):
        """(midpoints, outward normals, lengths, loop ids), concatenated."""
        src = self.smooth_loops if smoothed else self.loops
        parts = [_segments(v) for v in src]
        mids = np.concatenate([p[0] for p in parts])
        normals = np.concatenate([p[1] for p in parts])
        lengths = np.concatenate([p[2] for p in parts])
        ids = np.concatenate([np.full(len(v), k) for k, v in enumerate(src)])
        return mids, normals, lengths, ids

    def vertex_normals(self, smoothed: bool = True):
        """Vertices with unit normals averaged from their two segments."""
        src = self.smooth_loops if smoothed else self.loops
        verts, norms = [], []
        for v in src:
            _, n, _ = _segments(v)
            m = n + np.roll(n, 1, axis=0)
            m /= np.hypot(m[:, 0], m[:, 1])[:, None]
            verts.append(v)
            norms.append(m)
        return np.concatenate(verts), np.concatenate(norms)

    @property
    def length(self) -> float:
        return float(sum(_segments(v)[2].sum() for v in self.smooth_loops))

    @property
    def raw_length(self) -> float:
        return float(sum(_segments(v)[2].sum() for v in self.loops))

    def signed_areas(self, smoothed: bool = False) -> list[float]:
        src = self.smooth_loops if smoothed else self.loops
        out = []
        for v in src:
            x, y = v[:, 0], v[:, 1]
            out.append(0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))
        return out

    def to_csv(self, path: str | Path, smoothed: bool = True) -> None:
        src = self.smooth_loops if smoothed else self.loops
        with open(path, "w", newline="\n") as fh:
            fh.write("loop,x,y,nx,ny,length\n")
            for k, v in enumerate(src):
                _, n, ln = _segments(v)
                for p in range(len(v)):
                    fh.write(f"{k},{v[p, 0]:.12g},{v[p, 1]:.12g},{n[p, 0]:.12g},{n[p, 1]:.12g},{ln[p]:.12g}\n")


def extract_boundary(E: GridSet, passes: int = SMOOTHING_PASSES) -> BoundaryCurve:
    if E.is_empty:
        raise EmptySet("boundary of an empty set")
    if not has_margin(E):
        E = padded(E, 1)
    o = E.occ
    bl, br = o[:-1, :-1], o[:-1, 1:]
    tl, tr = o[1:, :-1], o[1:, 1:]
    code = bl * 1 + br * 2 + tr * 4 + tl * 8
    ny2 = 2 * o.shape[0] + 1
    src_keys, dst_keys = [], []
    for case, segs in _CASES.items():
        j, i = np.nonzero(code == case)
        if len(i) == 0:
            continue
        for a, b in segs:
            (ax, ay), (bx, by) = _EDGE[a], _EDGE[b]
            src_keys.append((2 * i + ax) * ny2 + (2 * j + ay))
            dst_keys.append((2 * i + bx) * ny2 + (2 * j + by))
    src = np.concatenate(src_keys).astype(np.int64)
    dst = np.concatenate(dst_keys).astype(np.int64)
    order = np.argsort(src)
    src, dst = src[order], dst[order]
    nxt = np.searchsorted(src, dst)
    # start loops from the lowest (y, x) vertex for a deterministic ordering
    ykey = src % ny2
    xkey = src // ny2
    start_order = np.lexsort((xkey, ykey))
    seen = np.zeros(len(src), dtype=bool)
    nxt_l = nxt.tolist()
    loops = []
    x0, y0 = E.origin
    half = 0.5 * E.h
    for s in start_order.tolist():
        if seen[s]:
            continue
        idx = []
        k = s
        while not seen[k]:
            seen[k] = True
            idx.append(k)
            k = nxt_l[k]
        idx = np.asarray(idx)
        verts = np.column_stack([x0 + xkey[idx] * half, y0 + ykey[idx] * half])
        loops.append(verts)
    smooth = [_smooth(v, passes) for v in loops]
    return BoundaryCurve(E.h, loops, smooth, passes)


def perimeter(E: GridSet, raw: bool = False, curve: BoundaryCurve | None = None) -> float:
    """Corrected perimeter (smoothed polygon length); ``raw`` gives the staircase length."""
    c = curve if curve is not None else extract_boundary(E)
    return c.raw_length if raw else c.length


def local_perimeter(E: GridSet, x: tuple[float, float], s: float,
                    curve: BoundaryCurve | None = None) -> float:
    """Corrected boundary length with segment midpoints inside the open ball B_s(x)."""
    if not s > 0:
        raise ValueError("s must be positive")
    c = curve if curve is not None else extract_boundary(E)
    mids, _, lengths, _ = c.segments()
    d2 = (mids[:, 0] - x[0]) ** 2 + (mids[:, 1] - x[1]) ** 2
    return float(lengths[d2 < s * s].sum())


def normal_failures(E: GridSet, curve: BoundaryCurve | None = None) -> int:
    """Raw segments whose normal does not point from inside E to outside."""
    c = curve if curve is not None else extract_boundary(E)
    mids, normals, _, _ = c.segments(smoothed=False)
    step = 0.5 * E.h
    bad = 0
    for sign, want in ((1.0, False), (-1.0, True)):
        p = mids + sign * step * normals
        i = np.floor((p[:, 0] - E.origin[0]) / E.h + 0.5).astype(np.int64)
        j = np.floor((p[:, 1] - E.origin[1]) / E.h + 0.5).astype(np.int64)
        nx, ny = E.dims
        inside = np.zeros(len(p), dtype=bool)
        ok = (i >= 0) & (i < nx) & (j >= 0) & (j < ny)
        inside[ok] = E.occ[j[ok], i[ok]]
        bad += int(np.count_nonzero(inside != want))
    return bad
