"""Binary sets on a uniform square grid.

A :class:`GridSet` stores occupancy of square cells of side ``h``. Cell
``(i, j)`` has its center at ``origin + (i, j) * h``; the occupancy array is
indexed ``occ[j, i]`` (row ``j`` runs along y). Every constructor keeps a
one-cell empty frame around the occupied support, so boundary extraction and
morphology never clip.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .errors import EmptySet, FormatError, MisalignedOrigins, SpacingMismatch

ALIGN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GridSet:
    h: float
    origin: tuple[float, float]
    occ: np.ndarray

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("spacing h must be positive")
        occ = np.array(self.occ, dtype=bool, copy=True)
        if occ.ndim != 2 or occ.shape[0] < 1 or occ.shape[1] < 1:
            raise ValueError("occupancy must be a non-empty 2-D array")
        occ.setflags(write=False)
        object.__setattr__(self, "occ", occ)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def dims(self) -> tuple[int, int]:
        return self.occ.shape[1], self.occ.shape[0]

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.occ))

    @property
    def is_empty(self) -> bool:
        return not self.occ.any()

    def cell_centers(self) -> np.ndarray:
        """World coordinates of occupied cell centers, shape (N, 2)."""
        j, i = np.nonzero(self.occ)
        return np.column_stack([self.origin[0] + i * self.h, self.origin[1] + j * self.h])

    def centroid(self) -> tuple[float, float]:
        if self.is_empty:
            raise EmptySet("centroid of an empty set")
        j, i = np.nonzero(self.occ)
        return (self.origin[0] + i.mean() * self.h, self.origin[1] + j.mean() * self.h)

    def bbox(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) of occupied cell centers."""
        if self.is_empty:
            raise EmptySet("bounding box of an empty set")
        rows = np.flatnonzero(self.occ.any(axis=1))
        cols = np.flatnonzero(self.occ.any(axis=0))
        x0, y0 = self.origin
        h = self.h
        return (x0 + cols[0] * h, y0 + rows[0] * h, x0 + cols[-1] * h, y0 + rows[-1] * h)

    def index_of(self, x: float, y: float) -> tuple[float, float]:
        """Fractional cell index (i, j) of a world point."""
        return ((x - self.origin[0]) / self.h, (y - self.origin[1]) / self.h)

    def contains_point(self, x: float, y: float) -> bool:
        """Occupancy of the cell whose square contains the point."""
        fi, fj = self.index_of(x, y)
        i, j = int(np.floor(fi + 0.5)), int(np.floor(fj + 0.5))
        nx, ny = self.dims
        return 0 <= i < nx and 0 <= j < ny and bool(self.occ[j, i])

    def __repr__(self) -> str:
        return f"GridSet(h={self.h!r}, origin={self.origin!r}, dims={self.dims}, cells={self.count})"


@dataclass(frozen=True)
class BallSpec:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")


def from_mask(mask: np.ndarray, h: float, origin: tuple[float, float]) -> GridSet:
    """Build a GridSet cropped to its support plus a one-cell empty frame."""
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return GridSet(h, origin, np.zeros((1, 1), dtype=bool))
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    j0, j1, i0, i1 = rows[0], rows[-1], cols[0], cols[-1]
    out = np.zeros((j1 - j0 + 3, i1 - i0 + 3), dtype=bool)
    out[1:-1, 1:-1] = mask[j0:j1 + 1, i0:i1 + 1]
    return GridSet(h, (origin[0] + (i0 - 1) * h, origin[1] + (j0 - 1) * h), out)


def normalized(E: GridSet) -> GridSet:
    return from_mask(E.occ, E.h, E.origin)


def padded(E: GridSet, pad: int) -> GridSet:
    """Same set on a grid enlarged by ``pad`` empty cells per side."""
    occ = np.pad(E.occ, pad)
    return GridSet(E.h, (E.origin[0] - pad * E.h, E.origin[1] - pad * E.h), occ)


def has_margin(E: GridSet) -> bool:
    o = E.occ
    return not (o[0].any() or o[-1].any() or o[:, 0].any() or o[:, -1].any())


def area(E: GridSet) -> float:
    """h² times the number of occupied cells."""
    return E.h * E.h * E.count


def _offset(A: GridSet, B: GridSet) -> tuple[int, int]:
    """Integer cell offset of B's origin relative to A's."""
    if abs(A.h - B.h) > ALIGN_TOL * A.h:
        raise SpacingMismatch(f"spacings differ: {A.h} vs {B.h}")
    fx = (B.origin[0] - A.origin[0]) / A.h
    fy = (B.origin[1] - A.origin[1]) / A.h
    dx, dy = round(fx), round(fy)
    if abs(fx - dx) > ALIGN_TOL or abs(fy - dy) > ALIGN_TOL:
        raise MisalignedOrigins("origins differ by a non-integer number of cells")
    return dx, dy


def common_frame(A: GridSet, B: GridSet) -> tuple[np.ndarray, np.ndarray, tuple[float, float]]:
    """Both occupancies placed on one array covering the union of their grids."""
    dx, dy = _offset(A, B)
    (ax, ay), (bx, by) = A.dims, B.dims
    x0, y0 = min(0, dx), min(0, dy)
    x1, y1 = max(ax, dx + bx), max(ay, dy + by)
    a = np.zeros((y1 - y0, x1 - x0), dtype=bool)
    b = np.zeros_like(a)
    a[-y0:-y0 + ay, -x0:-x0 + ax] = A.occ
    b[dy - y0:dy - y0 + by, dx - x0:dx - x0 + bx] = B.occ
    return a, b, (A.origin[0] + x0 * A.h, A.origin[1] + y0 * A.h)


def sym_diff_area(A: GridSet, B: GridSet) -> float:
    a, b, _ = common_frame(A, B)
    return A.h * A.h * int(np.count_nonzero(a ^ b))


def _combine(A: GridSet, B: GridSet, op) -> GridSet:
    a, b, origin = common_frame(A, B)
    return from_mask(op(a, b), A.h, origin)


def union(A: GridSet, B: GridSet) -> GridSet:
    return _combine(A, B, np.logical_or)


def intersection(A: GridSet, B: GridSet) -> GridSet:
    return _combine(A, B, np.logical_and)


def difference(A: GridSet, B: GridSet) -> GridSet:
    return _combine(A, B, lambda a, b: a & ~b)


def same_cells(A: GridSet, B: GridSet) -> bool:
    a, b, _ = common_frame(A, B)
    return bool(np.array_equal(a, b))


def is_subset(A: GridSet, B: GridSet) -> bool:
    a, b, _ = common_frame(A, B)
    return not np.any(a & ~b)


def row_prefix(E: GridSet) -> np.ndarray:
    """Per-row cumulative occupancy, shape (ny, nx + 1), int64."""
    ny, nx = E.occ.shape
    p = np.zeros((ny, nx + 1), dtype=np.int64)
    np.cumsum(E.occ, axis=1, out=p[:, 1:])
    return p


def overlap_counts(E: GridSet, centers: np.ndarray, s: float, prefix: np.ndarray | None = None) -> np.ndarray:
    """Occupied-cell counts inside closed balls of radius ``s`` at world ``centers``."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    idx = np.empty_like(centers)
    idx[:, 0] = (centers[:, 0] - E.origin[0]) / E.h
    idx[:, 1] = (centers[:, 1] - E.origin[1]) / E.h
    s2 = (s / E.h) ** 2 * (1 + ALIGN_TOL)
    if prefix is None:
        prefix = row_prefix(E)
    return _backend.kernels.disc_counts(prefix, np.ascontiguousarray(idx), s2, _backend.threads())


def ball_overlap_area(E: GridSet, b: BallSpec) -> float:
    """h² times the occupied cells whose centers lie in the closed ball."""
    return E.h * E.h * int(overlap_counts(E, [b.center], b.radius)[0])


def resample(E: GridSet, factor: int) -> GridSet:
    """Split every cell into ``factor``² subcells with the same occupancy."""
    if int(factor) != factor or factor < 1:
        raise ValueError("factor must be a positive integer")
    factor = int(factor)
    if factor == 1:
        return E
    occ = np.repeat(np.repeat(E.occ, factor, axis=0), factor, axis=1)
    h2 = E.h / factor
    shift = -E.h / 2 + h2 / 2
    return from_mask(occ, h2, (E.origin[0] + shift, E.origin[1] + shift))


# --- GSET1 file format ---------------------------------------------------

MAGIC = "GSET1"


def dumps(E: GridSet) -> bytes:
    nx, ny = E.dims
    header = f"{MAGIC}\nh={E.h!r}\norigin={E.origin[0]!r} {E.origin[1]!r}\ndims={nx} {ny}\n"
    return header.encode("ascii") + E.occ.astype(np.uint8).tobytes(order="C")


def loads(data: bytes) -> GridSet:
    buf = io.BytesIO(data)
    try:
        lines = [buf.readline().decode("ascii").rstrip("\n") for _ in range(4)]
        if lines[0] != MAGIC:
            raise FormatError(f"bad magic {lines[0]!r}")
        key_h, val_h = lines[1].split("=", 1)
        key_o, val_o = lines[2].split("=", 1)
        key_d, val_d = lines[3].split("=", 1)
        if (key_h, key_o, key_d) != ("h", "origin", "dims"):
            raise FormatError("header keys must be h, origin, dims")
        h = float(val_h)
        ox, oy = (float(v) for v in val_o.split())
        nx, ny = (int(v) for v in val_d.split())
    except (ValueError, UnicodeDecodeError) as exc:
        raise FormatError(f"malformed GSET1 header: {exc}") from exc
    if not h > 0 or nx < 1 or ny < 1:
        raise FormatError("h must be positive and dims at least 1")
    payload = buf.read()
    if len(payload) != nx * ny:
        raise FormatError(f"payload has {len(payload)} bytes, expected {nx * ny}")
    raw = np.frombuffer(payload, dtype=np.uint8)
    if np.any(raw > 1):
        raise FormatError("payload bytes must be 0x00 or 0x01")
    E = GridSet(h, (ox, oy), raw.reshape(ny, nx).astype(bool))
    return E if has_margin(E) else normalized(E)


def save(E: GridSet, path: str | Path) -> None:
    Path(path).write_bytes(dumps(E))


def load(path: str | Path) -> GridSet:
    return loads(Path(path).read_bytes())
