"""Scalar functionals of a planar set: deficits, asymmetry and oscillation.

Formulas are written for dimension n = 2, where |B_1| = pi, the
isoperimetric constant n |B_1|^(1/n) is 2 sqrt(pi) and (n - 1)/n = 1/2.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .boundary import BoundaryCurve, extract_boundary, perimeter
from .distance import dilate, dilated_area, envelope
from .errors import CenterOnBoundary, EmptySet
from .grid import GridSet, area, overlap_counts, row_prefix

GUARD_FACTOR = 10.0
RATIO_CAP = 1e6


def equivalent_radius(E: GridSet) -> float:
    """Radius of the disc with the same area as E."""
    if E.is_empty:
        raise EmptySet("equivalent radius of an empty set")
    return math.sqrt(area(E) / math.pi)


def tol_disc(E: GridSet, curve: BoundaryCurve | None = None) -> float:
    """Discretization slack 3 h P / |E| on the concentration deficit."""
    return 3 * E.h * perimeter(E, curve=curve) / area(E)


@lru_cache(maxsize=256)
def _grid_disc(radius: float, h: float) -> GridSet:
    from .shapes import ShapeSpec, generate

    return generate(ShapeSpec("disc", {"radius": radius}, h=h))


def reference_growth(r_E: float, r: float, h: float, reference: str = "grid") -> float:
    """|I_r(B_{r_E})| for the equal-area disc.

    ``grid`` measures a rasterized disc with the same dilation rule as the set
    itself, corrected to first order for the small area mismatch, so lattice
    bias cancels. ``analytic`` returns pi (r_E + r)^2.
    """
    if reference == "analytic":
        return math.pi * (r_E + r) ** 2
    if reference != "grid":
        raise ValueError(f"unknown reference {reference!r}")
    B = _grid_disc(r_E, h)
    a_B = area(B)
    return dilated_area(B, r) + (math.pi * r_E * r_E - a_B) * (r_E + r) / r_E


def concentration_deficit(E: GridSet, r: float, reference: str = "grid") -> float:
    """max(r/r_E, r_E/r) (|I_r(E)| / |I_r(B_{r_E})| - 1)."""
    if not r > 0:
        raise ValueError("r must be positive")
    r_E = equivalent_radius(E)
    grown = dilated_area(E, r)
    ref = reference_growth(r_E, r, E.h, reference)
    return max(r / r_E, r_E / r) * (grown / ref - 1.0)


@dataclass(frozen=True)
class AsymmetryResult:
    alpha: float
    center: tuple[float, float]
    overlap_cells: int
    trace: dict = field(default_factory=dict)


def _local_maxima(V: np.ndarray) -> np.ndarray:
    P = np.pad(V, 1, constant_values=-1)
    ny, nx = V.shape
    ok = np.ones_like(V, dtype=bool)
    for dj in (-1, 0, 1):
        for di in (-1, 0, 1):
            if dj or di:
                ok &= V >= P[1 + dj:1 + dj + ny, 1 + di:1 + di + nx]
    return ok


def _pick(values: np.ndarray, ii: np.ndarray, jj: np.ndarray) -> int:
    """Index of the largest value; ties go to the smallest (i, j)."""
    best = values.max()
    cand = np.flatnonzero(values == best)
    return int(cand[np.lexsort((jj[cand], ii[cand]))[0]])


def fraenkel_asymmetry(E: GridSet, max_candidates: int = 8) -> AsymmetryResult:
    """Fraenkel asymmetry with a lattice center search.

    |E Δ B_s(x)| = |E| + pi s^2 - 2 |E ∩ B_s(x)| with s = r_E, so the best
    center maximizes the overlap count. Centers range over the cell-center
    lattice: centroid, then a coarse scan, then an exhaustive stride-h scan
    around every competitive coarse local maximum.
    """
    if E.is_empty:
        raise EmptySet("asymmetry of an empty set")
    h = E.h
    N = E.count
    s = equivalent_radius(E)
    prefix = row_prefix(E)

    def counts(ii, jj):
        pts = np.column_stack([E.origin[0] + ii * h, E.origin[1] + jj * h])
        return overlap_counts(E, pts, s, prefix=prefix)

    cx, cy = E.centroid()
    ci = np.array([round((cx - E.origin[0]) / h)])
    cj = np.array([round((cy - E.origin[1]) / h)])
    c0 = counts(ci, cj)

    rows = np.flatnonzero(E.occ.any(axis=1))
    cols = np.flatnonzero(E.occ.any(axis=0))
    reach = math.ceil(s / h)
    k = max(8, int(round(s / (20 * h))))
    gi = np.arange(cols[0] - reach, cols[-1] + reach + 1, k)
    gj = np.arange(rows[0] - reach, rows[-1] + reach + 1, k)
    GI, GJ = np.meshgrid(gi, gj)
    V = counts(GI.ravel(), GJ.ravel()).reshape(GI.shape)
    slack = 2 * (s / h) * k
    peaks = _local_maxima(V) & (V >= V.max() - slack)
    pj, pi = np.nonzero(peaks)
    order = np.lexsort((GJ[pj, pi], GI[pj, pi], -V[pj, pi]))[:max_candidates]
    seeds = [(int(GI[pj[o], pi[o]]), int(GJ[pj[o], pi[o]])) for o in order]

    best_i, best_j, best_c = int(ci[0]), int(cj[0]), int(c0[0])
    off = np.arange(-k, k + 1)
    OI, OJ = np.meshgrid(off, off)
    evaluations = 1 + V.size
    for si, sj in seeds:
        ii = (si + OI).ravel()
        jj = (sj + OJ).ravel()
        c = counts(ii, jj)
        evaluations += c.size
        w = _pick(c, ii, jj)
        cand = (int(c[w]), int(ii[w]), int(jj[w]))
        if cand[0] > best_c or (cand[0] == best_c and (cand[1], cand[2]) < (best_i, best_j)):
            best_c, best_i, best_j = cand
    alpha = 2.0 * (N - best_c) / N
    center = (E.origin[0] + best_i * h, E.origin[1] + best_j * h)
    trace = {"coarse_stride_cells": k, "coarse_points": int(V.size), "refined_seeds": len(seeds),
             "evaluations": evaluations, "centroid_overlap": int(c0[0])}
    return AsymmetryResult(alpha, center, best_c, trace)


def iso_deficit(E: GridSet, raw: bool = False, curve: BoundaryCurve | None = None) -> float:
    """P(E) / (2 sqrt(pi |E|)) - 1."""
    if E.is_empty:
        raise EmptySet("isoperimetric deficit of an empty set")
    return perimeter(E, raw=raw, curve=curve) / (2 * math.sqrt(math.pi * area(E))) - 1.0


def perimeter_gap(E: GridSet, s: float) -> float:
    """P(E + B_s) - P(B_{r_E + s}); s = 0 uses E itself."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    r_E = equivalent_radius(E)
    G = E if s == 0 else dilate(E, s)
    return perimeter(G) - 2 * math.pi * (r_E + s)


# --- oscillation index ----------------------------------------------------

def nelder_mead(f, x0, size: float, xtol: float, maxiter: int = 200):
    """Derivative-free simplex descent in the plane.

    Starts from an equilateral simplex of side ``size``; stops once the simplex
    diameter drops to ``xtol`` or after ``maxiter`` iterations.
    """
    x0 = np.asarray(x0, dtype=float)
    pts = [x0, x0 + [size, 0.0], x0 + [size / 2, size * math.sqrt(3) / 2]]
    vals = [f(p) for p in pts]
    it = 0
    for it in range(1, maxiter + 1):
        order = np.argsort(vals, kind="stable")
        pts = [pts[o] for o in order]
        vals = [vals[o] for o in order]
        diam = max(np.hypot(*(pts[a] - pts[b])) for a, b in ((0, 1), (0, 2), (1, 2)))
        if diam <= xtol:
            break
        c = 0.5 * (pts[0] + pts[1])
        xr = c + (c - pts[2])
        fr = f(xr)
        if fr < vals[0]:
            xe = c + 2.0 * (c - pts[2])
            fe = f(xe)
            pts[2], vals[2] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < vals[1]:
            pts[2], vals[2] = xr, fr
        else:
            xc = c + 0.5 * (xr - c) if fr < vals[2] else c + 0.5 * (pts[2] - c)
            fc = f(xc)
            if fc < min(fr, vals[2]):
                pts[2], vals[2] = xc, fc
            else:
                for m in (1, 2):
                    pts[m] = pts[0] + 0.5 * (pts[m] - pts[0])
                    vals[m] = f(pts[m])
    b = int(np.argmin(vals))
    return pts[b], vals[b], it


@dataclass(frozen=True)
class OscillationResult:
    beta: float
    beta_star: float
    center: tuple[float, float]
    beta_center: tuple[float, float]
    trace: dict = field(default_factory=dict)


def oscillation_index(E: GridSet, alpha: AsymmetryResult | None = None,
                      curve: BoundaryCurve | None = None) -> OscillationResult:
    """beta and beta* with a shared-center simplex search.

    The boundary integral of |nu - (y - x)/|y - x||^2 is a sum over smoothed
    polygon segments, normalized by |E|^(1/2). Centers within h of a segment
    midpoint are excluded.
    """
    if E.is_empty:
        raise EmptySet("oscillation index of an empty set")
    if alpha is None:
        alpha = fraenkel_asymmetry(E)
    if curve is None:
        curve = extract_boundary(E)
    h = E.h
    N = E.count
    s = equivalent_radius(E)
    prefix = row_prefix(E)
    mids, normals, lengths, _ = curve.segments()
    norm = math.sqrt(area(E))

    def integral(x):
        d = mids - x
        dist = np.hypot(d[:, 0], d[:, 1])
        if dist.min() < h:
            return math.inf
        u = d / dist[:, None]
        return float(np.sum(np.sum((normals - u) ** 2, axis=1) * lengths)) / norm

    def asym(x):
        c = int(overlap_counts(E, [x], s, prefix=prefix)[0])
        return 2.0 * (N - c) / N

    def star(x):
        v = integral(x)
        return v + asym(x) ** 2 if math.isfinite(v) else v

    def admissible(x):
        # step off the boundary on rings of radius 2h, 4h, ... when needed
        if math.isfinite(integral(x)):
            return x
        dirs = [np.array([math.cos(a), math.sin(a)]) for a in np.arange(8) * math.pi / 4]
        for ring in np.arange(2 * h, s / 4, 2 * h):
            for d in dirs:
                if math.isfinite(integral(x + ring * d)):
                    return x + ring * d
        return None

    seeds = [admissible(np.array(x)) for x in (alpha.center, E.centroid())]
    seeds = [x for x in seeds if x is not None]
    if not seeds:
        raise CenterOnBoundary("no admissible center near the seeds")
    size, xtol = s / 4, 1e-3 * s
    star_runs = [nelder_mead(star, x, size, xtol) for x in seeds]
    x_star, f_star, it_star = min(star_runs, key=lambda t: t[1])
    runs = [nelder_mead(integral, x, size, xtol) for x in seeds + [x_star]]
    x_beta, f_beta, it_beta = min(runs, key=lambda t: t[1])
    f_at_star = integral(x_star)
    if f_at_star < f_beta:
        x_beta, f_beta = x_star, f_at_star
    trace = {"beta_star_iterations": it_star, "beta_iterations": it_beta,
             "asymmetry_at_center": asym(x_star), "segments": int(len(lengths))}
    return OscillationResult(
        beta=math.sqrt(f_beta),
        beta_star=math.sqrt(f_star),
        center=(float(x_star[0]), float(x_star[1])),
        beta_center=(float(x_beta[0]), float(x_beta[1])),
        trace=trace,
    )


# --- reports --------------------------------------------------------------

@dataclass
class DeficitReport:
    r_E: float
    r: float
    delta_r: float
    alpha: float
    alpha_center: tuple[float, float]
    delta_iso: float
    beta: float
    beta_star: float
    beta_center: tuple[float, float]
    h: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["alpha_center"] = list(self.alpha_center)
        d["beta_center"] = list(self.beta_center)
        return d


@dataclass(frozen=True)
class ShapeFunctionals:
    """The radius-independent part of a DeficitReport, computed once per set."""

    r_E: float
    area: float
    perimeter: float
    tol_disc: float
    alpha: AsymmetryResult
    delta_iso: float
    osc: OscillationResult


def shape_functionals(E: GridSet) -> ShapeFunctionals:
    curve = extract_boundary(E)
    a = fraenkel_asymmetry(E)
    return ShapeFunctionals(
        r_E=equivalent_radius(E),
        area=area(E),
        perimeter=perimeter(E, curve=curve),
        tol_disc=tol_disc(E, curve=curve),
        alpha=a,
        delta_iso=iso_deficit(E, curve=curve),
        osc=oscillation_index(E, alpha=a, curve=curve),
    )


def deficit_report(E: GridSet, r: float, shape: ShapeFunctionals | None = None,
                   reference: str = "grid") -> DeficitReport:
    if shape is None:
        shape = shape_functionals(E)
    delta = concentration_deficit(E, r, reference=reference)
    diag = {
        "area": shape.area,
        "perimeter": shape.perimeter,
        "tol_disc": shape.tol_disc,
        "guarded": delta > GUARD_FACTOR * shape.tol_disc,
        "reference": reference,
        **{f"alpha_{k}": v for k, v in shape.alpha.trace.items()},
        **{f"osc_{k}": v for k, v in shape.osc.trace.items()},
    }
    return DeficitReport(
        r_E=shape.r_E, r=r, delta_r=delta, alpha=shape.alpha.alpha,
        alpha_center=shape.alpha.center, delta_iso=shape.delta_iso,
        beta=shape.osc.beta, beta_star=shape.osc.beta_star,
        beta_center=shape.osc.center, h=E.h, diagnostics=diag,
    )


@dataclass(frozen=True)
class ReductionReport:
    alpha: float
    alpha_envelope: float
    delta: float
    delta_envelope: float
    alpha_ratio: float | None
    delta_ratio: float | None
    branch_a: float | None
    guard: float


def reduction_check(E: GridSet, r: float, reference: str = "grid") -> ReductionReport:
    """Compare asymmetry and deficit of E with those of its r-envelope.

    Ratios are reported only when their denominator exceeds ten times the
    discretization slack; otherwise they are None.
    """
    env = envelope(E, r)
    a = fraenkel_asymmetry(E).alpha
    a_env = fraenkel_asymmetry(env).alpha
    d = concentration_deficit(E, r, reference)
    d_env = concentration_deficit(env, r, reference)
    guard = GUARD_FACTOR * tol_disc(E)
    return ReductionReport(
        alpha=a, alpha_envelope=a_env, delta=d, delta_envelope=d_env,
        alpha_ratio=a / a_env if a_env > guard else None,
        delta_ratio=d_env / d if d > guard else None,
        branch_a=min(a * a / d, RATIO_CAP) if d > guard else None,
        guard=guard,
    )
