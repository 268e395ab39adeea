"""Invariant suite behind ``concentra verify``."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .boundary import perimeter
from .distance import dilate, dilated_area, envelope, exterior_ball_check, squared_edt
from .functionals import equivalent_radius
from .grid import GridSet, area, is_subset, same_cells
from .shapes import ShapeSpec, corpus, generate
from .steiner import check_polylem, polylem_constant, sample_growth

MUTATIONS = ("strict-dilation",)


@dataclass
class Check:
    name: str
    passed: bool
    seconds: float
    detail: str = ""


@dataclass
class VerifyReport:
    level: str
    mutation: str | None
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def table(self) -> str:
        width = max(len(c.name) for c in self.checks)
        out = [f"{'invariant':<{width}}  result  seconds  detail"]
        for c in self.checks:
            out.append(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL':<6}  {c.seconds:7.2f}  {c.detail}")
        return "\n".join(out)


def brute_force_squared_edt(mask: np.ndarray) -> np.ndarray:
    """O(N^2) reference: squared index distance to the nearest True cell."""
    mask = np.asarray(mask, dtype=bool)
    pts = np.argwhere(mask)
    grid = np.indices(mask.shape).reshape(mask.ndim, -1).T
    if len(pts) == 0:
        return np.full(mask.shape, -1, dtype=np.int64)
    best = np.full(len(grid), np.iinfo(np.int64).max, dtype=np.int64)
    for start in range(0, len(pts), 512):
        p = pts[start:start + 512]
        d = ((grid[:, None, :] - p[None, :, :]) ** 2).sum(axis=2)
        np.minimum(best, d.min(axis=1), out=best)
    return best.reshape(mask.shape)


def random_nonnegative_polynomial(rng: np.random.Generator, max_degree: int = 6) -> list[Fraction]:
    """Exact coefficients (low to high) of c * prod (x - b_i)^2 * (1 - x)^k."""
    deg = int(rng.integers(0, max_degree + 1))
    pairs = int(rng.integers(0, deg // 2 + 1))
    k = deg - 2 * pairs
    poly = [Fraction(int(rng.integers(1, 100)), 10)]

    def times(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for a, x in enumerate(p):
            for b, y in enumerate(q):
                out[a + b] += x * y
        return out

    for _ in range(pairs):
        b = Fraction(int(rng.integers(0, 1001)), 1000)
        poly = times(poly, [b * b, -2 * b, Fraction(1)])
    for _ in range(k):
        poly = times(poly, [Fraction(1), Fraction(-1)])
    return poly


def _edt_check(count: int, max_side: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        ny, nx = rng.integers(1, max_side + 1, size=2)
        mask = rng.random((ny, nx)) < rng.uniform(0.01, 0.5)
        if not mask.any():
            mask[rng.integers(ny), rng.integers(nx)] = True
        if not np.array_equal(squared_edt(mask), brute_force_squared_edt(mask)):
            return False, f"mismatch on a {ny}x{nx} grid"
    return True, f"{count} grids up to {max_side}x{max_side}"


def _envelope_checks(shapes: list[GridSet], closed: bool):
    """Extensivity, idempotence and equal dilations at r = m r_E and lattice-exact r."""
    results = {"extensive": [], "idempotent": [], "same dilation": []}
    for E in shapes:
        r_E = equivalent_radius(E)
        for r in (0.2 * r_E, 0.5 * r_E, 20 * E.h, 50 * E.h):
            C = envelope(E, r, closed=closed)
            results["extensive"].append(is_subset(E, C))
            results["idempotent"].append(same_cells(C, envelope(C, r, closed=closed)))
            results["same dilation"].append(same_cells(dilate(E, r, closed=closed), dilate(C, r, closed=closed)))
    return {k: (all(v), f"{sum(v)}/{len(v)} cases") for k, v in results.items()}


def _exterior_ball(shapes: list[GridSet]):
    worst = 1.0
    for E in shapes:
        r_E = equivalent_radius(E)
        for m in (0.2, 0.5):
            r = m * r_E
            rep = exterior_ball_check(envelope(E, r), r)
            worst = min(worst, rep.passing_fraction)
    return worst >= 0.99, f"min passing fraction {worst:.4f}"


def coarea_error(E: GridSet, t: float | None = None, samples: int = 20) -> float:
    """Relative gap between area growth and the trapezoid integral of perimeter."""
    t = equivalent_radius(E) if t is None else t
    s = np.linspace(0.0, t, samples)
    P = np.array([perimeter(E) if x == 0 else perimeter(dilate(E, x)) for x in s])
    integral = float(np.sum(0.5 * (P[1:] + P[:-1]) * np.diff(s)))
    growth = dilated_area(E, t) - area(E)
    return abs(integral - growth) / growth


def _coarea(shapes: list[GridSet]):
    errs = [coarea_error(E) for E in shapes]
    return max(errs) < 0.03, f"max relative error {max(errs):.4f}"


CONVEX = [ShapeSpec("disc", {"radius": 1.0}), ShapeSpec("square", {"side": 1.0}),
          ShapeSpec("stadium", {"length": 2.0, "radius": 0.5}), ShapeSpec("ellipse", {"eps": 0.1})]


def _steiner(h: float):
    worst = 0.0
    for spec in CONVEX:
        E = generate(spec.with_h(h))
        worst = max(worst, sample_growth(E, equivalent_radius(E), 20).relative_rms_residual)
    E = generate(ShapeSpec("two_discs", {"separation": 2.5}, h=h))
    control = sample_growth(E, equivalent_radius(E), 20).relative_rms_residual
    ok = worst < 0.02 and control > 0.05
    return ok, f"convex max residual {worst:.4f}, two_discs control {control:.4f}"


def _polylem(trials: int, seed: int = 0):
    c = [polylem_constant(n).c_value for n in range(7)]
    if c[0] != 1.0 or abs(c[1] - 0.25) > 1e-6:
        return False, f"c(0) = {c[0]}, c(1) = {c[1]}"
    if any(b > a + 1e-12 for a, b in zip(c, c[1:])):
        return False, "c(N) increases with N"
    if abs(polylem_constant(2, coarse=400).c_value - c[2]) > 1e-4:
        return False, "c(2) moves under stride halving"
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        p = random_nonnegative_polynomial(rng)
        if not check_polylem(p, len(p) - 1):
            return False, f"violated by {p}"
    return True, f"c(0..6) monotone, {trials} random polynomials"


def run_verify(level: str = "smoke", mutate: str | None = None) -> VerifyReport:
    if level not in ("smoke", "full"):
        raise ValueError("level must be 'smoke' or 'full'")
    if mutate is not None and mutate not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutate!r}")
    full = level == "full"
    report = VerifyReport(level, mutate)
    closed = mutate != "strict-dilation"

    def timed(name, fn, *args):
        t0 = time.perf_counter()
        ok, detail = fn(*args)
        report.checks.append(Check(name, bool(ok), time.perf_counter() - t0, detail))

    timed("edt brute-force equivalence", _edt_check, 200 if full else 60, 64 if full else 40)
    specs = corpus(level)
    shapes = [generate(s) for s in specs]
    t0 = time.perf_counter()
    env = _envelope_checks(shapes, closed)
    share = (time.perf_counter() - t0) / 3
    for name, key in (("envelope extensivity", "extensive"), ("closing idempotence", "idempotent"),
                      ("dilation of envelope", "same dilation")):
        report.checks.append(Check(name, env[key][0], share, env[key][1]))
    timed("exterior ball", _exterior_ball, shapes)
    coarea_h = 0.005 if full else 0.01
    timed("coarea consistency", _coarea, [generate(s.with_h(coarea_h)) for s in corpus("smoke")])
    timed("steiner residuals", _steiner, 0.005 if full else 0.01)
    timed("polylem", _polylem, 1000 if full else 200)
    return report
