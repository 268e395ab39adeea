"""Perimeter growth under dilation and the polynomial integral constant c(N)."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .boundary import perimeter
from .distance import dilate, dilated_area
from .errors import BadParameters, DegreeTooLarge, EmptySet, NotNonnegative, NotNormalized
from .functionals import concentration_deficit, equivalent_radius, fraenkel_asymmetry, reference_growth
from .grid import GridSet

MAX_DEGREE = 6


@dataclass(frozen=True)
class SteinerFit:
    s_samples: list[float]
    perimeters: list[float]
    coefficients: list[float]  # a0, a1, ...
    relative_rms_residual: float
    degree_used: int

    def predict(self, s):
        return np.polynomial.polynomial.polyval(s, self.coefficients)

    def to_dict(self) -> dict:
        return asdict(self)


def fit_growth(s: np.ndarray, P: np.ndarray, degree: int = 1) -> SteinerFit:
    """Least-squares polynomial fit of perimeter against dilation radius.

    The residual is the RMS misfit divided by the standard deviation of the
    samples, i.e. the share of the growth signal the polynomial misses.
    """
    s = np.asarray(s, dtype=float)
    P = np.asarray(P, dtype=float)
    coef = np.polynomial.polynomial.polyfit(s, P, degree)
    res = P - np.polynomial.polynomial.polyval(s, coef)
    spread = P.std()
    rel = float(np.sqrt(np.mean(res ** 2)) / spread) if spread > 0 else 0.0
    return SteinerFit(s.tolist(), P.tolist(), coef.tolist(), rel, degree)


def sample_growth(E: GridSet, s_max: float, count: int = 20) -> SteinerFit:
    """Perimeters of E + B_s at s = s_max/count, ..., s_max with a linear fit."""
    if count < 4:
        raise BadParameters("count must be at least 4")
    if not s_max > 0:
        raise BadParameters("s_max must be positive")
    if E.is_empty:
        raise EmptySet("growth of an empty set")
    s = s_max * np.arange(1, count + 1) / count
    P = np.array([perimeter(dilate(E, x)) for x in s])
    return fit_growth(s, P, 1)


# --- c(N) ----------------------------------------------------------------

def _product_coeffs(roots: list[int]) -> list[int]:
    """Integer coefficients (low to high) of prod (t - k)."""
    c = [1]
    for k in roots:
        nxt = [0] * (len(c) + 1)
        for p, a in enumerate(c):
            nxt[p + 1] += a
            nxt[p] -= k * a
        c = nxt
    return c


def abs_product_integral(ks, D: int) -> Fraction:
    """Exact value of the integral over [0, 1] of prod |x - k_i / D|."""
    ks = sorted(int(k) for k in ks)
    n = len(ks)
    c = _product_coeffs(ks)
    L = math.lcm(*range(1, n + 2))
    anti = [0] + [L * a // (p + 1) for p, a in enumerate(c)]  # L * antiderivative in t

    def Q(t):
        v = 0
        for a in reversed(anti):
            v = v * t + a
        return v

    cuts = [0] + ks + [D]
    total = 0
    for m in range(n + 1):
        sign = -1 if (n - m) % 2 else 1
        total += sign * (Q(cuts[m + 1]) - Q(cuts[m]))
    return Fraction(total, L * D ** (n + 1))


def _batch_integrals(B: np.ndarray) -> np.ndarray:
    """Float version of abs_product_integral for rows of sorted roots in [0, 1]."""
    M, n = B.shape
    c = np.zeros((M, n + 1))
    c[:, 0] = 1.0
    for q in range(n):
        shifted = np.zeros_like(c)
        shifted[:, 1:] = c[:, :-1]
        c = shifted - B[:, q:q + 1] * c
    anti = np.zeros((M, n + 2))
    anti[:, 1:] = c / np.arange(1, n + 2)
    cuts = np.hstack([np.zeros((M, 1)), B, np.ones((M, 1))])
    Qv = np.zeros_like(cuts)
    for p in range(n + 1, -1, -1):
        Qv = Qv * cuts + anti[:, p:p + 1]
    sign = np.where((n - np.arange(n + 1)) % 2, -1.0, 1.0)
    return (np.diff(Qv, axis=1) * sign).sum(axis=1)


# coarse stride denominators keep the sorted-tuple count near 10^5
_COARSE = {1: 200, 2: 200, 3: 100, 4: 40, 5: 25, 6: 20}


@dataclass(frozen=True)
class PolyLemResult:
    N: int
    c_value: float
    minimizer: tuple[float, ...]
    trace: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["minimizer"] = list(self.minimizer)
        return d


@lru_cache(maxsize=64)
def polylem_constant(N: int, coarse: int | None = None, fine: int = 20000) -> PolyLemResult:
    """min over b in [0,1]^N of the integral of prod |x - b_i|.

    Coarse scan of all sorted tuples on the grid k/coarse, then a compass
    search on the grid k/fine with exact rational integrals.
    """
    if N < 0 or int(N) != N:
        raise BadParameters("N must be a nonnegative integer")
    if N > MAX_DEGREE:
        raise DegreeTooLarge(f"N = {N} exceeds {MAX_DEGREE}")
    if N == 0:
        return PolyLemResult(0, 1.0, (), {"exact": "1", "evaluations": 0})
    D0 = coarse or _COARSE[N]
    if fine % D0:
        raise BadParameters("fine denominator must be a multiple of the coarse one")
    best, best_val, scanned = None, math.inf, 0
    combos = itertools.combinations_with_replacement(range(D0 + 1), N)
    while True:
        chunk = np.array(list(itertools.islice(combos, 200000)), dtype=float)
        if chunk.size == 0:
            break
        vals = _batch_integrals(chunk / D0)
        scanned += len(vals)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val, best = vals[k], chunk[k]
    scale = fine // D0
    x = [int(v) * scale for v in best]
    fx = abs_product_integral(x, fine)
    step = scale
    evals = 1
    while step >= 1:
        improved = False
        for q in range(N):
            for d in (step, -step):
                y = list(x)
                y[q] += d
                if not 0 <= y[q] <= fine:
                    continue
                y.sort()
                fy = abs_product_integral(y, fine)
                evals += 1
                if fy < fx:
                    x, fx, improved = y, fy, True
        if not improved:
            step //= 2
    return PolyLemResult(
        N=N, c_value=float(fx), minimizer=tuple(v / fine for v in x),
        trace={"coarse_denominator": D0, "fine_denominator": fine, "coarse_tuples": scanned,
               "descent_evaluations": evals, "exact": f"{fx.numerator}/{fx.denominator}"},
    )


def _as_fraction(a) -> Fraction:
    return a if isinstance(a, Fraction) else Fraction(a)


def polynomial_integral(coeffs) -> Fraction:
    """Exact integral over [0, 1] of sum a_k x^k (coefficients low to high)."""
    return sum((_as_fraction(a) / (k + 1) for k, a in enumerate(coeffs)), Fraction(0))


def check_polylem(coeffs, N_bound: int) -> bool:
    """Whether the integral of p over [0, 1] is at least c(N_bound) p(0).

    p must be nonnegative on [0, 1]: checked on a 10^4-point grid and at
    either side of every real root in the interval.
    """
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg > N_bound:
        raise BadParameters(f"degree {deg} exceeds N_bound = {N_bound}")
    fc = np.array([float(a) for a in coeffs])
    scale = np.abs(fc).sum() or 1.0
    tol = 1e-12 * scale
    probes = [np.linspace(0.0, 1.0, 10001)]
    if deg >= 1:
        roots = np.roots(fc[::-1])
        real = roots[np.abs(roots.imag) < 1e-9].real
        real = real[(real >= 0) & (real <= 1)]
        probes.append(np.clip(np.concatenate([real - 1e-7, real + 1e-7]), 0, 1))
    x = np.concatenate(probes)
    if np.polynomial.polynomial.polyval(x, fc).min() < -tol:
        raise NotNonnegative("polynomial takes negative values on [0, 1]")
    c = polylem_constant(N_bound)
    return polynomial_integral(coeffs) >= Fraction(c.c_value) * _as_fraction(coeffs[0])


@dataclass(frozen=True)
class LargeRadiusChain:
    r: float
    alpha: float
    lhs_growth: float
    rhs_growth: float
    lhs_deficit: float
    rhs_deficit: float
    growth_ratio: float | None
    deficit_ratio: float | None


def large_r_chain(E: GridSet, r: float) -> LargeRadiusChain:
    """Both sides of |E + B_1| - |B_2| >= c a^2 and d_r >= c r/(1 + r) a^2.

    E must have r_E = 1 within 2%. Ratios are withheld while the asymmetry
    is below the center-search slack 5h, where both sides are noise.
    """
    if E.is_empty:
        raise EmptySet("chain of an empty set")
    r_E = equivalent_radius(E)
    if abs(r_E - 1.0) > 0.02:
        raise NotNormalized(f"equivalent radius {r_E:.4f} is not 1")
    if r < 2:
        raise BadParameters("r must be at least 2")
    a = fraenkel_asymmetry(E).alpha
    lhs1 = dilated_area(E, 1.0) - reference_growth(r_E, 1.0, E.h)
    rhs1 = a * a
    lhs2 = concentration_deficit(E, r)
    rhs2 = r / (1 + r) * a * a
    resolved = a > 5 * E.h / r_E
    return LargeRadiusChain(
        r=r, alpha=a, lhs_growth=lhs1, rhs_growth=rhs1, lhs_deficit=lhs2, rhs_deficit=rhs2,
        growth_ratio=lhs1 / rhs1 if resolved else None,
        deficit_ratio=lhs2 / rhs2 if resolved else None,
    )
