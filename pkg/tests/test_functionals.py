import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.signal import fftconvolve

from concentra.boundary import perimeter
from concentra.distance import dilate, dilated_area
from concentra.errors import CenterOnBoundary, EmptySet
from concentra.functionals import (
    concentration_deficit, deficit_report, equivalent_radius, fraenkel_asymmetry, iso_deficit,
    nelder_mead, oscillation_index, perimeter_gap, reduction_check, shape_functionals, tol_disc,
)
from concentra.grid import area, from_mask, resample, sym_diff_area
from concentra.shapes import corpus, generate
from conftest import shape


def brute_force_asymmetry(E):
    """Overlap at every lattice center from one FFT correlation; lexicographic tie-break."""
    h = E.h
    s = equivalent_radius(E)
    R = math.ceil(s / h)
    k = np.arange(-R, R + 1)
    KI, KJ = np.meshgrid(k, k)
    ker = (KI ** 2 + KJ ** 2 <= (s / h) ** 2 * (1 + 1e-9)).astype(float)
    C = np.rint(fftconvolve(E.occ.astype(float), ker, mode="full")).astype(np.int64)
    best = C.max()
    jj, ii = np.nonzero(C == best)
    i0, j0 = min(zip(ii - R, jj - R))
    return 2 * (E.count - best) / E.count, (E.origin[0] + i0 * h, E.origin[1] + j0 * h)


class TestEquivalentRadius:
    def test_examples(self):
        assert equivalent_radius(shape("disc", h=0.005)) == pytest.approx(1.0, rel=0.005)
        assert equivalent_radius(shape("two_discs", h=0.005, separation=4)) == pytest.approx(math.sqrt(2), rel=0.005)
        assert equivalent_radius(shape("square", h=0.005, side=2)) == pytest.approx(2 / math.sqrt(math.pi), rel=0.005)

    def test_empty(self):
        with pytest.raises(EmptySet):
            equivalent_radius(from_mask(np.zeros((2, 2)), 1.0, (0, 0)))


class TestConcentrationDeficit:
    @pytest.mark.parametrize("reference", ["grid", "analytic"])
    @pytest.mark.parametrize("r", [0.1, 1.0, 10.0])
    def test_disc(self, r, reference):
        E = shape("disc", h=0.005)
        assert abs(concentration_deficit(E, r, reference)) <= tol_disc(E)

    def test_far_discs(self):
        E = shape("two_discs", separation=10.0)
        exact = math.sqrt(2) * (8 / (math.sqrt(2) + 1) ** 2 - 1)
        assert concentration_deficit(E, 1.0) == pytest.approx(exact, rel=0.02)

    def test_ellipse_order_eps_squared(self):
        eps, r = 0.05, 1.0
        d = concentration_deficit(shape("ellipse", h=0.005, eps=eps), r)
        assert 0.3 * eps ** 2 <= d * (1 + r) ** 2 / r <= 30 * eps ** 2

    def test_refinement_invariance(self):
        E = shape("blob", h=0.02, seed=2)
        for r in (0.2, 1.0):
            assert concentration_deficit(resample(E, 2), r) == pytest.approx(
                concentration_deficit(E, r), abs=4 * tol_disc(E))

    def test_bad_radius_and_reference(self):
        E = shape("disc", h=0.05)
        with pytest.raises(ValueError):
            concentration_deficit(E, 0.0)
        with pytest.raises(ValueError):
            concentration_deficit(E, 1.0, reference="exact")


class TestAsymmetry:
    def test_disc(self):
        h = 0.005
        a = fraenkel_asymmetry(shape("disc", h=h))
        assert a.alpha <= 3 * h
        assert math.hypot(*a.center) <= 2 * h

    @pytest.mark.parametrize("eps", [0.02, 0.05, 0.1])
    def test_ellipse_linear_in_eps(self, eps):
        a = fraenkel_asymmetry(shape("ellipse", h=0.005, eps=eps)).alpha
        assert 0.5 <= a / eps <= 2.5

    @pytest.mark.parametrize("h", [0.05, 0.02])
    def test_two_discs_brute_force(self, h):
        E = shape("two_discs", h=h, separation=10.0)
        a = fraenkel_asymmetry(E)
        alpha, center = brute_force_asymmetry(E)
        assert a.alpha == alpha
        assert a.center == pytest.approx(center, abs=1e-9)

    @pytest.mark.parametrize("kind,seed", [("blob", 1), ("blob", 4), ("annulus", 0), ("stadium", 0)])
    def test_brute_force_other_shapes(self, kind, seed):
        E = shape(kind, h=0.04, seed=seed)
        assert fraenkel_asymmetry(E).alpha == brute_force_asymmetry(E)[0]

    def test_below_two(self):
        a = fraenkel_asymmetry(shape("two_discs", h=0.02, separation=10)).alpha
        assert a < 2

    @pytest.mark.parametrize("kind", ["ellipse", "blob"])
    def test_refinement(self, kind):
        E = shape(kind, h=0.02, seed=3)
        F = resample(E, 2)
        a, b = fraenkel_asymmetry(E), fraenkel_asymmetry(F)
        assert math.dist(a.center, b.center) <= 2 * E.h
        assert abs(a.alpha - b.alpha) <= 4 * E.h * perimeter(E) / area(E)

    @settings(max_examples=12)
    @given(st.integers(1, 50), st.integers(1, 50))
    def test_lipschitz_in_symmetric_difference(self, s1, s2):
        A = shape("blob", h=0.02, seed=s1)
        B = shape("blob", h=0.02, seed=s2)
        lhs = abs(area(A) * fraenkel_asymmetry(A).alpha - area(B) * fraenkel_asymmetry(B).alpha)
        slack = 3 * A.h * max(perimeter(A), perimeter(B))
        assert lhs <= sym_diff_area(A, B) + slack


class TestIsoDeficit:
    def test_disc(self):
        assert abs(iso_deficit(shape("disc", h=0.005))) <= 0.015

    def test_square_raw(self):
        d = iso_deficit(shape("square", h=0.005, side=2), raw=True)
        assert d == pytest.approx(2 / math.sqrt(math.pi) - 1, rel=0.02)

    def test_corpus_lower_bound(self):
        for spec in corpus("full"):
            assert iso_deficit(generate(spec)) >= -0.015


class TestPerimeterGap:
    @pytest.mark.parametrize("s", [0.0, 0.3, 1.0])
    def test_disc(self, s):
        E = shape("disc", h=0.005)
        assert abs(perimeter_gap(E, s)) <= 0.015 * 2 * math.pi * (1 + s)

    @pytest.mark.parametrize("kind", ["ellipse", "two_discs", "annulus", "blob"])
    def test_integral(self, kind):
        E = shape(kind, h=0.01, seed=2, **({"eps": 0.2} if kind == "ellipse" else {}))
        r = equivalent_radius(E)
        s = np.linspace(0, r, 20)
        gamma = np.array([perimeter_gap(E, x) for x in s])
        integral = float(np.sum(0.5 * (gamma[1:] + gamma[:-1]) * np.diff(s)))
        target = dilated_area(E, r) - math.pi * (r + r) ** 2
        assert integral == pytest.approx(target, abs=0.03 * (dilated_area(E, r) - area(E)))

    @pytest.mark.parametrize("kind", ["ellipse", "two_discs", "blob"])
    def test_isoperimetric_lower_bound(self, kind):
        E = shape(kind, h=0.01, seed=1)
        for s in (0.1, 0.5):
            G = dilate(E, s)
            rhs = 2 * math.sqrt(math.pi * area(G)) * iso_deficit(G)
            assert perimeter_gap(E, s) >= rhs - 3 * E.h * perimeter(G)

    def test_negative_s(self):
        with pytest.raises(ValueError):
            perimeter_gap(shape("disc", h=0.1), -0.1)


class TestOscillation:
    def test_disc(self):
        o = oscillation_index(shape("disc", h=0.005))
        assert o.beta <= 0.05 and o.beta_star <= 0.06

    def test_square_quadrature(self):
        # side x = 1 of the 2x2 square about its center: |nu - u|^2 = 2 - 2 / sqrt(1 + t^2)
        t = (np.arange(10000) + 0.5) / 10000 * 2 - 1
        oracle = 4 * np.sum(2 - 2 / np.sqrt(1 + t * t)) * (2 / 10000) / math.sqrt(4)
        o = oscillation_index(shape("square", h=0.005, side=2))
        assert o.beta ** 2 == pytest.approx(oracle, rel=0.03)
        assert math.hypot(*o.beta_center) < 0.01

    @pytest.mark.parametrize("kind", ["ellipse", "two_discs", "annulus", "blob", "stadium"])
    def test_beta_below_beta_star(self, kind):
        E = shape(kind, seed=3)
        a = fraenkel_asymmetry(E)
        o = oscillation_index(E, alpha=a)
        assert o.beta <= o.beta_star
        assert a.alpha <= o.beta_star + 5 * E.h / equivalent_radius(E)

    def test_center_on_boundary(self):
        m = np.zeros((3, 40), dtype=bool)
        m[1, :] = True
        with pytest.raises(CenterOnBoundary):
            oscillation_index(from_mask(m, 0.01, (0, 0)))


class TestNelderMead:
    def test_quadratic(self):
        x, fx, it = nelder_mead(lambda p: (p[0] - 1) ** 2 + 3 * (p[1] + 2) ** 2, [0.0, 0.0], 0.5, 1e-6, maxiter=500)
        assert x == pytest.approx([1, -2], abs=1e-5) and fx < 1e-10 and it < 500

    def test_iteration_cap(self):
        _, _, it = nelder_mead(lambda p: p[0] ** 2 + p[1] ** 2, [5.0, 5.0], 1.0, 1e-12, maxiter=7)
        assert it == 7


class TestReports:
    FIELDS = {"r_E", "r", "delta_r", "alpha", "alpha_center", "delta_iso", "beta", "beta_star",
              "beta_center", "h", "diagnostics"}

    def test_json_fields(self):
        rep = deficit_report(shape("ellipse"), 1.0)
        d = json.loads(json.dumps(rep.to_dict()))
        assert set(d) == self.FIELDS
        assert len(d["alpha_center"]) == 2 and d["diagnostics"]["reference"] == "grid"

    def test_invariants_over_smoke(self):
        for spec in corpus("smoke"):
            E = generate(spec)
            sf = shape_functionals(E)
            for m in (0.1, 1.0, 10.0):
                rep = deficit_report(E, m * sf.r_E, shape=sf)
                assert rep.delta_r >= -sf.tol_disc
                assert rep.alpha <= rep.beta_star + 5 * E.h / rep.r_E
                assert rep.beta <= rep.beta_star
                assert 0 <= rep.alpha < 2

    def test_reduction_disc(self):
        rep = reduction_check(shape("disc"), 0.5)
        assert rep.alpha_ratio is None and rep.delta_ratio is None and rep.branch_a is None
        assert rep.alpha == pytest.approx(rep.alpha_envelope)
        assert rep.delta == pytest.approx(rep.delta_envelope)

    def test_reduction_perforated(self):
        E = shape("perforated_disc", h=0.01, seed=7)
        rep = reduction_check(E, 0.2)
        assert rep.delta > 0
        assert rep.delta_envelope <= 1.05 * rep.delta

    def test_reduction_guarded_ratios(self):
        rep = reduction_check(shape("two_discs", separation=4), 0.1)
        assert rep.delta_ratio == pytest.approx(1.0)
        assert rep.alpha_ratio == pytest.approx(1.0)
        assert rep.branch_a == pytest.approx(rep.alpha ** 2 / rep.delta)
