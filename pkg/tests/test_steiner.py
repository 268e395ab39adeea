import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from concentra.errors import BadParameters, DegreeTooLarge, EmptySet, NotNonnegative, NotNormalized
from concentra.grid import from_mask
from concentra.steiner import (
    abs_product_integral, check_polylem, fit_growth, large_r_chain, polylem_constant,
    polynomial_integral, sample_growth,
)
from concentra.verify import random_nonnegative_polynomial
from conftest import shape


def chebyshev_constant(n):
    # the monic degree-n polynomial of least L1 norm on [-1, 1] has norm 2^(1-n);
    # mapping to [0, 1] scales it by 2^-n (leading coefficient) and 1/2 (dx)
    return 4.0 ** -n


class TestGrowth:
    def test_disc(self):
        fit = sample_growth(shape("disc", h=0.005), 1.0, 20)
        assert fit.coefficients == pytest.approx([2 * math.pi, 2 * math.pi], rel=0.02)
        assert fit.relative_rms_residual < 0.01
        assert fit.degree_used == 1 and len(fit.coefficients) == 2

    def test_unit_square(self):
        fit = sample_growth(shape("square", h=0.005, side=1.0), 1.0, 20)
        assert fit.coefficients == pytest.approx([4.0, 2 * math.pi], rel=0.02)

    def test_merging_discs_reject_linear_fit(self):
        fit = sample_growth(shape("two_discs", h=0.005, separation=2.5), 1.0, 20)
        assert fit.relative_rms_residual > 0.05

    def test_samples_and_json(self):
        fit = sample_growth(shape("disc", h=0.05), 0.8, 4)
        assert fit.s_samples == pytest.approx([0.2, 0.4, 0.6, 0.8])
        assert json.loads(json.dumps(fit.to_dict()))["degree_used"] == 1

    def test_fit_is_deterministic_and_exact_on_lines(self):
        s = np.linspace(0.1, 1, 10)
        fit = fit_growth(s, 3 + 2 * s)
        assert fit.coefficients == pytest.approx([3, 2])
        assert fit.relative_rms_residual == pytest.approx(0, abs=1e-12)
        assert fit_growth(s, 3 + 2 * s) == fit
        assert fit.predict(0.5) == pytest.approx(4.0)

    def test_preconditions(self):
        E = shape("disc", h=0.1)
        with pytest.raises(BadParameters):
            sample_growth(E, 1.0, 3)
        with pytest.raises(BadParameters):
            sample_growth(E, 0.0, 10)
        with pytest.raises(EmptySet):
            sample_growth(from_mask(np.zeros((2, 2)), 0.1, (0, 0)), 1.0, 10)


class TestAbsProductIntegral:
    def test_single_root(self):
        # (b^2 + (1 - b)^2) / 2
        for k in range(0, 11):
            b = Fraction(k, 10)
            assert abs_product_integral([k], 10) == (b * b + (1 - b) ** 2) / 2

    def test_double_root_at_zero(self):
        assert abs_product_integral([0, 0], 7) == Fraction(1, 3)

    @given(st.lists(st.integers(0, 50), min_size=1, max_size=5))
    def test_against_quadrature(self, ks):
        x = (np.arange(200000) + 0.5) / 200000
        v = np.prod([np.abs(x - k / 50) for k in ks], axis=0).mean()
        assert float(abs_product_integral(ks, 50)) == pytest.approx(v, rel=1e-6, abs=1e-12)


class TestPolyLemConstant:
    def test_zero(self):
        assert polylem_constant(0).c_value == 1.0

    def test_one(self):
        r = polylem_constant(1)
        assert r.c_value == pytest.approx(0.25, abs=1e-6)
        assert r.minimizer == pytest.approx((0.5,))

    def test_two_fine_grid_oracle(self):
        k = np.arange(2001) / 2000
        B1, B2 = np.meshgrid(k, k)
        # f(b1, b2) via exact piecewise integration of (x - b1)(x - b2)
        b1, b2 = np.minimum(B1, B2).ravel(), np.maximum(B1, B2).ravel()

        def F(t):
            return t ** 3 / 3 - (b1 + b2) * t ** 2 / 2 + b1 * b2 * t

        f = (F(b1) - F(0)) - (F(b2) - F(b1)) + (F(1) - F(b2))
        assert polylem_constant(2).c_value == pytest.approx(f.min(), abs=1e-4)

    @pytest.mark.parametrize("n", range(0, 7))
    def test_closed_form(self, n):
        assert polylem_constant(n).c_value == pytest.approx(chebyshev_constant(n), rel=1e-6)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_minimizer_is_chebyshev(self, n):
        nodes = sorted((1 + math.cos(k * math.pi / (n + 1))) / 2 for k in range(1, n + 1))
        assert polylem_constant(n).minimizer == pytest.approx(nodes, abs=2e-3)

    def test_monotone_and_sorted(self):
        vals = [polylem_constant(n) for n in range(7)]
        assert all(b.c_value <= a.c_value for a, b in zip(vals, vals[1:]))
        for v in vals:
            assert list(v.minimizer) == sorted(v.minimizer)
            assert 0 < v.c_value <= 1

    @pytest.mark.parametrize("n", [2, 3])
    def test_stable_under_stride_halving(self, n):
        base = polylem_constant(n)
        finer = polylem_constant(n, coarse=2 * base.trace["coarse_denominator"])
        assert abs(finer.c_value - base.c_value) < 1e-4

    def test_too_large(self):
        with pytest.raises(DegreeTooLarge):
            polylem_constant(7)

    def test_bad_input(self):
        with pytest.raises(BadParameters):
            polylem_constant(-1)
        with pytest.raises(BadParameters):
            polylem_constant(2, coarse=300)

    def test_json(self):
        d = json.loads(json.dumps(polylem_constant(2).to_dict()))
        assert d["N"] == 2 and d["trace"]["exact"] == "1/16"


class TestCheckPolylem:
    def test_constant(self):
        assert check_polylem([1], 3)
        assert polynomial_integral([1]) == 1

    def test_cube(self):
        p = [1, -3, 3, -1]  # (1 - x)^3
        assert polynomial_integral(p) == Fraction(1, 4)
        assert check_polylem(p, 3)

    def test_double_root_is_allowed(self):
        assert check_polylem([Fraction(1, 4), -1, 1], 2)  # (x - 1/2)^2

    def test_negative_rejected(self):
        with pytest.raises(NotNonnegative):
            check_polylem([1, -3], 1)
        with pytest.raises(NotNonnegative):
            check_polylem([Fraction(1, 4), -1, Fraction(999, 1000)], 2)  # dips just below zero

    def test_degree_bound(self):
        with pytest.raises(BadParameters):
            check_polylem([0, 0, 1], 1)

    @given(st.integers(0, 2 ** 32 - 1))
    def test_random_products(self, seed):
        p = random_nonnegative_polynomial(np.random.default_rng(seed))
        assert check_polylem(p, len(p) - 1)
        assert check_polylem(p, 6)


class TestLargeRadiusChain:
    def test_disc_suppressed(self):
        rep = large_r_chain(shape("disc", h=0.01), 5.0)
        assert rep.growth_ratio is None and rep.deficit_ratio is None
        assert abs(rep.lhs_growth) < 0.05

    def test_ellipse(self):
        rep = large_r_chain(shape("ellipse", h=0.01, eps=0.1), 5.0)
        assert rep.growth_ratio is not None and 0 < rep.growth_ratio < math.inf
        assert rep.deficit_ratio > 0

    def test_requires_unit_radius(self):
        with pytest.raises(NotNormalized):
            large_r_chain(shape("disc", h=0.01, radius=2.0), 5.0)

    def test_requires_large_r(self):
        with pytest.raises(BadParameters):
            large_r_chain(shape("disc", h=0.02), 1.0)
