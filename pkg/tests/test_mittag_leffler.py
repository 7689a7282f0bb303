"""Mittag-Leffler evaluation: series, contour route, dispatcher, identities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sincprop import gamma_real, ml, ml_array, ml_contour, ml_contour_array, ml_series


class TestGammaReal:
    def test_integers(self):
        assert gamma_real(1.0) == 1.0
        assert gamma_real(2.0) == 1.0
        assert gamma_real(5.0) == pytest.approx(24.0, rel=1e-15)

    def test_half_integers(self):
        assert gamma_real(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
        assert gamma_real(1.5) == pytest.approx(0.5 * math.sqrt(math.pi), rel=1e-9)

    def test_poles(self):
        with pytest.raises(ValueError):
            gamma_real(0.0)
        with pytest.raises(ValueError):
            gamma_real(-2.0)


class TestSeries:
    def test_value_at_zero(self):
        for beta in (1.0, 2.0, 0.7, 3.2):
            assert ml_series(0.8, beta, 0.0) == pytest.approx(
                1.0 / gamma_real(beta), rel=1e-15
            )

    def test_classical_exponential(self):
        assert ml_series(1.0, 1.0, -1.0) == pytest.approx(math.exp(-1.0), abs=1e-10)
        assert ml_series(1.0, 1.0, 0.5) == pytest.approx(math.exp(0.5), abs=1e-10)

    def test_cosine_case(self):
        assert ml_series(2.0, 1.0, -1.0) == pytest.approx(math.cos(1.0), abs=1e-10)

    def test_sinc_case(self):
        # alpha = 2, beta = 2: E(z) = sinh(sqrt(z))/sqrt(z); at z = -1: sin(1)
        assert ml_series(2.0, 2.0, -1.0) == pytest.approx(math.sin(1.0), abs=1e-10)

    def test_argument_guard(self):
        with pytest.raises(ValueError):
            ml_series(0.5, 1.0, -6.0)

    def test_parameter_guards(self):
        with pytest.raises(ValueError):
            ml_series(0.0, 1.0, -1.0)
        with pytest.raises(ValueError):
            ml_series(2.5, 1.0, -1.0)
        with pytest.raises(ValueError):
            ml_series(1.0, 0.0, -1.0)


class TestContour:
    def test_exponential(self):
        assert ml_contour(1.0, 1, -1.0) == pytest.approx(math.exp(-1.0), abs=1e-9)

    def test_half_order_closed_form(self):
        # E_{1/2,1}(-x) = e^(x^2) erfc(x) at x = 1
        want = math.exp(1.0) * math.erfc(1.0)
        assert ml_contour(0.5, 1, -1.0) == pytest.approx(want, abs=1e-8)

    def test_frozen_regression_value(self):
        assert ml_contour(0.5, 1, -3.0) == pytest.approx(
            0.17900115118139115, abs=1e-12
        )

    def test_beta_two_against_series(self):
        assert ml_contour(1.5, 2, -1.0) == pytest.approx(
            ml_series(1.5, 2.0, -1.0), abs=1e-8
        )

    def test_guards(self):
        with pytest.raises(ValueError):
            ml_contour(0.5, 1, 1.0)
        with pytest.raises(ValueError):
            ml_contour(0.5, 3, -1.0)
        with pytest.raises(ValueError):
            ml_contour(0.5, 2, -1.0)  # first-derivative kernel needs alpha > 1

    def test_array_route_matches_scalar(self):
        xs = np.array([0.5, 1.0, 2.5])
        got = ml_contour_array(0.7, 1, xs)
        for x, val in zip(xs, got):
            assert val == pytest.approx(ml_contour(0.7, 1, -float(x)), abs=1e-13)


class TestDispatcher:
    def test_series_region(self):
        assert ml(1.0, 1.0, -1.5) == pytest.approx(math.exp(-1.5), abs=1e-10)

    def test_contour_region(self):
        assert ml(1.0, 1.0, -4.0) == pytest.approx(math.exp(-4.0), abs=1e-9)

    def test_positive_large_rejected(self):
        with pytest.raises(ValueError):
            ml(0.5, 1.0, 2.5)

    def test_noninteger_beta_far_left_rejected(self):
        with pytest.raises(ValueError):
            ml(0.5, 1.5, -3.0)

    def test_continuity_at_handoff(self):
        # the series/contour boundary sits at |z| = 2
        for alpha in (0.4, 0.9, 1.3, 1.8):
            lo = ml(alpha, 1.0, -2.0 + 1e-9)
            hi = ml(alpha, 1.0, -2.0 - 1e-9)
            assert abs(lo - hi) <= 1e-8

    def test_triangle_series_vs_contour(self):
        # both routes cover [-2, -0.5]; they were derived independently
        zs = np.linspace(-2.0, -0.5, 25)
        cases = [(a, 1) for a in (0.3, 0.7, 1.0, 1.4, 1.9)]
        cases += [(a, 2) for a in (1.4, 1.9)]
        for alpha, beta in cases:
            contour_vals = ml_contour_array(alpha, beta, -zs)
            series_vals = [ml_series(alpha, float(beta), float(z)) for z in zs]
            worst = float(np.max(np.abs(contour_vals - np.array(series_vals))))
            assert worst <= 1e-8, (alpha, beta, worst)

    def test_array_matches_scalar_dispatch(self):
        zs = np.array([-4.0, -2.0, -0.3, 0.0, 1.0])
        got = ml_array(0.8, 1.0, zs)
        want = [ml(0.8, 1.0, float(z)) for z in zs]
        assert np.allclose(got, want, atol=1e-13)


class TestIdentities:
    def test_recurrence_in_beta(self):
        # E_{a,b}(z) = z*E_{a,a+b}(z) + 1/Gamma(b) on the series region
        for alpha in (0.3, 0.7, 1.0, 1.4, 1.9):
            for beta in (1.0, 2.0):
                for z in np.linspace(-2.0, -0.5, 9):
                    lhs = ml(alpha, beta, float(z))
                    rhs = z * ml_series(alpha, alpha + beta, float(z)) + 1.0 / gamma_real(beta)
                    assert abs(lhs - rhs) <= 1e-8

    def test_complete_monotonicity(self):
        # for alpha <= 1 the kernel E_alpha(-t^alpha) decreases from 1 to 0
        t = np.linspace(0.0, 3.0, 100)
        vals = ml_array(0.5, 1.0, -t ** 0.5)
        assert vals[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(np.diff(vals) <= 1e-10)
        assert np.all(vals > 0.0)


@given(
    st.floats(min_value=0.3, max_value=1.9),
    st.floats(min_value=-2.0, max_value=0.0),
)
@settings(max_examples=50, deadline=None)
def test_series_recurrence_property(alpha, z):
    lhs = ml_series(alpha, 1.0, z)
    rhs = z * ml_series(alpha, alpha + 1.0, z) + 1.0
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
