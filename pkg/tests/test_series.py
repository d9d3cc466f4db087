"""Tests for the sine-series reference solutions and manufactured pairs."""

import numpy as np
import pytest
import sympy as sp

from sobspec.series import (
    SineSeriesSolution,
    TruncationBudgetError,
    builtin_series,
    decay_rate,
    manufactured_problem1,
    manufactured_problem2,
    pq_coefficients,
    pulse_coefficients,
    sine_coefficients_numeric,
    tent_coefficients,
)

# evaluation points kept away from the kinks at 0 and +-1/2 and from the
# endpoints, where partial sums of the unsplit series converge slowest
OFFSET_GRID = -0.997 + 0.0198 * np.arange(101)


class TestDecayRate:
    def test_first_mode_value(self):
        lam = -((np.pi / 2.0) ** 2)
        assert np.isclose(decay_rate(1, 1.0, 1.0), lam / (1.0 - lam), rtol=1e-15)
        assert np.isclose(decay_rate(1, 1.0, 1.0), -0.711601, atol=1e-6)

    def test_without_smoothing_reduces_to_heat_rates(self):
        n = np.arange(1, 10, dtype=float)
        lam = -((n * np.pi / 2.0) ** 2)
        assert np.allclose(decay_rate(n, 0.0, 2.0), 2.0 * lam, atol=0)

    def test_rates_decrease_but_stay_above_the_limit(self):
        n = np.arange(1, 1001, dtype=float)
        rates = decay_rate(n, 2.0, 3.0)
        assert np.all(np.diff(rates) < 0)
        assert np.all(rates > -3.0 / 2.0)

    def test_high_mode_limit(self):
        assert np.isclose(decay_rate(1e6, 2.0, 3.0), -1.5, rtol=1e-10)


class TestCoefficients:
    def test_pulse_values(self):
        assert np.isclose(pulse_coefficients(1), 2.0 * np.sqrt(2.0) / np.pi, rtol=1e-15)
        assert np.isclose(pulse_coefficients(1), 0.900316, atol=1e-6)
        assert abs(pulse_coefficients(2)) < 1e-16
        assert abs(pulse_coefficients(4)) < 1e-16

    def test_tent_values(self):
        assert np.isclose(tent_coefficients(1), 8.0 / np.pi**2, rtol=1e-15)
        assert tent_coefficients(2) == 0.0
        assert np.isclose(tent_coefficients(3), -8.0 / (9.0 * np.pi**2), rtol=1e-15)
        assert np.isclose(tent_coefficients(5), 8.0 / (25.0 * np.pi**2), rtol=1e-15)

    def test_piecewise_quadratic_values(self):
        assert np.isclose(pq_coefficients(1), 32.0 / np.pi**3, rtol=1e-15)
        assert np.isclose(pq_coefficients(2), -16.0 / np.pi**3, rtol=1e-15)

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 12, 25])
    def test_closed_forms_match_quadrature(self, n):
        def pulse(x):
            return np.where(np.abs(np.asarray(x, dtype=float)) <= 0.5, 1.0, 0.0)

        def tent(x):
            return 1.0 - np.abs(np.asarray(x, dtype=float))

        def pq(x):
            x = np.asarray(x, dtype=float)
            return np.where(x <= 0, 1 + 2 * x + x**2, 1 + 2 * x - 3 * x**2)

        assert np.isclose(pulse_coefficients(n),
                          sine_coefficients_numeric(pulse, n, kinks=(-0.5, 0.5)),
                          atol=1e-12)
        assert np.isclose(tent_coefficients(n),
                          sine_coefficients_numeric(tent, n, kinks=(0.0,)),
                          atol=1e-12)
        assert np.isclose(pq_coefficients(n),
                          sine_coefficients_numeric(pq, n, kinks=(0.0,)),
                          atol=1e-12)

    def test_sine_modes_are_orthonormal(self):
        # the numeric coefficients of the third mode are the unit vector e_3
        mode3 = lambda x: np.sin(3.0 * np.pi * (np.asarray(x, dtype=float) + 1.0) / 2.0)
        got = sine_coefficients_numeric(mode3, np.arange(1, 7))
        assert np.allclose(got, [0, 0, 1, 0, 0, 0], atol=1e-12)


class TestSeriesEval:
    def test_time_zero_returns_the_datum(self):
        series = builtin_series("tent")
        x = np.linspace(-1, 1, 41)
        assert np.array_equal(series.eval(x, 0.0), 1.0 - np.abs(x))

    def test_pulse_datum_uses_the_midpoint_convention(self):
        series = builtin_series("square_pulse")
        assert series.eval(0.5, 0.0) == 0.5
        assert series.eval(-0.5, 0.0) == 0.5
        assert series.eval(0.0, 0.0) == 1.0

    def test_single_mode_evolves_by_its_decay_rate(self):
        series = SineSeriesSolution(
            coefficients=lambda n: np.where(n == 1.0, 1.0, 0.0),
            v0=lambda x: np.sin(np.pi * (np.asarray(x, dtype=float) + 1.0) / 2.0),
            v0_deriv=lambda x: (np.pi / 2.0) * np.cos(np.pi * (np.asarray(x, dtype=float) + 1.0) / 2.0),
            envelope=(1.0, 3))
        x = np.linspace(-1, 1, 21)
        for t in (0.25, 1.0):
            amp = np.exp(decay_rate(1, 1.0, 1.0) * t)
            exact = amp * np.sin(np.pi * (x + 1.0) / 2.0)
            exact_d = amp * (np.pi / 2.0) * np.cos(np.pi * (x + 1.0) / 2.0)
            assert np.allclose(series.eval(x, t), exact, atol=1e-12)
            assert np.allclose(series.eval(x, t, deriv=True), exact_d, atol=1e-12)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            builtin_series("tent").eval(0.0, -0.1)

    def test_derivative_needs_the_datum_slope(self):
        series = SineSeriesSolution(coefficients=lambda n: np.zeros_like(n),
                                    v0=lambda x: np.zeros_like(np.asarray(x)))
        with pytest.raises(ValueError, match="v0_deriv"):
            series.eval(0.0, 0.5, deriv=True)

    def test_term_budget_overflow_raises(self):
        series = builtin_series("square_pulse", n_max=1000)
        with pytest.raises(TruncationBudgetError):
            series.eval(0.3, 0.5)

    def test_scalar_in_scalar_out(self):
        assert isinstance(builtin_series("tent").eval(0.2, 0.5), float)

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            builtin_series("gaussian")


class TestSeriesAgainstPartialSums:
    """Independent check of the tail-split evaluator against raw partial sums.

    The unsplit partial sums converge O(1/M) in the worst case (jump data at
    the kinks), but on the offset grid the oscillatory tails cancel: tent and
    piecewise-quadratic sums are converged at one million terms, while the
    pulse needs one Richardson step (its residual scales as exactly 1/M, so
    2 S_{2M} - S_M removes the leading term).
    """

    @pytest.mark.parametrize("t", [0.1, 1.0])
    def test_tent_matches_million_term_sum(self, t):
        series = builtin_series("tent")
        brute = series.brute_force(OFFSET_GRID, t, 10**6)
        assert np.max(np.abs(series.eval(OFFSET_GRID, t) - brute)) <= 1e-8

    @pytest.mark.parametrize("t", [0.1, 1.0])
    def test_piecewise_quadratic_matches_million_term_sum(self, t):
        series = builtin_series("piecewise_quadratic")
        brute = series.brute_force(OFFSET_GRID, t, 10**6)
        assert np.max(np.abs(series.eval(OFFSET_GRID, t) - brute)) <= 1e-8

    @pytest.mark.parametrize("t", [0.1, 1.0])
    def test_pulse_matches_extrapolated_sum(self, t):
        series = builtin_series("square_pulse")
        s_half = series.brute_force(OFFSET_GRID, t, 500_000)
        s_full = series.brute_force(OFFSET_GRID, t, 1_000_000)
        extrapolated = 2.0 * s_full - s_half
        assert np.max(np.abs(series.eval(OFFSET_GRID, t) - extrapolated)) <= 1e-8

    def test_pulse_partial_sum_residual_halves_with_doubled_terms(self):
        # confirms the 1/M residual law the extrapolation above relies on
        series = builtin_series("square_pulse")
        sums = [series.brute_force(0.0, 1.0, M) for M in (10**6, 2 * 10**6, 4 * 10**6)]
        d1 = sums[1] - sums[0]
        d2 = sums[2] - sums[1]
        assert 1.9 <= d1 / d2 <= 2.1

    def test_split_series_terms_gain_two_orders(self):
        # the split-off limit turns O(1/n) pulse terms into O(1/n^3) ones
        n = np.array([9.0, 17.0, 33.0, 65.0])  # modes with equal C_n phase
        d = np.exp(decay_rate(n, 1.0, 1.0) * 1.0) - np.exp(-1.0)
        terms = np.abs(pulse_coefficients(n) * d)
        slope = np.polyfit(np.log(n), np.log(terms), 1)[0]
        assert abs(slope + 3.0) < 0.1


def _random_points(seed, lo, hi, t_hi, count=100):
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, count), rng.uniform(0.0, t_hi, count)


class TestManufacturedSolutions:
    def _residual_oracle(self, u_expr, alpha, beta, gamma):
        # exact source for v_t - a v_xxt + alpha v_x + beta v_xx + gamma (v^2)_x
        x, t = sp.symbols("x t")
        F = (sp.diff(u_expr, t) - sp.diff(u_expr, x, x, t)
             + alpha * sp.diff(u_expr, x) + beta * sp.diff(u_expr, x, x)
             + gamma * sp.diff(u_expr**2, x))
        return (sp.lambdify((x, t), F, "numpy"),
                sp.lambdify((x, t), sp.diff(u_expr, x), "numpy"))

    def test_smooth_pair_source_is_exact(self):
        ms = manufactured_problem1()
        x, t = sp.symbols("x t")
        F_fn, du_fn = self._residual_oracle(sp.exp(-t) * sp.sin(sp.pi * x),
                                            1.0, -1.0, 0.5)
        xs, ts = _random_points(10, -1.0, 1.0, 2.0)
        F_exact = F_fn(xs, ts)
        assert np.all(np.abs(ms.source(xs, ts) - F_exact)
                      <= 1e-10 * np.maximum(1.0, np.abs(F_exact)))
        assert np.allclose(ms.deriv(xs, ts), du_fn(xs, ts), atol=1e-12)

    def test_traveling_pair_source_is_exact(self):
        ms = manufactured_problem2()
        x, t = sp.symbols("x t")
        F_fn, du_fn = self._residual_oracle(sp.sech(x - t), 1.0, -1.0, -0.5)
        xs, ts = _random_points(11, -20.0, 30.0, 10.0)
        F_exact = F_fn(xs, ts)
        assert np.all(np.abs(ms.source(xs, ts) - F_exact)
                      <= 1e-10 * np.maximum(1.0, np.abs(F_exact)))
        assert np.allclose(ms.deriv(xs, ts), du_fn(xs, ts), atol=1e-12)

    def test_smooth_pair_boundary_and_initial_values(self):
        ms = manufactured_problem1()
        for t in (0.0, 0.5, 1.0):
            assert abs(ms.value(-1.0, t)) < 1e-12
            assert abs(ms.value(1.0, t)) < 1e-12
        x = np.linspace(-1, 1, 17)
        assert np.allclose(ms.value(x, 0.0), np.sin(np.pi * x), atol=0)

    def test_traveling_pair_boundary_and_initial_values(self):
        ms = manufactured_problem2()
        for t in (0.0, 5.0, 10.0):
            assert abs(ms.value(-20.0, t)) <= 4.2e-9
        assert abs(ms.value(30.0, 10.0)) <= 4.2e-9
        assert ms.value(3.0, 3.0) == 1.0  # crest rides x = t
        x = np.linspace(-20, 30, 17)
        assert np.allclose(ms.value(x, 0.0), 1.0 / np.cosh(x), atol=0)
