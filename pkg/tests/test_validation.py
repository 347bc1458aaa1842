"""Simulation-vs-closed-form validation reports and their standard errors."""

from __future__ import annotations

import math

import pytest

from annuityrisk import (
    MarketParams,
    SimConfig,
    exact_standard_errors,
    payment_factor_mean,
    payment_factor_moment,
    payment_factor_second_moment,
    validate_closed_forms,
)

QUANTITIES = ("m1", "m2", "risk_unit_payment", "risk_unit_price")


class TestExactStandardErrors:
    def test_matches_the_moment_formulas(self):
        params = MarketParams(r=0.05, sigma=0.2)
        T, n = 20.0, 250_000
        m1 = payment_factor_mean(params, T)
        m2 = payment_factor_second_moment(params, T)
        m3 = payment_factor_moment(params, T, 3)
        m4 = payment_factor_moment(params, T, 4)
        se = exact_standard_errors(params, T, n)
        assert se["m1"] == pytest.approx(math.sqrt((m2 - m1 * m1) / n), rel=1e-12)
        assert se["m2"] == pytest.approx(math.sqrt((m4 - m2 * m2) / n), rel=1e-12)
        mu4 = m4 - 4 * m1 * m3 + 6 * m1 * m1 * m2 - 3 * m1**4
        mu2 = m2 - m1 * m1
        assert se["risk_unit_payment"] == pytest.approx(
            math.sqrt((mu4 - mu2 * mu2) / n), rel=1e-12
        )
        u = m1 / m2
        ex = 1.0 - m1 * m1 / m2
        ex2 = 1.0 - 4 * u * m1 + 6 * u * u * m2 - 4 * u**3 * m3 + u**4 * m4
        assert se["risk_unit_price"] == pytest.approx(
            math.sqrt((ex2 - ex * ex) / n), rel=1e-12
        )

    def test_all_zero_when_sigma_is_zero(self):
        se = exact_standard_errors(MarketParams(r=0.08, sigma=0.0), 15.0, 1000)
        assert se == {q: 0.0 for q in QUANTITIES}

    def test_shrinks_with_the_square_root_of_the_path_count(self):
        params = MarketParams(r=0.02, sigma=0.3)
        a = exact_standard_errors(params, 10.0, 10_000)
        b = exact_standard_errors(params, 10.0, 40_000)
        for q in QUANTITIES:
            assert a[q] == pytest.approx(2.0 * b[q], rel=1e-12)


class TestValidationReport:
    def test_moderate_parameters_agree(self):
        report = validate_closed_forms(
            MarketParams(r=0.05, sigma=0.2),
            [5.0, 20.0],
            SimConfig(n_paths=50_000, n_steps=25, seed=314),
        )
        assert report.passed
        assert report.max_abs_z < 3.0
        assert {row.quantity for row in report.rows} == set(QUANTITIES)
        assert all(row.std_error > 0.0 for row in report.rows)
        assert len(report.rows) == 8

    def test_heavy_tailed_cell_stays_calibrated(self):
        # at sigma = 0.4, T = 40 the m2 estimator misses the rare paths that
        # carry most of E[J^2]: the estimate lands far below the closed form,
        # but the exact standard error knows that and the z-score stays tiny
        report = validate_closed_forms(
            MarketParams(r=0.1, sigma=0.4),
            [40.0],
            SimConfig(n_paths=20_000, n_steps=20, seed=5),
        )
        assert report.passed
        m2_row = next(row for row in report.rows if row.quantity == "m2")
        assert m2_row.estimate < m2_row.closed_form
        assert abs(m2_row.estimate - m2_row.closed_form) > 0.05 * m2_row.closed_form
        assert abs(m2_row.z_score) < 0.1

    def test_deterministic_run_is_compared_at_fixed_tolerance(self):
        # sigma = 0: every path is identical, standard errors are exactly 0,
        # and the Richardson residual must sit inside 1e-9 relative
        report = validate_closed_forms(
            MarketParams(r=0.05, sigma=0.0),
            [20.0],
            SimConfig(n_paths=2, n_steps=100, seed=0),
        )
        assert report.passed
        assert all(row.std_error == 0.0 for row in report.rows)
        assert all(row.z_score == 0.0 for row in report.rows)

    def test_coarse_deterministic_run_fails_with_infinite_z(self):
        # one step per year at r = 0.3 leaves a discretization residual far
        # above the zero-standard-error tolerance
        report = validate_closed_forms(
            MarketParams(r=0.3, sigma=0.0),
            [20.0],
            SimConfig(n_paths=2, n_steps=1, seed=0),
        )
        assert not report.passed
        assert math.isinf(report.max_abs_z)

    def test_single_horizon_may_be_passed_as_a_scalar(self):
        report = validate_closed_forms(
            MarketParams(r=0.05, sigma=0.2),
            5.0,
            SimConfig(n_paths=4096, n_steps=20, seed=9),
        )
        assert [row.horizon for row in report.rows] == [5.0] * 4
