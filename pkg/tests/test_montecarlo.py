"""Simulation engine: determinism, statistical agreement, discretization."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.stats import kstest

from annuityrisk import (
    DensityHorizon,
    FixedHorizon,
    InputError,
    MarketParams,
    Schedule,
    SimConfig,
    SimulationError,
    discount_moments,
    growth_integral,
    hedging_error_distribution,
    payment_factor_mean,
    payment_given_price,
    sample_horizon,
    simulate_payment_factor,
    simulate_payment_factor_richardson,
)

CANONICAL = MarketParams(r=0.05, sigma=0.2)
SCHED = Schedule.constant(0.05, 0.2)


def z_of(estimate, reference, std_error):
    return (estimate - reference) / std_error


class TestConfigValidation:
    def test_rejects_degenerate_configs(self):
        with pytest.raises(InputError):
            SimConfig(n_paths=1, n_steps=10, seed=0)
        with pytest.raises(InputError):
            SimConfig(n_paths=100, n_steps=0, seed=0)
        with pytest.raises(InputError):
            SimConfig(n_paths=101, n_steps=10, seed=0, antithetic=True)

    def test_schedule_validation(self):
        with pytest.raises(InputError):
            Schedule(breakpoints=(5.0,), r_values=(0.05,), sigma_values=(0.2,))
        with pytest.raises(InputError):
            Schedule(breakpoints=(5.0, 5.0), r_values=(0.05,) * 3,
                     sigma_values=(0.2,) * 3)
        with pytest.raises(InputError):
            Schedule(breakpoints=(-1.0,), r_values=(0.05, 0.05),
                     sigma_values=(0.2, 0.2))
        with pytest.raises(InputError):
            Schedule(breakpoints=(), r_values=(0.05,), sigma_values=(-0.2,))


class TestScheduleIntegrals:
    def test_piecewise_integrals_are_exact(self):
        sched = Schedule(
            breakpoints=(1.0, 2.5),
            r_values=(0.05, 0.03, 0.07),
            sigma_values=(0.2, 0.1, 0.3),
        )
        drift, var = sched.drift_and_var(np.array([0.5]), np.array([3.0]))
        expected_drift = (
            0.5 * (0.05 - 0.02) + 1.5 * (0.03 - 0.005) + 0.5 * (0.07 - 0.045)
        )
        expected_var = 0.5 * 0.04 + 1.5 * 0.01 + 0.5 * 0.09
        assert math.isclose(float(drift[0]), expected_drift, rel_tol=1e-14)
        assert math.isclose(float(var[0]), expected_var, rel_tol=1e-14)

    def test_constant_schedule_matches_plain_products(self):
        drift, var = SCHED.drift_and_var(2.0, 7.5)
        assert math.isclose(float(drift), 5.5 * (0.05 - 0.02), rel_tol=1e-14)
        assert math.isclose(float(var), 5.5 * 0.04, rel_tol=1e-14)


class TestDeterminism:
    def test_identical_configs_are_bit_identical(self):
        cfg = SimConfig(n_paths=20_000, n_steps=20, seed=123)
        one = simulate_payment_factor(SCHED, FixedHorizon(3.0), cfg)
        two = simulate_payment_factor(SCHED, FixedHorizon(3.0), cfg)
        assert one == two

    def test_seed_changes_the_estimate(self):
        a = simulate_payment_factor(
            SCHED, FixedHorizon(3.0), SimConfig(20_000, 20, seed=1)
        )
        b = simulate_payment_factor(
            SCHED, FixedHorizon(3.0), SimConfig(20_000, 20, seed=2)
        )
        assert a.mean != b.mean

    def test_multi_block_runs_are_reproducible(self):
        # crosses the internal block boundary
        cfg = SimConfig(n_paths=70_000, n_steps=10, seed=9)
        one = simulate_payment_factor(SCHED, FixedHorizon(2.0), cfg)
        two = simulate_payment_factor(SCHED, FixedHorizon(2.0), cfg)
        assert one == two
        ref = payment_factor_mean(CANONICAL, 2.0)
        assert abs(z_of(one.mean, ref, one.std_error_mean)) < 4


class TestAgainstClosedForms:
    def test_fixed_horizon_moments_within_three_standard_errors(self):
        cfg = SimConfig(n_paths=200_000, n_steps=50, seed=7)
        est = simulate_payment_factor(SCHED, FixedHorizon(5.0), cfg)
        m = discount_moments(CANONICAL, FixedHorizon(5.0))
        assert abs(z_of(est.mean, m.m1, est.std_error_mean)) < 3
        assert abs(z_of(est.second_moment, m.m2, est.std_error_second_moment)) < 3
        assert est.n_paths == 200_000
        assert est.variance > 0

    def test_noninteger_step_count_horizon(self):
        cfg = SimConfig(n_paths=50_000, n_steps=10, seed=21)
        est = simulate_payment_factor(SCHED, FixedHorizon(2.34), cfg)
        ref = payment_factor_mean(CANONICAL, 2.34)
        assert abs(z_of(est.mean, ref, est.std_error_mean)) < 3

    def test_horizon_shorter_than_one_step(self):
        sched = Schedule.constant(0.05, 0.0)
        est = simulate_payment_factor(
            sched, FixedHorizon(0.03), SimConfig(n_paths=2, n_steps=1, seed=0)
        )
        ref = payment_factor_mean(MarketParams(0.05, 0.0), 0.03)
        assert math.isclose(est.mean, ref, rel_tol=1e-6)

    def test_antithetic_reduces_the_standard_error(self):
        plain = simulate_payment_factor(
            SCHED, FixedHorizon(5.0), SimConfig(100_000, 25, seed=7)
        )
        anti = simulate_payment_factor(
            SCHED, FixedHorizon(5.0), SimConfig(100_000, 25, seed=7, antithetic=True)
        )
        assert anti.std_error_mean < plain.std_error_mean
        ref = payment_factor_mean(CANONICAL, 5.0)
        assert abs(z_of(anti.mean, ref, anti.std_error_mean)) < 3


class TestDeterministicDiscretization:
    def test_error_stays_under_the_trapezoid_bound(self):
        # sigma = 0: every path equals the trapezoid sum of e^{-rt}, whose
        # composite error is bounded by (h^2/12) r^2 E J
        r, T, n = 0.05, 20.0, 100
        sched = Schedule.constant(r, 0.0)
        est = simulate_payment_factor(
            sched, FixedHorizon(T), SimConfig(n_paths=2, n_steps=n, seed=0)
        )
        ref = payment_factor_mean(MarketParams(r, 0.0), T)
        bound = (1.0 / n) ** 2 / 12.0 * r * r * ref
        assert est.variance == 0.0
        assert abs(est.mean - ref) <= 1.01 * bound

    def test_halving_the_step_quarters_the_error(self):
        r, T = 0.3, 10.0
        sched = Schedule.constant(r, 0.0)
        ref = payment_factor_mean(MarketParams(r, 0.0), T)
        errors = []
        for n in (25, 50):
            est = simulate_payment_factor(
                sched, FixedHorizon(T), SimConfig(n_paths=2, n_steps=n, seed=0)
            )
            errors.append(abs(est.mean - ref))
        assert errors[0] / errors[1] > 3.5


class TestRandomHorizons:
    def test_uniform_horizon_matches_density_moments(self):
        density = DensityHorizon.uniform(8.0, 16.0)
        cfg = SimConfig(n_paths=100_000, n_steps=25, seed=11)
        est = simulate_payment_factor(SCHED, density, cfg)
        m = discount_moments(CANONICAL, density)
        assert abs(z_of(est.mean, m.m1, est.std_error_mean)) < 3
        assert abs(z_of(est.second_moment, m.m2, est.std_error_second_moment)) < 3

    def test_point_mass_equals_the_fixed_horizon(self):
        # different sampling paths, so compare both against the closed form
        cfg = SimConfig(n_paths=20_000, n_steps=20, seed=4)
        at_point = simulate_payment_factor(
            SCHED, DensityHorizon.point_mass(5.0), cfg
        )
        fixed = simulate_payment_factor(SCHED, FixedHorizon(5.0), cfg)
        ref = payment_factor_mean(CANONICAL, 5.0)
        assert abs(z_of(at_point.mean, ref, at_point.std_error_mean)) < 3
        assert abs(z_of(fixed.mean, ref, fixed.std_error_mean)) < 3

    def test_antithetic_pairs_share_their_horizon(self):
        density = DensityHorizon.uniform(8.0, 16.0)
        cfg = SimConfig(n_paths=100_000, n_steps=25, seed=11, antithetic=True)
        est = simulate_payment_factor(SCHED, density, cfg)
        m = discount_moments(CANONICAL, density)
        assert abs(z_of(est.mean, m.m1, est.std_error_mean)) < 3


class TestScheduleSimulation:
    def test_two_segment_deterministic_run_matches_the_analytic_value(self):
        # rate drops from 5% to 2% at t = 7.35, off the step grid on purpose
        r1, r2, brk, T = 0.05, 0.02, 7.35, 12.0
        sched = Schedule(breakpoints=(brk,), r_values=(r1, r2),
                         sigma_values=(0.0, 0.0))
        est = simulate_payment_factor(
            sched, FixedHorizon(T), SimConfig(n_paths=2, n_steps=40, seed=0)
        )
        analytic = growth_integral(-r1, brk) + math.exp(-r1 * brk) * growth_integral(
            -r2, T - brk
        )
        assert abs(est.mean - analytic) < 1e-5

    def test_stochastic_two_segment_run_is_consistent(self):
        # both segments share (r, sigma), so the schedule must reproduce the
        # constant-parameter closed forms
        sched = Schedule(breakpoints=(2.0,), r_values=(0.05, 0.05),
                         sigma_values=(0.2, 0.2))
        cfg = SimConfig(n_paths=100_000, n_steps=25, seed=17)
        est = simulate_payment_factor(sched, FixedHorizon(5.0), cfg)
        ref = simulate_payment_factor(SCHED, FixedHorizon(5.0), cfg)
        # same stream; step parameters agree to a rounding of the integrals
        assert math.isclose(est.mean, ref.mean, rel_tol=1e-12)
        assert math.isclose(est.second_moment, ref.second_moment, rel_tol=1e-12)


class TestRichardson:
    def test_extrapolation_cancels_the_quadratic_bias(self):
        r, T = 0.3, 10.0
        sched = Schedule.constant(r, 0.0)
        ref = payment_factor_mean(MarketParams(r, 0.0), T)
        [rich] = simulate_payment_factor_richardson(
            sched, [T], SimConfig(n_paths=2, n_steps=4, seed=0)
        )
        coarse_err = abs(rich.coarse.mean - ref)
        fine_err = abs(rich.fine.mean - ref)
        extrap_err = abs(rich.extrapolated.mean - ref)
        assert 3.5 < coarse_err / fine_err < 4.5
        assert extrap_err < coarse_err / 50.0
        assert rich.n_steps_coarse == 4
        assert rich.n_steps_fine == 8

    def test_checkpoints_agree_with_closed_forms(self):
        cfg = SimConfig(n_paths=100_000, n_steps=50, seed=3)
        estimates = simulate_payment_factor_richardson(SCHED, [5.0, 10.0], cfg)
        for rich in estimates:
            m = discount_moments(CANONICAL, FixedHorizon(rich.horizon))
            est = rich.extrapolated
            assert abs(z_of(est.mean, m.m1, est.std_error_mean)) < 3
            assert abs(z_of(est.second_moment, m.m2, est.std_error_second_moment)) < 3

    def test_grid_alignment_is_required(self):
        cfg = SimConfig(n_paths=100, n_steps=10, seed=0)
        with pytest.raises(InputError):
            simulate_payment_factor_richardson(SCHED, [5.03], cfg)
        with pytest.raises(InputError):
            simulate_payment_factor_richardson(SCHED, [10.0, 5.0], cfg)
        with pytest.raises(InputError):
            simulate_payment_factor_richardson(
                SCHED, [5.0], SimConfig(100, 10, seed=0, antithetic=True)
            )


class TestFailureDetection:
    def test_overflowing_volatility_names_the_step(self):
        sched = Schedule.constant(0.0, 300.0)
        with pytest.raises(SimulationError, match="step 1"):
            simulate_payment_factor(
                sched, FixedHorizon(2.0), SimConfig(n_paths=100, n_steps=1, seed=0)
            )


class TestHorizonSampling:
    def test_point_mass_draws_sit_on_the_point(self):
        draws = sample_horizon(DensityHorizon.point_mass(12.0), seed=1, size=1000)
        assert np.all(np.abs(draws - 12.0) <= 5e-7)

    def test_uniform_draws_match_their_distribution(self):
        draws = sample_horizon(DensityHorizon.uniform(10.0, 30.0), seed=2,
                               size=100_000)
        assert abs(draws.mean() - 20.0) < 0.1
        stat = kstest(draws, "uniform", args=(10.0, 20.0)).statistic
        assert stat < 0.01

    def test_scalar_draw(self):
        value = sample_horizon(DensityHorizon.uniform(10.0, 30.0), seed=3)
        assert isinstance(value, float)
        assert 10.0 <= value <= 30.0

    def test_draws_are_seed_deterministic(self):
        d1 = sample_horizon(DensityHorizon.uniform(0.5, 2.0), seed=5, size=64)
        d2 = sample_horizon(DensityHorizon.uniform(0.5, 2.0), seed=5, size=64)
        assert np.array_equal(d1, d2)

    def test_fixed_horizon_cannot_be_sampled(self):
        with pytest.raises(InputError):
            sample_horizon(FixedHorizon(5.0), seed=0)


class TestHedgingErrorDistribution:
    def test_moments_and_quantiles_are_consistent(self):
        m = discount_moments(CANONICAL, FixedHorizon(5.0))
        quote = payment_given_price(1000.0, m)
        cfg = SimConfig(n_paths=100_000, n_steps=25, seed=13)
        dist = hedging_error_distribution(
            quote.a, quote.u, SCHED, FixedHorizon(5.0), cfg
        )
        # sample identity: E[e^2] = mean^2 + (n-1)/n var
        n = dist.n_paths
        assert math.isclose(
            dist.second_moment,
            dist.mean**2 + dist.variance * (n - 1) / n,
            rel_tol=1e-9,
        )
        z = z_of(dist.second_moment, quote.risk_second_moment,
                 dist.std_error_second_moment)
        assert abs(z) < 3
        levels = sorted(dist.quantiles)
        values = [dist.quantiles[q] for q in levels]
        assert values == sorted(values)
        assert levels[0] == 0.01 and levels[-1] == 0.99

    def test_validates_the_quote_amounts(self):
        cfg = SimConfig(n_paths=100, n_steps=5, seed=0)
        with pytest.raises(InputError):
            hedging_error_distribution(-1.0, 1.0, SCHED, FixedHorizon(1.0), cfg)
        with pytest.raises(InputError):
            hedging_error_distribution(1.0, 0.0, SCHED, FixedHorizon(1.0), cfg)
