"""Risk-minimizing annuity quotes, spread diagnostics, and implied volatility.

Both quoting problems minimize the mean-square hedging error
E|a - u J(T)|^2: ``price_given_payment`` chooses the lump sum a for a fixed
payment rate u, ``payment_given_price`` chooses u for a fixed a.  Under any
horizon or return uncertainty the two optima are not inverses of each other;
``spread`` measures the gap.
"""

from __future__ import annotations

import math

from scipy.optimize import brentq

from .closed_forms import (
    payment_factor_mean,
    payment_factor_second_moment,
)
from .errors import InputError, InversionError
from .quadrature import adaptive_simpson
from .types import (
    DensityHorizon,
    DiscountMoments,
    FixedHorizon,
    MarketParams,
    Problem,
    Quote,
    SpreadReport,
    as_density,
)

# Relative tolerance target for integrating closed-form moments against a
# tabulated horizon density (per bin; bin errors add in the same sign).
_DENSITY_QUAD_REL_TOL = 1e-9

# An implied-volatility solution must reproduce the quoted amount this well.
_IMPLIED_REL_TOL = 1e-9


def discount_moments(params: MarketParams, horizon) -> DiscountMoments:
    """Moments of J(T) for a fixed or random horizon.

    Fixed horizons use the closed forms.  Random horizons (tabulated density
    or anything exposing ``to_density()``) integrate the closed forms against
    the density, which is valid because the horizon is assumed independent of
    the market noise.
    """
    if isinstance(horizon, FixedHorizon):
        m1 = payment_factor_mean(params, horizon.T)
        m2 = payment_factor_second_moment(params, horizon.T)
        return DiscountMoments(m1, m2)
    density = as_density(horizon)
    m1 = _integrate_against_density(density, lambda t: payment_factor_mean(params, t))
    m2 = _integrate_against_density(
        density, lambda t: payment_factor_second_moment(params, t)
    )
    return DiscountMoments(m1, m2)


def _integrate_against_density(density: DensityHorizon, func) -> float:
    """Integral of func(t) * density(t) over the bounded support.

    The density is piecewise constant, so each bin contributes its level
    times the adaptive-Simpson integral of the smooth func over the bin.
    """
    def f(t: float) -> float:
        # Both moments vanish continuously as the term shrinks to nothing.
        return 0.0 if t <= 0.0 else func(t)

    edges = density.t_edges
    total = 0.0
    for k, level in enumerate(density.pdf):
        if level == 0.0:
            continue
        piece, _ = adaptive_simpson(
            f, edges[k], edges[k + 1], rel_tol=_DENSITY_QUAD_REL_TOL
        )
        total += level * piece
    return total


def price_given_payment(u: float, m: DiscountMoments) -> Quote:
    """Optimal lump sum for a fixed payment rate u: a = u m1, risk u^2 Var J."""
    if not (isinstance(u, (int, float)) and math.isfinite(u) and u > 0):
        raise InputError(f"payment rate u must be positive and finite, got {u!r}")
    a = u * m.m1
    risk = max(0.0, u * u * m.variance)
    return Quote(Problem.PRICE_GIVEN_PAYMENT, a=a, u=float(u), risk_second_moment=risk)


def payment_given_price(a: float, m: DiscountMoments) -> Quote:
    """Optimal payment rate for a fixed lump sum a: u = a m1/m2, risk a^2 (1 - m1^2/m2)."""
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 0):
        raise InputError(f"price a must be positive and finite, got {a!r}")
    u = a * m.m1 / m.m2
    risk = max(0.0, a * a * (1.0 - m.m1 * m.m1 / m.m2))
    return Quote(Problem.PAYMENT_GIVEN_PRICE, a=float(a), u=u, risk_second_moment=risk)


def spread(a: float, u: float, m: DiscountMoments) -> SpreadReport:
    """Per-dollar payment rates of the two problems and their gap.

    Scale invariance makes the report independent of a and u; they are
    accepted (and validated) to mirror the quoting calls being compared.
    """
    if not (isinstance(a, (int, float)) and math.isfinite(a) and a > 0):
        raise InputError(f"price a must be positive and finite, got {a!r}")
    if not (isinstance(u, (int, float)) and math.isfinite(u) and u > 0):
        raise InputError(f"payment rate u must be positive and finite, got {u!r}")
    u_hat_over_a = m.m1 / m.m2
    u_over_a_hat = 1.0 / m.m1
    return SpreadReport(
        u_hat_over_a=u_hat_over_a,
        u_over_a_hat=u_over_a_hat,
        # nonnegative by Jensen; clip the 1-ulp dip of the deterministic case
        difference=max(0.0, u_over_a_hat - u_hat_over_a),
        ratio=m.m1 * m.m1 / m.m2,
    )


def implied_sigma(quote: Quote, r: float, T: float, sigma_max: float = 2.0) -> float:
    """Volatility under which re-pricing the quote's input reproduces its output.

    The residual is monotone in sigma for both problems (the optimal price
    rises with volatility, the optimal payment rate falls); monotonicity is
    verified numerically on the bracket [0, sigma_max] before root finding.
    """
    if not (math.isfinite(r) and r >= 0):
        raise InputError(f"r must be nonnegative and finite, got {r!r}")
    if not (math.isfinite(T) and T > 0):
        raise InputError(f"T must be positive and finite, got {T!r}")
    if not (math.isfinite(sigma_max) and sigma_max > 0):
        raise InputError(f"sigma_max must be positive, got {sigma_max!r}")

    if quote.problem is Problem.PRICE_GIVEN_PAYMENT:
        target, scale = quote.a, abs(quote.a)

        def residual(sig: float) -> float:
            m = discount_moments(MarketParams(r, sig), FixedHorizon(T))
            return quote.u * m.m1 - target

    else:
        target, scale = quote.u, abs(quote.u)

        def residual(sig: float) -> float:
            m = discount_moments(MarketParams(r, sig), FixedHorizon(T))
            return quote.a * m.m1 / m.m2 - target

    tol = _IMPLIED_REL_TOL * scale
    f_lo = residual(0.0)
    if abs(f_lo) <= tol:
        return 0.0
    f_hi = residual(sigma_max)
    if abs(f_hi) <= tol:
        return sigma_max
    if (f_lo < 0) == (f_hi < 0):
        raise InversionError(
            "no volatility in [0, "
            f"{sigma_max}] reproduces the quote: residual {f_lo:.6g} at sigma=0, "
            f"{f_hi:.6g} at sigma={sigma_max}"
        )

    _check_monotone_residual(residual, sigma_max, scale)
    root = brentq(residual, 0.0, sigma_max, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    achieved = residual(root)
    if abs(achieved) > tol:
        raise InversionError(
            f"root search stalled: residual {achieved:.6g} at sigma={root!r} "
            f"exceeds tolerance {tol:.6g}"
        )
    return float(root)


def _check_monotone_residual(residual, sigma_max: float, scale: float) -> None:
    # 9 interior samples; tiny wiggles at floating-point scale are tolerated.
    samples = [residual(sigma_max * k / 10.0) for k in range(11)]
    slack = 1e-13 * max(scale, 1.0)
    increasing = all(b - a >= -slack for a, b in zip(samples, samples[1:]))
    decreasing = all(b - a <= slack for a, b in zip(samples, samples[1:]))
    if not (increasing or decreasing):
        raise InversionError(
            "pricing residual is not monotone on [0, "
            f"{sigma_max}]; cannot invert reliably"
        )
