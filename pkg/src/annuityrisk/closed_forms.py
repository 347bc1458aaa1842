"""Closed-form moments of the discounted cumulative payment factor J(T).

J(T) = integral of B(s,0)^-1 over [0, T], where B is the geometric Brownian
return process with drift r and volatility sigma.  Both moments reduce to
combinations of the exponential growth integral g(c, T) = (e^{cT} - 1)/c,
which has removable singularities wherever a rate combination crosses zero.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, InputError
from .quadrature import adaptive_simpson
from .types import MarketParams

# Below this value of |2 sigma^2 - r| * T the closed form for the second
# moment divides two vanishing quantities; switch to direct quadrature of the
# single-integral representation, which stays well conditioned there.
_SECOND_MOMENT_QUAD_THRESHOLD = 1e-6


def growth_integral(rate: float, horizon: float) -> float:
    """Integral of e^{rate * t} for t in [0, horizon]; equals horizon at rate = 0."""
    x = rate * horizon
    if abs(x) < 1e-16:
        # (e^x - 1)/x equals 1 to double precision here, so the integral is
        # the horizon itself.  This also covers rate = 0 and subnormal rates,
        # where dividing expm1(x) by `rate` would quantize the result in
        # steps far above roundoff.
        return horizon
    try:
        return math.expm1(x) / rate
    except OverflowError:
        raise DomainError(
            f"exp overflow in growth integral: rate*T = {x:.6g}"
        ) from None


def payment_factor_mean(params: MarketParams, T: float) -> float:
    """E J(T) for constant coefficients; continuous across r = sigma^2."""
    _check_term(T)
    out = growth_integral(params.sigma * params.sigma - params.r, T)
    if not math.isfinite(out):
        raise DomainError(
            f"non-finite mean: (sigma^2 - r)*T = {(params.sigma**2 - params.r) * T:.6g}"
        )
    return out


def payment_factor_second_moment(params: MarketParams, T: float) -> float:
    """E[J(T)^2] for constant coefficients.

    Continuous across the removable singularities r = 2 sigma^2 and
    2r = 3 sigma^2 (and their interaction with r = sigma^2).  Near
    r = 2 sigma^2 the two-term closed form cancels catastrophically and the
    quadrature route is used instead.
    """
    _check_term(T)
    r = params.r
    s2 = params.sigma * params.sigma
    y = growth_integral(s2 - r, T)
    if s2 == 0.0:
        return y * y  # deterministic discounting: Var J(T) is exactly zero
    beta = 2.0 * s2 - r
    if abs(beta) * T < _SECOND_MOMENT_QUAD_THRESHOLD:
        out = payment_factor_second_moment_by_quadrature(params, T)
    else:
        out = 2.0 * (growth_integral(3.0 * s2 - 2.0 * r, T) - y) / beta
    if not math.isfinite(out):
        raise DomainError(
            f"non-finite second moment: (3 sigma^2 - 2r)*T = {(3 * s2 - 2 * r) * T:.6g}"
        )
    # Jensen guarantees E[J^2] >= (E J)^2; for nearly deterministic parameters
    # the two-term difference cancels to roundoff and can land just below, so
    # clip to the exact lower bound rather than return an impossible value.
    return max(out, y * y)


def payment_factor_moment(params: MarketParams, T: float, order: int) -> float:
    """E[J(T)^order] for constant coefficients, any positive integer order.

    The mixed moments M_{n,k} = E[J^n B(t,0)^{-k}] close under differentiation
    into a constant-coefficient lower-bidiagonal linear system, so one matrix
    exponential yields the moment directly.  Unlike the nested closed forms,
    this route has no removable singularities: confluent rate combinations
    (r = sigma^2, r = 2 sigma^2, ...) are just repeated eigenvalues, which
    expm handles.  Orders 1 and 2 agree with payment_factor_mean and
    payment_factor_second_moment to roundoff; higher orders feed the exact
    standard errors used by simulation validation.
    """
    _check_term(T)
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise InputError(f"moment order must be a positive integer, got {order!r}")
    r = params.r
    s2 = params.sigma * params.sigma
    size = order + 1
    gen = np.zeros((size, size))
    for j in range(size):
        gen[j, j] = (j * (j + 1) / 2.0) * s2 - j * r
        if j < order:
            gen[j, j + 1] = order - j
    # state j is M_{order-j, j}; starts at e_order since J(0) = 0, B(0,0) = 1
    with np.errstate(over="ignore", invalid="ignore"):
        value = float(expm(gen * T)[0, -1])
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(
            f"moment of order {order} overflowed: leading rate*T = "
            f"{gen[-1, -1] * T:.6g}"
        )
    return value


def payment_factor_second_moment_by_quadrature(
    params: MarketParams, T: float, rel_tol: float = 1e-11
) -> float:
    """Reference route for E[J(T)^2]: adaptive quadrature of its single-integral form.

    The integrand 2 e^{(sigma^2 - r) t} g(2 sigma^2 - r, t) contains no
    difference of near-equal terms, so it is singularity-free; this is both
    the fallback near r = 2 sigma^2 and an independent cross-check of the
    closed form elsewhere.
    """
    _check_term(T)
    alpha = params.sigma * params.sigma - params.r
    beta = 2.0 * params.sigma * params.sigma - params.r

    def integrand(t: float) -> float:
        return 2.0 * math.exp(alpha * t) * growth_integral(beta, t)

    try:
        value, _ = adaptive_simpson(integrand, 0.0, T, rel_tol=rel_tol)
    except OverflowError:
        raise DomainError(
            f"exp overflow in second-moment quadrature at (sigma^2 - r)*T = {alpha * T:.6g}"
        ) from None
    return value


def _check_term(T: float) -> None:
    if not (isinstance(T, (int, float)) and math.isfinite(T)):
        raise InputError(f"term T must be finite, got {T!r}")
    if T <= 0:
        raise InputError(f"term T must be positive, got {T}")
