"""Core value types: market parameters, horizons, moments, quotes."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

# A tabulated density whose integral deviates from 1 by more than this is
# rejected; smaller deviations are silently renormalized.
DENSITY_NORMALIZATION_TOL = 1e-6

# Slack allowed on the Jensen inequality m2 >= m1^2 before rejecting the
# pair.  Moments that arrive via quadrature against a horizon density carry
# roundoff near this scale when the horizon is almost deterministic; within
# the band m2 is clamped up to m1^2, beyond it the inputs are inconsistent.
JENSEN_REL_TOL = 1e-9


class Problem(enum.Enum):
    """Which quoting problem produced a quote."""

    PRICE_GIVEN_PAYMENT = "price_given_payment"
    PAYMENT_GIVEN_PRICE = "payment_given_price"


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class MarketParams:
    """Constant drift r (per year) and volatility sigma (per sqrt-year) of the return process."""

    r: float
    sigma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "r", _require_finite("r", self.r))
        object.__setattr__(self, "sigma", _require_finite("sigma", self.sigma))
        if self.r < 0:
            raise InputError(f"r must be nonnegative, got {self.r}")
        if self.sigma < 0:
            raise InputError(f"sigma must be nonnegative, got {self.sigma}")


@dataclass(frozen=True)
class FixedHorizon:
    """A known, non-random annuity term of T years."""

    T: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "T", _require_finite("T", self.T))
        if self.T <= 0:
            raise InputError(f"horizon T must be positive, got {self.T}")


@dataclass(frozen=True)
class DensityHorizon:
    """Tabulated density of a random horizon, piecewise constant on bins.

    ``t_edges`` are the K+1 ascending bin edges (years) and ``pdf`` the K
    density values (per year) on ``[t_edges[k], t_edges[k+1])``.  The support
    is bounded by construction.  Densities whose integral is within
    ``DENSITY_NORMALIZATION_TOL`` of 1 are renormalized on construction;
    anything further off is rejected.
    """

    t_edges: np.ndarray
    pdf: np.ndarray

    def __post_init__(self) -> None:
        edges = np.asarray(self.t_edges, dtype=float)
        pdf = np.asarray(self.pdf, dtype=float)
        if edges.ndim != 1 or edges.size < 2:
            raise InputError("density grid needs at least 2 edge points")
        if pdf.ndim != 1 or pdf.size != edges.size - 1:
            raise InputError(
                f"density needs one value per bin: {edges.size - 1} bins, got {pdf.size} values"
            )
        if not np.all(np.isfinite(edges)) or not np.all(np.isfinite(pdf)):
            raise InputError("density grid contains non-finite entries")
        if np.any(np.diff(edges) <= 0):
            raise InputError("density edges must be strictly increasing")
        if edges[0] < 0:
            raise InputError("density support must lie in t >= 0")
        if np.any(pdf < 0):
            raise InputError("density values must be nonnegative")
        total = float(np.sum(pdf * np.diff(edges)))
        if abs(total - 1.0) > DENSITY_NORMALIZATION_TOL:
            raise InputError(
                f"density integrates to {total!r}, outside 1 +/- {DENSITY_NORMALIZATION_TOL}"
            )
        if total <= 0:
            raise InputError("density integrates to zero")
        pdf = pdf / total
        edges.setflags(write=False)
        pdf.setflags(write=False)
        object.__setattr__(self, "t_edges", edges)
        object.__setattr__(self, "pdf", pdf)

    @classmethod
    def point_mass(cls, t: float, half_width: float = 5e-7) -> "DensityHorizon":
        """Degenerate horizon: all mass in one narrow bin centered at t."""
        if t <= half_width:
            raise InputError("point mass must sit strictly inside t > 0")
        return cls(
            np.array([t - half_width, t + half_width]),
            np.array([0.5 / half_width]),
        )

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "DensityHorizon":
        """Uniform horizon density on [lo, hi]."""
        if not (0 <= lo < hi):
            raise InputError(f"need 0 <= lo < hi, got [{lo}, {hi}]")
        return cls(np.array([lo, hi]), np.array([1.0 / (hi - lo)]))

    @property
    def bin_masses(self) -> np.ndarray:
        return self.pdf * np.diff(self.t_edges)

    def cdf_at_edges(self) -> np.ndarray:
        """Cumulative distribution evaluated at every bin edge (starts 0, ends 1)."""
        cdf = np.concatenate(([0.0], np.cumsum(self.bin_masses)))
        cdf[-1] = 1.0
        return cdf

    def to_density(self) -> "DensityHorizon":
        return self


# Horizon is one of: FixedHorizon, DensityHorizon, or any object exposing
# to_density() -> DensityHorizon (e.g. mortality.LifeTableHorizon).
Horizon = object


def as_density(horizon) -> DensityHorizon:
    """Coerce a random horizon to its tabulated density."""
    to_density = getattr(horizon, "to_density", None)
    if to_density is None:
        raise InputError(f"unsupported horizon type: {type(horizon).__name__}")
    return to_density()


@dataclass(frozen=True)
class DiscountMoments:
    """First and second moments of the discounted cumulative payment factor J(T).

    m1 = E J(T) (years), m2 = E[J(T)^2] (years^2).  Values violating Jensen's
    inequality by at most ``JENSEN_REL_TOL`` relative are clamped up to m1^2.
    """

    m1: float
    m2: float

    def __post_init__(self) -> None:
        m1 = _require_finite("m1", self.m1)
        m2 = _require_finite("m2", self.m2)
        if m1 <= 0:
            raise InputError(f"m1 must be positive, got {m1}")
        floor = m1 * m1
        if m2 < floor * (1.0 - JENSEN_REL_TOL):
            raise InputError(f"m2={m2!r} violates Jensen bound m1^2={floor!r}")
        object.__setattr__(self, "m1", m1)
        object.__setattr__(self, "m2", max(m2, floor))

    @property
    def variance(self) -> float:
        """Var J(T) = m2 - m1^2, nonnegative by construction."""
        return self.m2 - self.m1 * self.m1


@dataclass(frozen=True)
class Quote:
    """A matched price/payment pair and the residual mean-square hedging risk."""

    problem: Problem
    a: float  # lump-sum price (currency)
    u: float  # payment rate (currency per year)
    risk_second_moment: float  # E|a - u J(T)|^2 at the optimum (currency^2)

    def __post_init__(self) -> None:
        a = _require_finite("a", self.a)
        u = _require_finite("u", self.u)
        risk = _require_finite("risk_second_moment", self.risk_second_moment)
        if a <= 0:
            raise InputError(f"price a must be positive, got {a}")
        if u <= 0:
            raise InputError(f"payment rate u must be positive, got {u}")
        if risk < 0:
            raise InputError(f"risk_second_moment must be nonnegative, got {risk}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "risk_second_moment", risk)


@dataclass(frozen=True)
class SpreadReport:
    """Both per-dollar payment rates and their gap; quantifies the quote spread.

    u_hat_over_a is the seller-optimal payment rate per unit price,
    u_over_a_hat the rate implied by the buyer-optimal price.  Under any
    horizon uncertainty the first is strictly smaller; ``ratio`` equals
    m1^2/m2 regardless of the amounts quoted.
    """

    u_hat_over_a: float
    u_over_a_hat: float
    difference: float  # u_over_a_hat - u_hat_over_a, nonnegative
    ratio: float  # u_hat_over_a / u_over_a_hat = m1^2/m2, in (0, 1]
