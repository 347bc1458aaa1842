"""Risk-minimizing annuity pricing under stochastic interest rates.

The library prices a continuous annuity-certain or life annuity so that the
mean-square hedging error between the lump sum and the discounted payment
stream is minimal, in both quoting directions (price for a given payment
rate, payment rate for a given price).  Closed forms cover fixed terms;
tabulated remaining-lifetime densities compose them for life annuities; a
Monte Carlo oracle cross-checks everything.
"""

from .closed_forms import (
    growth_integral,
    payment_factor_mean,
    payment_factor_moment,
    payment_factor_second_moment,
    payment_factor_second_moment_by_quadrature,
)
from .errors import (
    AnnuityRiskError,
    DomainError,
    InputError,
    InversionError,
    NumericalError,
    ParseError,
    SimulationError,
)
from .montecarlo import (
    HedgingErrorStats,
    McEstimate,
    RichardsonEstimate,
    Schedule,
    SimConfig,
    hedging_error_distribution,
    iter_richardson_blocks,
    sample_horizon,
    simulate_payment_factor,
    simulate_payment_factor_richardson,
)
from .mortality import (
    LifeTable,
    LifeTableHorizon,
    RemainingLifetimeDensity,
    density_from_table,
    gompertz_table,
    life_annuity_quote,
    load_life_table,
    save_life_table,
)
from .pricing import (
    discount_moments,
    implied_sigma,
    payment_given_price,
    price_given_payment,
    spread,
)
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
from .validation import (
    Z_SCORE_LIMIT,
    ValidationReport,
    ValidationRow,
    exact_standard_errors,
    validate_closed_forms,
)

__version__ = "1.0.0"

__all__ = [
    "AnnuityRiskError",
    "DensityHorizon",
    "DiscountMoments",
    "DomainError",
    "FixedHorizon",
    "HedgingErrorStats",
    "InputError",
    "InversionError",
    "LifeTable",
    "LifeTableHorizon",
    "MarketParams",
    "McEstimate",
    "NumericalError",
    "ParseError",
    "Problem",
    "Quote",
    "RemainingLifetimeDensity",
    "RichardsonEstimate",
    "Schedule",
    "SimConfig",
    "SimulationError",
    "SpreadReport",
    "ValidationReport",
    "ValidationRow",
    "Z_SCORE_LIMIT",
    "as_density",
    "density_from_table",
    "discount_moments",
    "exact_standard_errors",
    "growth_integral",
    "gompertz_table",
    "hedging_error_distribution",
    "implied_sigma",
    "iter_richardson_blocks",
    "life_annuity_quote",
    "load_life_table",
    "payment_factor_mean",
    "payment_factor_moment",
    "payment_factor_second_moment",
    "payment_factor_second_moment_by_quadrature",
    "payment_given_price",
    "price_given_payment",
    "sample_horizon",
    "save_life_table",
    "simulate_payment_factor",
    "simulate_payment_factor_richardson",
    "spread",
    "validate_closed_forms",
    "__version__",
]
