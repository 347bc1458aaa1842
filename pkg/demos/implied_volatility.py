"""
Reading volatility back out of a quote
======================================

If a provider quotes risk-minimizing prices, the quote itself reveals the
return volatility they assumed.  Given one observed (price, payment rate)
pair plus the rate and term, a bracketed root search recovers sigma.
"""

from annuityrisk import (
    FixedHorizon,
    MarketParams,
    discount_moments,
    implied_sigma,
    payment_given_price,
)

R, TERM = 0.05, 20.0

# the provider's private assumption
sigma_true = 0.27
m = discount_moments(MarketParams(R, sigma_true), FixedHorizon(TERM))

# we observe only the published quote: $100,000 buys this payment stream
observed = payment_given_price(100_000.0, m)
print(f"observed quote: $100,000 -> ${observed.u:,.2f} per year "
      f"over {TERM:.0f} years at r = {R}")

# invert the quote
sigma_implied = implied_sigma(observed, R, TERM)
print(f"implied volatility = {sigma_implied:.10f}")
print(f"true volatility    = {sigma_true:.10f}")
print(f"absolute error     = {abs(sigma_implied - sigma_true):.2e}")
print()

# the deterministic benchmark: the same trade priced at sigma = 0 pays
# more per dollar, and inverting it returns exactly zero
flat = payment_given_price(
    100_000.0, discount_moments(MarketParams(R, 0.0), FixedHorizon(TERM))
)
print(f"sigma = 0 payment rate  ${flat.u:,.2f}")
print(f"implied sigma           {implied_sigma(flat, R, TERM)}")
