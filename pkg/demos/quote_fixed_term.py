"""
Quoting a fixed-term annuity in both directions
===============================================

A customer pays a lump sum today and receives a continuous payment stream
for 20 years.  The provider invests the lump sum in an asset with drift
5% and volatility 20% per year, so the usual actuarial present value is
not available: no payment rate makes the hedge exact.  The library quotes
the payment rate that minimizes the mean-square hedging error instead.
"""

from annuityrisk import (
    FixedHorizon,
    MarketParams,
    discount_moments,
    payment_given_price,
    price_given_payment,
    spread,
)

params = MarketParams(r=0.05, sigma=0.2)
horizon = FixedHorizon(20.0)

# the two moments of the discounted payment stream drive every quote
m = discount_moments(params, horizon)
print(f"mean payment factor      m1 = {m.m1:.6f}")
print(f"second moment            m2 = {m.m2:.6f}")
print()

# direction one: the customer brings $100,000, we quote a payment rate
buy = payment_given_price(100_000.0, m)
print(f"price  $100,000  ->  payment rate ${buy.u:,.2f} per year")
print(f"residual hedge risk (RMS)        ${buy.risk_second_moment ** 0.5:,.2f}")
print()

# direction two: the customer wants $4,206 per year, we quote a price
sell = price_given_payment(4206.0, m)
print(f"payment $4,206/yr  ->  price ${sell.a:,.2f}")
print(f"residual hedge risk (RMS)    ${sell.risk_second_moment ** 0.5:,.2f}")
print()

# the two directions do not invert each other: buying at the quoted
# price and selling the resulting payment stream back loses money
report = spread(100_000.0, buy.u, m)
print(f"round-trip ratio  u_hat/a : u/a_hat = {report.ratio:.6f}")
print(f"payment-rate spread per dollar      = {report.difference:.6f}")
