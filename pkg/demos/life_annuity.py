"""
Life annuities from a mortality table
=====================================

Builds a Gompertz mortality table, turns it into a remaining-lifetime
density for annuitants of different ages, and quotes the risk-minimizing
payment rate a $250,000 purchase buys at each age.  Older annuitants have
shorter expected horizons, so the same lump sum buys a larger payment.
"""

from annuityrisk import (
    FixedHorizon,
    MarketParams,
    Problem,
    density_from_table,
    discount_moments,
    gompertz_table,
    life_annuity_quote,
    payment_given_price,
)

params = MarketParams(r=0.05, sigma=0.2)
PRICE = 250_000.0

# a simple two-parameter mortality law; in practice, load a published
# table with load_life_table("table.csv")
table = gompertz_table(b=5e-5, c=1.09)
print(f"table covers ages {table.start_age}..{table.terminal_age}")
print()

print(f"{'age':>4} {'e(x)':>6} {'payment/yr':>12} {'risk (RMS)':>12}")
for age in (45, 55, 65, 75, 85):
    life = density_from_table(table, age)
    quote = life_annuity_quote(
        table, age, params, Problem.PAYMENT_GIVEN_PRICE, PRICE
    )
    rms = quote.risk_second_moment ** 0.5
    print(f"{age:>4} {life.mean():>6.2f} ${quote.u:>10,.2f} ${rms:>10,.2f}")
print()

# a fixed term equal to the 65-year-old's life expectancy is not the
# same contract: the random horizon adds risk and moves the quote
age65 = density_from_table(table, 65)
fixed = payment_given_price(
    PRICE, discount_moments(params, FixedHorizon(age65.mean()))
)
life = life_annuity_quote(table, 65, params, Problem.PAYMENT_GIVEN_PRICE, PRICE)
print(f"age 65, expected remaining lifetime {age65.mean():.2f} years")
print(f"  life annuity payment        ${life.u:,.2f}")
print(f"  fixed-term payment, same T  ${fixed.u:,.2f}")
