"""
How quotes respond to return volatility
=======================================

Sweeps the asset volatility with the rate and term held fixed and tabulates
the four quantities that characterize the quoting problem: the price of a
unit payment stream, the payment rate a unit price buys, and the spread
between the two quoting directions (difference and ratio form).  Writes a
CSV next to this script for plotting.
"""

import csv
import pathlib

import numpy as np

from annuityrisk import (
    FixedHorizon,
    MarketParams,
    discount_moments,
    payment_given_price,
    price_given_payment,
    spread,
)

R = 0.05
TERM = 20.0
sigmas = np.round(np.arange(1, 51) * 0.01, 10)

rows = []
for sigma in sigmas:
    m = discount_moments(MarketParams(R, float(sigma)), FixedHorizon(TERM))
    s = spread(1.0, 1.0, m)
    rows.append(
        {
            "sigma": float(sigma),
            "price_of_unit_payment": price_given_payment(1.0, m).a,
            "payment_for_unit_price": payment_given_price(1.0, m).u,
            "rate_difference": s.difference,
            "round_trip_ratio": s.ratio,
        }
    )

out = pathlib.Path(__file__).with_name("volatility_sweep.csv")
with out.open("w", newline="") as fh:
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
print(f"wrote {len(rows)} rows to {out.name}")
print()

# a few landmarks: price grows with volatility, payment shrinks, the
# spread difference peaks at moderate volatility and then decays
header = f"{'sigma':>6} {'a(u=1)':>10} {'u(a=1)':>10} {'diff':>10} {'ratio':>8}"
print(header)
for row in rows[::7]:
    print(
        f"{row['sigma']:>6.2f} {row['price_of_unit_payment']:>10.4f} "
        f"{row['payment_for_unit_price']:>10.6f} "
        f"{row['rate_difference']:>10.6f} {row['round_trip_ratio']:>8.4f}"
    )

diffs = np.array([row["rate_difference"] for row in rows])
peak = int(diffs.argmax())
print()
print(f"spread difference peaks at sigma = {rows[peak]['sigma']:.2f}")
