"""Life-table ingestion and conversion to remaining-lifetime densities.

Tables are CSV streams with header ``age,qx``: one row per integer age, qx
the one-year death probability.  The final row must carry qx = 1 so the
table closes out and every density it produces has bounded support.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError
from .pricing import discount_moments, payment_given_price, price_given_payment
from .types import DensityHorizon, MarketParams, Problem, Quote


@dataclass(frozen=True)
class LifeTable:
    """Per-age one-year death probabilities qx for contiguous integer ages."""

    start_age: int
    qx: np.ndarray

    def __post_init__(self) -> None:
        qx = np.asarray(self.qx, dtype=float)
        if qx.ndim != 1 or qx.size < 1:
            raise InputError("life table needs at least one age row")
        if not np.all(np.isfinite(qx)):
            raise InputError("life table contains non-finite qx")
        if np.any(qx < 0) or np.any(qx > 1):
            raise InputError("life table qx values must lie in [0, 1]")
        if qx[-1] != 1.0:
            raise InputError("life table must close out with qx = 1 at the terminal age")
        if int(self.start_age) != self.start_age or self.start_age < 0:
            raise InputError(f"start age must be a nonnegative integer, got {self.start_age!r}")
        qx.setflags(write=False)
        object.__setattr__(self, "start_age", int(self.start_age))
        object.__setattr__(self, "qx", qx)

    @property
    def terminal_age(self) -> int:
        return self.start_age + self.qx.size - 1

    @property
    def ages(self) -> np.ndarray:
        return np.arange(self.start_age, self.terminal_age + 1)


def load_life_table(source) -> LifeTable:
    """Parse an ``age,qx`` CSV from a path or text stream into a LifeTable."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return _parse_table(fh)
    return _parse_table(source)


def _parse_table(stream) -> LifeTable:
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("row 1: empty life-table stream") from None
    if [h.strip().lower() for h in header] != ["age", "qx"]:
        raise ParseError(f"row 1: expected header 'age,qx', got {','.join(header)!r}")

    ages: list[int] = []
    qx: list[float] = []
    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # ignore blank lines
        if len(row) != 2:
            raise ParseError(f"row {row_no}: expected 2 fields, got {len(row)}")
        try:
            age = int(row[0])
            q = float(row[1])
        except ValueError:
            raise ParseError(f"row {row_no}: could not parse {row!r}") from None
        if not math.isfinite(q) or q < 0 or q > 1:
            raise ParseError(f"row {row_no}: qx={row[1]} outside [0, 1]")
        if ages and age != ages[-1] + 1:
            raise ParseError(
                f"row {row_no}: age {age} breaks contiguity after {ages[-1]}"
            )
        ages.append(age)
        qx.append(q)

    if not ages:
        raise ParseError("row 2: life table has no data rows")
    if qx[-1] != 1.0:
        raise ParseError(
            f"row {len(ages) + 1}: final row must have qx = 1, got {qx[-1]!r}"
        )
    return LifeTable(start_age=ages[0], qx=np.array(qx))


def save_life_table(table: LifeTable, dest) -> None:
    """Write a LifeTable as ``age,qx`` CSV; floats keep full round-trip precision."""
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            _write_table(table, fh)
    else:
        _write_table(table, dest)


def _write_table(table: LifeTable, stream: io.TextIOBase) -> None:
    stream.write("age,qx\n")
    for age, q in zip(table.ages, table.qx):
        stream.write(f"{int(age)},{float(q)!r}\n")


def gompertz_table(
    b: float, c: float, start_age: int = 0, terminal_age: int = 120
) -> LifeTable:
    """Synthetic table from the Gompertz hazard b * c^age.

    qx is the exact one-year death probability under the continuous hazard,
    1 - exp(-b c^x (c-1)/ln c); the terminal age closes out with qx = 1.
    """
    if b <= 0 or c <= 1:
        raise InputError(f"need b > 0 and c > 1, got b={b}, c={c}")
    if terminal_age <= start_age:
        raise InputError("terminal_age must exceed start_age")
    x = np.arange(start_age, terminal_age + 1, dtype=float)
    qx = -np.expm1(-b * np.power(c, x) * (c - 1.0) / math.log(c))
    qx = np.clip(qx, 0.0, 1.0)
    qx[-1] = 1.0
    return LifeTable(start_age=start_age, qx=qx)


@dataclass(frozen=True)
class RemainingLifetimeDensity:
    """Density of the remaining lifetime in years, with its survival curve.

    Deaths are spread uniformly within each year of age, so the density is
    constant on each one-year bin: lambda(t) = S(k) q_{age+k} on [k, k+1).
    ``survival`` holds S at the bin edges, from S(0) = 1 down to 0.
    """

    density: DensityHorizon
    survival: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.survival, dtype=float)
        if s[0] != 1.0 or np.any(np.diff(s) > 0) or abs(s[-1]) > 1e-12:
            raise InputError("survival curve must fall monotonically from 1 to 0")
        s.setflags(write=False)
        object.__setattr__(self, "survival", s)

    @property
    def t_edges(self) -> np.ndarray:
        return self.density.t_edges

    @property
    def pdf(self) -> np.ndarray:
        return self.density.pdf

    def mean(self) -> float:
        """Expected remaining lifetime implied by the tabulated density."""
        edges = self.t_edges
        mids = 0.5 * (edges[:-1] + edges[1:])
        return float(np.sum(self.density.bin_masses * mids))

    def to_density(self) -> DensityHorizon:
        return self.density


def density_from_table(table: LifeTable, current_age: int) -> RemainingLifetimeDensity:
    """Remaining-lifetime density for someone of ``current_age`` under the table."""
    if int(current_age) != current_age:
        raise InputError(f"current_age must be an integer age, got {current_age!r}")
    current_age = int(current_age)
    if current_age < table.start_age:
        raise InputError(
            f"current_age {current_age} precedes table start {table.start_age}"
        )
    if current_age >= table.terminal_age:
        raise InputError(
            f"current_age {current_age} is at or past terminal age {table.terminal_age}"
        )
    q = table.qx[current_age - table.start_age :]
    survival = np.concatenate(([1.0], np.cumprod(1.0 - q)))
    masses = survival[:-1] * q
    edges = np.arange(q.size + 1, dtype=float)
    # one-year bins, so the density level equals the bin mass
    density = DensityHorizon(edges, masses)
    return RemainingLifetimeDensity(density=density, survival=survival)


@dataclass(frozen=True)
class LifeTableHorizon:
    """Random horizon given by a life table and the annuitant's current age."""

    table: LifeTable
    current_age: int

    def to_density(self) -> DensityHorizon:
        return density_from_table(self.table, self.current_age).to_density()


def life_annuity_quote(
    table: LifeTable,
    current_age: int,
    params: MarketParams,
    direction: Problem,
    amount: float,
) -> Quote:
    """Quote a life annuity: table -> remaining-lifetime density -> moments -> quote.

    ``amount`` is the payment rate when direction is PRICE_GIVEN_PAYMENT and
    the lump-sum price when direction is PAYMENT_GIVEN_PRICE.
    """
    horizon = LifeTableHorizon(table, current_age)
    m = discount_moments(params, horizon)
    if direction is Problem.PRICE_GIVEN_PAYMENT:
        return price_given_payment(amount, m)
    if direction is Problem.PAYMENT_GIVEN_PRICE:
        return payment_given_price(amount, m)
    raise InputError(f"unknown quoting direction: {direction!r}")
