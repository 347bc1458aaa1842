"""Command line interface for quoting annuities and checking the model.

Exit codes: 0 success, 2 invalid flags or inputs, 3 numerical failure
(inversion infeasible, overflow, simulation fault), 4 statistical validation
failure.  Documents go to standard output (or ``--output``) as JSON or CSV;
errors go to standard error, as JSON objects when ``--format json`` is
active.  Output bytes are stable for identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .errors import InputError, NumericalError
from .montecarlo import SimConfig
from .mortality import density_from_table, load_life_table
from .pricing import (
    discount_moments,
    implied_sigma,
    payment_given_price,
    price_given_payment,
    spread,
)
from .types import FixedHorizon, MarketParams, Problem, Quote
from .validation import validate_closed_forms

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

_MAX_SWEEP_ROWS = 1_000_001


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _render_csv(fieldnames, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([_cell(row[name]) for name in fieldnames])
    return buf.getvalue()


def _emit(args, doc, csv_table) -> None:
    if args.format == "json":
        text = _render_json(doc)
    else:
        text = _render_csv(*csv_table)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_error(args, exc: Exception, code: int) -> None:
    if getattr(args, "format", "json") == "json":
        doc = {
            "error": {
                "type": type(exc).__name__,
                "message": str(exc),
                "exit_code": code,
            }
        }
        sys.stderr.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        sys.stderr.write(f"error: {exc}\n")


def _money(value: float, args):
    return int(round(value)) if args.round_dollars else value


def _quote_direction(args) -> Problem:
    if args.direction == "price":
        return Problem.PRICE_GIVEN_PAYMENT
    return Problem.PAYMENT_GIVEN_PRICE


def _quote_doc(args, require_table: bool) -> dict:
    params = MarketParams(args.r, args.sigma)
    has_table = args.life_table is not None
    if require_table and not has_table:
        raise InputError("life-quote requires --life-table and --age")
    if not require_table and has_table == (args.T is not None):
        raise InputError("provide exactly one horizon: --T, or --life-table with --age")

    if has_table:
        if args.age is None:
            raise InputError("--life-table requires --age")
        table = load_life_table(args.life_table)
        life = density_from_table(table, args.age)
        horizon = life.to_density()
        extra = {"age": int(args.age), "mean_remaining_lifetime": life.mean()}
    else:
        if args.T is None:
            raise InputError("a fixed-term quote requires --T")
        horizon = FixedHorizon(args.T)
        extra = {"T": float(args.T)}

    m = discount_moments(params, horizon)
    if _quote_direction(args) is Problem.PRICE_GIVEN_PAYMENT:
        quote = price_given_payment(args.amount, m)
    else:
        quote = payment_given_price(args.amount, m)
    doc = {
        "direction": args.direction,
        "r": params.r,
        "sigma": params.sigma,
        "a": _money(quote.a, args),
        "u": _money(quote.u, args),
        "risk_second_moment": quote.risk_second_moment,
        "m1": m.m1,
        "m2": m.m2,
        "spread_ratio": spread(quote.a, quote.u, m).ratio,
    }
    doc.update(extra)
    return doc


def _cmd_quote(args) -> int:
    doc = _quote_doc(args, require_table=False)
    fields = sorted(doc)
    _emit(args, doc, (fields, [doc]))
    return EXIT_OK


def _cmd_life_quote(args) -> int:
    doc = _quote_doc(args, require_table=True)
    fields = sorted(doc)
    _emit(args, doc, (fields, [doc]))
    return EXIT_OK


def _cmd_sweep(args) -> int:
    lo, hi = (float(v) for v in args.sigma_range)
    if not 0.0 <= lo <= hi <= 2.0:
        raise InputError(f"sigma range must satisfy 0 <= LO <= HI <= 2, got {lo}, {hi}")
    if not args.step > 0.0:
        raise InputError(f"step must be positive, got {args.step}")
    n = int((hi - lo) / args.step + 1e-9) + 1
    if n > _MAX_SWEEP_ROWS:
        raise InputError(f"step {args.step} would produce {n} rows; refusing")

    horizon = FixedHorizon(args.T)
    rows = []
    for i in range(n):
        sigma = lo + i * args.step
        m = discount_moments(MarketParams(args.r, sigma), horizon)
        if args.quantity == "a_hat":
            value = price_given_payment(1.0, m).a
        elif args.quantity == "u_hat":
            value = payment_given_price(1.0, m).u
        elif args.quantity == "diff":
            value = spread(1.0, 1.0, m).difference
        else:
            value = spread(1.0, 1.0, m).ratio
        rows.append({"sigma": sigma, "value": value})

    doc = {"quantity": args.quantity, "r": args.r, "T": args.T, "rows": rows}
    _emit(args, doc, (("sigma", "value"), rows))
    return EXIT_OK


def _cmd_validate(args) -> int:
    params = MarketParams(args.r, args.sigma)
    cfg = SimConfig(n_paths=args.n_paths, n_steps=args.n_steps, seed=args.seed)
    report = validate_closed_forms(params, [args.T], cfg)
    rows = [
        {
            "horizon": row.horizon,
            "quantity": row.quantity,
            "closed_form": row.closed_form,
            "estimate": row.estimate,
            "std_error": row.std_error,
            "z_score": row.z_score,
            "passed": row.passed,
        }
        for row in report.rows
    ]
    doc = {
        "r": report.r,
        "sigma": report.sigma,
        "n_paths": report.n_paths,
        "n_steps": report.n_steps,
        "passed": report.passed,
        "rows": rows,
    }
    fields = (
        "horizon",
        "quantity",
        "closed_form",
        "estimate",
        "std_error",
        "z_score",
        "passed",
    )
    _emit(args, doc, (fields, rows))
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _cmd_implied(args) -> int:
    if args.direction == "price":
        quote = Quote(
            Problem.PRICE_GIVEN_PAYMENT,
            a=args.amount_out,
            u=args.amount_in,
            risk_second_moment=0.0,
        )
    else:
        quote = Quote(
            Problem.PAYMENT_GIVEN_PRICE,
            a=args.amount_in,
            u=args.amount_out,
            risk_second_moment=0.0,
        )
    sigma = implied_sigma(quote, args.r, args.T, sigma_max=args.sigma_max)
    doc = {
        "sigma": sigma,
        "direction": args.direction,
        "r": args.r,
        "T": args.T,
        "amount_in": args.amount_in,
        "amount_out": args.amount_out,
    }
    fields = sorted(doc)
    _emit(args, doc, (fields, [doc]))
    return EXIT_OK


def _add_market_flags(parser, with_sigma=True) -> None:
    parser.add_argument("--r", type=float, required=True, help="riskless rate of return")
    if with_sigma:
        parser.add_argument(
            "--sigma", type=float, required=True, help="return volatility (nonnegative)"
        )


def _add_direction_flags(parser) -> None:
    parser.add_argument(
        "--direction",
        choices=("price", "payment"),
        required=True,
        help="quantity to solve for",
    )
    parser.add_argument(
        "--amount",
        type=float,
        required=True,
        help="payment rate when solving for the price; lump-sum price when "
        "solving for the payment rate",
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )
    common.add_argument(
        "--output", metavar="PATH", help="write the document to PATH instead of stdout"
    )
    common.add_argument(
        "--round-dollars",
        action="store_true",
        help="round the monetary fields a and u to whole dollars",
    )

    parser = argparse.ArgumentParser(
        prog="annuityrisk",
        description="Risk-minimizing annuity quotes under stochastic returns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "quote",
        parents=[common],
        help="solve for the price or payment rate minimizing mean-square hedging error",
    )
    _add_market_flags(p)
    p.add_argument("--T", type=float, help="fixed annuity term in years")
    p.add_argument("--life-table", metavar="PATH", help="CSV life table (age,qx)")
    p.add_argument("--age", type=int, help="annuitant's current age (integer)")
    _add_direction_flags(p)
    p.set_defaults(handler=_cmd_quote)

    p = sub.add_parser(
        "life-quote",
        parents=[common],
        help="quote a life annuity from a life table and current age",
    )
    _add_market_flags(p)
    p.add_argument(
        "--life-table", metavar="PATH", required=True, help="CSV life table (age,qx)"
    )
    p.add_argument(
        "--age", type=int, required=True, help="annuitant's current age (integer)"
    )
    _add_direction_flags(p)
    p.set_defaults(handler=_cmd_life_quote, T=None)

    p = sub.add_parser(
        "sweep",
        parents=[common],
        help="tabulate a quote quantity over a volatility range",
    )
    _add_market_flags(p, with_sigma=False)
    p.add_argument("--T", type=float, required=True, help="fixed annuity term in years")
    p.add_argument(
        "--sigma-range",
        nargs=2,
        type=float,
        metavar=("LO", "HI"),
        required=True,
        help="volatility range, within [0, 2]",
    )
    p.add_argument("--step", type=float, required=True, help="volatility increment")
    p.add_argument(
        "--quantity",
        choices=("a_hat", "u_hat", "diff", "ratio"),
        required=True,
        help="a_hat: price per unit payment; u_hat: payment per unit price; "
        "diff: payment-rate spread per unit price; ratio: u_hat/a_hat rate ratio",
    )
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser(
        "validate",
        parents=[common],
        help="cross-check closed forms against Monte Carlo with z-scores",
    )
    _add_market_flags(p)
    p.add_argument("--T", type=float, required=True, help="fixed annuity term in years")
    p.add_argument("--n-paths", type=int, default=100_000, help="simulated paths")
    p.add_argument(
        "--n-steps", type=int, default=100, help="time steps per year (coarse grid)"
    )
    p.add_argument("--seed", type=int, default=42, help="random seed")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser(
        "implied",
        parents=[common],
        help="recover the volatility consistent with a quoted (price, payment) pair",
    )
    _add_market_flags(p, with_sigma=False)
    p.add_argument("--T", type=float, required=True, help="fixed annuity term in years")
    p.add_argument(
        "--direction",
        choices=("price", "payment"),
        required=True,
        help="which quantity the original quote solved for",
    )
    p.add_argument(
        "--amount-in",
        type=float,
        required=True,
        help="the quantity that was given (payment rate if direction=price, "
        "price if direction=payment)",
    )
    p.add_argument(
        "--amount-out",
        type=float,
        required=True,
        help="the quantity the quote produced",
    )
    p.add_argument(
        "--sigma-max", type=float, default=2.0, help="upper end of the search bracket"
    )
    p.set_defaults(handler=_cmd_implied)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except InputError as exc:
        _emit_error(args, exc, EXIT_USAGE)
        return EXIT_USAGE
    except OSError as exc:
        _emit_error(args, exc, EXIT_USAGE)
        return EXIT_USAGE
    except NumericalError as exc:
        _emit_error(args, exc, EXIT_NUMERICAL)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
