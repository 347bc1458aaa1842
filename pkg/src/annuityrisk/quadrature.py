"""Adaptive Simpson quadrature with a Richardson-style error estimate."""

from __future__ import annotations

import math
from typing import Callable

from .errors import NumericalError

_MAX_DEPTH = 48


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-11,
    abs_tol: float = 0.0,
) -> tuple[float, float]:
    """Integrate f over [a, b]; returns (value, error_estimate).

    Each panel is accepted when the two-half Simpson refinement changes the
    panel value by less than 15x its share of the tolerance budget (the
    classical Richardson bound for a fourth-order rule).  Raises
    NumericalError, reporting the achieved tolerance, if the depth limit is
    hit before the budget is met.
    """
    if b <= a:
        raise NumericalError(f"empty integration interval [{a}, {b}]")

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # Rough scale for the relative part of the budget; refined panels only
    # ever shrink, so using the first-pass estimate is conservative enough.
    budget = max(abs_tol, rel_tol * max(abs(whole), 1e-300))

    total = 0.0
    err_total = 0.0
    stack = [(a, m, fa, fm, _simpson(a, m, fa, f(0.5 * (a + m)), fm), 0),
             (m, b, fm, fb, _simpson(m, b, fm, f(0.5 * (m + b)), fb), 0)]
    # Each stack entry: (lo, hi, flo, fhi, (panel_value, fmid), depth)
    while stack:
        lo, hi, flo, fhi, (s_panel, fmid), depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _simpson(lo, mid, flo, f(0.5 * (lo + mid)), fmid)
        right = _simpson(mid, hi, fmid, f(0.5 * (mid + hi)), fhi)
        s2 = left[0] + right[0]
        delta = s2 - s_panel
        local_budget = budget * (hi - lo) / (b - a)
        if abs(delta) <= 15.0 * local_budget or depth >= _MAX_DEPTH:
            if depth >= _MAX_DEPTH and abs(delta) > 15.0 * local_budget:
                raise NumericalError(
                    "quadrature failed to converge on "
                    f"[{lo:.6g}, {hi:.6g}]: achieved {abs(delta) / 15.0:.3g}, "
                    f"wanted {local_budget:.3g}"
                )
            total += s2 + delta / 15.0
            err_total += abs(delta) / 15.0
        else:
            stack.append((lo, mid, flo, fmid, left, depth + 1))
            stack.append((mid, hi, fmid, fhi, right, depth + 1))

    if not math.isfinite(total):
        raise NumericalError(f"quadrature produced non-finite value {total!r}")
    return total, err_total


def _simpson(lo, hi, flo, fmid, fhi):
    return (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi), fmid
