"""Monte Carlo oracle for the discounted cumulative payment factor.

The return process B(t,0) is geometric Brownian motion, so its logarithm is
simulated by exact Gaussian increments (mean = integral of r - sigma^2/2 over
the step, variance = integral of sigma^2); the only discretization error left
is the trapezoid rule accumulating J(T) = integral of B(s,0)^-1.

Paths are generated in fixed-size blocks, each driven by a counter-derived
substream of the seed (``SeedSequence(seed, spawn_key=(block,))``).  Block
statistics are reduced in block order, so estimates are bit-identical for a
given config no matter how blocks would be scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, SimulationError
from .types import FixedHorizon, as_density

_BLOCK_SIZE = 65536  # paths per substream block; fixed so results are reproducible

_QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99)


@dataclass(frozen=True)
class Schedule:
    """Deterministic piecewise-constant coefficient schedule for (r, sigma).

    ``breakpoints`` are the interior boundaries between intervals; the last
    interval extends to whatever horizon is simulated.  A constant-parameter
    schedule has no breakpoints.
    """

    breakpoints: tuple[float, ...]
    r_values: tuple[float, ...]
    sigma_values: tuple[float, ...]

    def __post_init__(self) -> None:
        bp = tuple(float(t) for t in self.breakpoints)
        rv = tuple(float(v) for v in self.r_values)
        sv = tuple(float(v) for v in self.sigma_values)
        if len(rv) != len(sv) or len(rv) != len(bp) + 1:
            raise InputError(
                "schedule needs one (r, sigma) pair per interval: "
                f"{len(bp)} breakpoints require {len(bp) + 1} values"
            )
        if any(not math.isfinite(t) or t <= 0 for t in bp):
            raise InputError("breakpoints must be positive and finite")
        if any(b >= c for b, c in zip(bp, bp[1:])):
            raise InputError("breakpoints must be strictly increasing")
        if any(not math.isfinite(v) or v < 0 for v in rv + sv):
            raise InputError("schedule rates and volatilities must be nonnegative")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "r_values", rv)
        object.__setattr__(self, "sigma_values", sv)

    @classmethod
    def constant(cls, r: float, sigma: float) -> "Schedule":
        return cls(breakpoints=(), r_values=(r,), sigma_values=(sigma,))

    def _segments(self):
        starts = np.concatenate(([0.0], np.asarray(self.breakpoints)))
        r = np.asarray(self.r_values)
        sig = np.asarray(self.sigma_values)
        drift_rate = r - 0.5 * sig * sig
        var_rate = sig * sig
        seg_len = np.diff(starts)
        cum_drift = np.concatenate(([0.0], np.cumsum(drift_rate[:-1] * seg_len)))
        cum_var = np.concatenate(([0.0], np.cumsum(var_rate[:-1] * seg_len)))
        return starts, drift_rate, var_rate, cum_drift, cum_var

    def drift_and_var(self, t0, t1):
        """Exact integrals of (r - sigma^2/2) and sigma^2 over [t0, t1], vectorized."""
        starts, drift_rate, var_rate, cum_drift, cum_var = self._segments()

        def cum(t):
            t = np.asarray(t, dtype=float)
            idx = np.searchsorted(starts, t, side="right") - 1
            return (
                cum_drift[idx] + drift_rate[idx] * (t - starts[idx]),
                cum_var[idx] + var_rate[idx] * (t - starts[idx]),
            )

        d0, v0 = cum(t0)
        d1, v1 = cum(t1)
        return d1 - d0, v1 - v0


@dataclass(frozen=True)
class SimConfig:
    """Simulation controls: path count, steps per year, seed, antithetic flag."""

    n_paths: int
    n_steps: int  # time steps per year
    seed: int
    antithetic: bool = False

    def __post_init__(self) -> None:
        if int(self.n_paths) != self.n_paths or self.n_paths < 2:
            raise InputError(f"n_paths must be an integer >= 2, got {self.n_paths!r}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InputError(f"n_steps must be an integer >= 1, got {self.n_steps!r}")
        if self.antithetic and self.n_paths % 2:
            raise InputError("antithetic sampling needs an even n_paths")
        object.__setattr__(self, "n_paths", int(self.n_paths))
        object.__setattr__(self, "n_steps", int(self.n_steps))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class McEstimate:
    """Sample moments of J with standard errors and reproducibility metadata.

    With antithetic sampling the standard errors are computed over pair
    means (the independent units); otherwise they are the classical
    sample-std / sqrt(n_paths).
    """

    mean: float
    second_moment: float
    variance: float
    std_error_mean: float
    std_error_second_moment: float
    n_paths: int


@dataclass(frozen=True)
class HedgingErrorStats:
    """Sample statistics of the hedging error a - u J(T)."""

    mean: float
    second_moment: float
    variance: float
    std_error_mean: float
    std_error_second_moment: float
    quantiles: dict
    n_paths: int


@dataclass(frozen=True)
class RichardsonEstimate:
    """Estimates at two nested step sizes plus their Richardson extrapolation."""

    horizon: float
    coarse: McEstimate
    fine: McEstimate
    extrapolated: McEstimate
    n_steps_coarse: int
    n_steps_fine: int


class _RunningStat:
    """Streaming mean/variance with a shift for catastrophic-cancellation safety."""

    __slots__ = ("n", "offset", "s1", "s2")

    def __init__(self) -> None:
        self.n = 0
        self.offset = None
        self.s1 = 0.0
        self.s2 = 0.0

    def add(self, values: np.ndarray) -> None:
        if self.offset is None:
            self.offset = float(values[0])
        d = values - self.offset
        self.n += d.size
        self.s1 += float(d.sum())
        self.s2 += float(np.dot(d, d))

    @property
    def mean(self) -> float:
        return self.offset + self.s1 / self.n

    @property
    def sample_variance(self) -> float:
        if self.n < 2:
            return 0.0
        return max(0.0, (self.s2 - self.s1 * self.s1 / self.n) / (self.n - 1))

    @property
    def std_error(self) -> float:
        return math.sqrt(self.sample_variance / self.n)


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _blocks(n_paths: int):
    start = 0
    index = 0
    while start < n_paths:
        size = min(_BLOCK_SIZE, n_paths - start)
        yield index, size
        index += 1
        start += size


def _step_params(schedule: Schedule, n_steps: int, t_max: float):
    """Exact per-step Gaussian parameters on the uniform grid covering [0, t_max]."""
    dt = 1.0 / n_steps
    n_grid = int(math.floor(t_max * n_steps + 1e-9)) + 1
    t0 = np.arange(n_grid) * dt
    mu, var = schedule.drift_and_var(t0, t0 + dt)
    return dt, mu, np.sqrt(var)


def _split_term(T: float, n_steps: int) -> tuple[int, float]:
    """Number of full uniform steps inside [0, T] and the final partial width."""
    k = int(math.floor(T * n_steps + 1e-9))
    rem = T - k / n_steps
    if rem < 1e-12 * max(1.0, T):
        rem = 0.0
    return k, rem


def _check_finite(b: np.ndarray, step: int) -> None:
    if not np.isfinite(b).all():
        raise SimulationError(f"non-finite discount factor at step {step}")


def _fixed_horizon_block(rng, size, schedule, T, n_steps, antithetic):
    """Per-path J over one block for a fixed horizon; returns (J,) or (J+, J-)."""
    # overflow is checked explicitly after every step; keep numpy quiet
    with np.errstate(over="ignore", invalid="ignore"):
        return _fixed_horizon_block_inner(rng, size, schedule, T, n_steps, antithetic)


def _fixed_horizon_block_inner(rng, size, schedule, T, n_steps, antithetic):
    dt = 1.0 / n_steps
    k_full, rem = _split_term(T, n_steps)
    _, mu, sd = _step_params(schedule, n_steps, T)
    if rem > 0.0:
        mu_rem, var_rem = schedule.drift_and_var(k_full * dt, T)
        mu_rem, sd_rem = float(mu_rem), math.sqrt(float(var_rem))

    m = size // 2 if antithetic else size
    states = [np.zeros(m)] if not antithetic else [np.zeros(m), np.zeros(m)]
    accs = [np.zeros(m) for _ in states]
    bs = [np.ones(m) for _ in states]
    z = np.empty(m)

    for i in range(k_full):
        rng.standard_normal(out=z)
        z *= sd[i]
        for s, (w, acc, b) in enumerate(zip(states, accs, bs)):
            if s == 0:
                w += z
            else:
                w -= z
            w -= mu[i]
            np.exp(w, out=b)
            _check_finite(b, i + 1)
            acc += b

    outs = []
    for acc, b in zip(accs, bs):
        outs.append(dt * (acc + 0.5 * (1.0 - b)) if k_full > 0 else np.zeros(m))

    if rem > 0.0:
        rng.standard_normal(out=z)
        z *= sd_rem
        for s, (w, b) in enumerate(zip(states, bs)):
            wt = w + z if s == 0 else w - z
            wt -= mu_rem
            bt = np.exp(wt)
            _check_finite(bt, k_full + 1)
            outs[s] += 0.5 * rem * (b + bt)
    return tuple(outs)


def _random_horizon_block(rng, size, schedule, density, n_steps, antithetic):
    """Per-path J over one block with T drawn per path (per pair if antithetic).

    T is drawn first, then each path is simulated only to its own horizon:
    paths are sorted by horizon and retired from the active suffix as the
    uniform grid passes them, with one exact partial step onto T itself.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        return _random_horizon_block_inner(
            rng, size, schedule, density, n_steps, antithetic
        )


def _random_horizon_block_inner(rng, size, schedule, density, n_steps, antithetic):
    dt = 1.0 / n_steps
    edges = density.t_edges
    cdf = density.cdf_at_edges()
    m = size // 2 if antithetic else size

    T = np.interp(rng.random(m), cdf, edges)
    T.sort()
    k_full = np.floor(T * n_steps + 1e-9).astype(np.int64)
    rem = T - k_full * dt
    rem[rem < 1e-12 * np.maximum(1.0, T)] = 0.0

    _, mu, sd = _step_params(schedule, n_steps, float(edges[-1]))

    n_states = 2 if antithetic else 1
    states = [np.zeros(m) for _ in range(n_states)]
    accs = [np.zeros(m) for _ in range(n_states)]
    bs = [np.ones(m) for _ in range(n_states)]
    outs = [np.empty(m) for _ in range(n_states)]

    lo = 0
    i = 0
    while lo < m:
        hi = int(np.searchsorted(k_full, i, side="right"))
        if hi > lo:
            _finish_paths(
                rng, schedule, states, accs, bs, outs, slice(lo, hi),
                i * dt, T, rem, dt, i,
            )
            lo = hi
        if lo >= m:
            break
        live = slice(lo, m)
        z = rng.standard_normal(m - lo)
        z *= sd[i]
        for s in range(n_states):
            w = states[s][live]
            if s == 0:
                w += z
            else:
                w -= z
            w -= mu[i]
            b = bs[s][live]
            np.exp(w, out=b)
            _check_finite(b, i + 1)
            accs[s][live] += b
        i += 1
    return tuple(outs)


def _finish_paths(rng, schedule, states, accs, bs, outs, sl, t_node, T, rem, dt, step):
    """Close out paths whose horizon falls before the next uniform grid node."""
    for s in range(len(states)):
        outs[s][sl] = dt * (accs[s][sl] + 0.5 * (1.0 - bs[s][sl])) if step > 0 else 0.0
    has_rem = rem[sl] > 0.0
    if not np.any(has_rem):
        return
    idx = np.nonzero(has_rem)[0] + sl.start
    mu_r, var_r = schedule.drift_and_var(np.full(idx.size, t_node), T[idx])
    sd_r = np.sqrt(var_r)
    z = rng.standard_normal(idx.size)
    for s in range(len(states)):
        zz = z if s == 0 else -z
        bt = np.exp(states[s][idx] + sd_r * zz - mu_r)
        _check_finite(bt, step + 1)
        outs[s][idx] += 0.5 * rem[idx] * (bs[s][idx] + bt)


def _iter_sample_blocks(schedule, horizon, cfg):
    """Yield per-block tuples of per-path J arrays ((J,) plain, (J+, J-) antithetic)."""
    fixed = isinstance(horizon, FixedHorizon)
    density = None if fixed else as_density(horizon)
    for block, size in _blocks(cfg.n_paths):
        rng = _block_rng(cfg.seed, block)
        if fixed:
            yield _fixed_horizon_block(
                rng, size, schedule, horizon.T, cfg.n_steps, cfg.antithetic
            )
        else:
            yield _random_horizon_block(
                rng, size, schedule, density, cfg.n_steps, cfg.antithetic
            )


def _estimate_from_blocks(blocks, n_paths: int) -> McEstimate:
    path_j = _RunningStat()
    path_j2 = _RunningStat()
    unit_j = _RunningStat()
    unit_j2 = _RunningStat()
    for arrays in blocks:
        for j in arrays:
            path_j.add(j)
            path_j2.add(j * j)
        if len(arrays) == 1:
            unit_j.add(arrays[0])
            unit_j2.add(arrays[0] * arrays[0])
        else:
            jp, jm = arrays
            unit_j.add(0.5 * (jp + jm))
            unit_j2.add(0.5 * (jp * jp + jm * jm))
    return McEstimate(
        mean=path_j.mean,
        second_moment=path_j2.mean,
        variance=path_j.sample_variance,
        std_error_mean=unit_j.std_error,
        std_error_second_moment=unit_j2.std_error,
        n_paths=n_paths,
    )


def simulate_payment_factor(schedule: Schedule, horizon, cfg: SimConfig) -> McEstimate:
    """Sample moments of J(T) under the schedule, for a fixed or random horizon.

    Random horizons are drawn per path (per antithetic pair) from the
    tabulated density, independently of the Wiener increments.
    """
    return _estimate_from_blocks(
        _iter_sample_blocks(schedule, horizon, cfg), cfg.n_paths
    )


def hedging_error_distribution(
    a: float, u: float, schedule: Schedule, horizon, cfg: SimConfig
) -> HedgingErrorStats:
    """Sample distribution of the hedging error a - u J(T)."""
    if not (math.isfinite(a) and a > 0):
        raise InputError(f"price a must be positive and finite, got {a!r}")
    if not (math.isfinite(u) and u > 0):
        raise InputError(f"payment rate u must be positive and finite, got {u!r}")
    path_e = _RunningStat()
    path_e2 = _RunningStat()
    unit_e = _RunningStat()
    unit_e2 = _RunningStat()
    chunks = []
    for arrays in _iter_sample_blocks(schedule, horizon, cfg):
        errs = [a - u * j for j in arrays]
        for e in errs:
            path_e.add(e)
            path_e2.add(e * e)
            chunks.append(e)
        if len(errs) == 1:
            unit_e.add(errs[0])
            unit_e2.add(errs[0] * errs[0])
        else:
            ep, em = errs
            unit_e.add(0.5 * (ep + em))
            unit_e2.add(0.5 * (ep * ep + em * em))
    sample = np.concatenate(chunks)
    qs = np.quantile(sample, _QUANTILE_LEVELS)
    return HedgingErrorStats(
        mean=path_e.mean,
        second_moment=path_e2.mean,
        variance=path_e.sample_variance,
        std_error_mean=unit_e.std_error,
        std_error_second_moment=unit_e2.std_error,
        quantiles={lvl: float(q) for lvl, q in zip(_QUANTILE_LEVELS, qs)},
        n_paths=cfg.n_paths,
    )


def iter_richardson_blocks(schedule: Schedule, horizons, cfg: SimConfig):
    """Yield, per block, a list over horizons of (J_coarse, J_fine) path arrays.

    One simulation at 2 x n_steps per year serves both resolutions: the
    coarse trapezoid reuses every other node of the fine grid, and each
    horizon is read off as a checkpoint along the same paths.  Horizons must
    land on the coarse grid (T * n_steps integral).
    """
    if cfg.antithetic:
        raise InputError("richardson estimation does not support antithetic pairing")
    horizons = [float(t) for t in horizons]
    if any(t <= 0 or not math.isfinite(t) for t in horizons):
        raise InputError("horizons must be positive and finite")
    if sorted(horizons) != horizons:
        raise InputError("horizons must be given in increasing order")
    n_fine = 2 * cfg.n_steps
    checkpoints = []
    for t in horizons:
        k = round(t * n_fine)
        if abs(k - t * n_fine) > 1e-9 or k % 2:
            raise InputError(
                f"horizon {t} must land on the coarse grid ({cfg.n_steps} steps/year)"
            )
        checkpoints.append(k)

    dt_f = 1.0 / n_fine
    dt_c = 2.0 * dt_f
    t_max = horizons[-1]
    _, mu, sd = _step_params(schedule, n_fine, t_max)
    cp_set = {k: j for j, k in enumerate(checkpoints)}

    for block, size in _blocks(cfg.n_paths):
        rng = _block_rng(cfg.seed, block)
        w = np.zeros(size)
        acc_f = np.zeros(size)
        acc_c = np.zeros(size)
        b = np.ones(size)
        z = np.empty(size)
        out = [None] * len(checkpoints)
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(1, checkpoints[-1] + 1):
                rng.standard_normal(out=z)
                z *= sd[i - 1]
                w += z
                w -= mu[i - 1]
                np.exp(w, out=b)
                _check_finite(b, i)
                acc_f += b
                if i % 2 == 0:
                    acc_c += b
                j = cp_set.get(i)
                if j is not None:
                    half = 0.5 * (1.0 - b)
                    out[j] = (dt_c * (acc_c + half), dt_f * (acc_f + half))
        yield out


def simulate_payment_factor_richardson(
    schedule: Schedule, horizons, cfg: SimConfig
) -> list[RichardsonEstimate]:
    """Moments of J at each horizon for n_steps and 2 x n_steps per year, extrapolated.

    The per-path extrapolation (4 J_fine - J_coarse)/3 cancels the trapezoid
    rule's leading h^2 bias, which both grids share path by path.
    """
    horizons = [float(t) for t in horizons]
    coarse = [_RunningStatPack() for _ in horizons]
    fine = [_RunningStatPack() for _ in horizons]
    rich = [_RunningStatPack() for _ in horizons]
    for out in iter_richardson_blocks(schedule, horizons, cfg):
        for j, (jc, jf) in enumerate(out):
            coarse[j].add(jc)
            fine[j].add(jf)
            rich[j].add((4.0 * jf - jc) / 3.0)
    return [
        RichardsonEstimate(
            horizon=t,
            coarse=coarse[j].estimate(cfg.n_paths),
            fine=fine[j].estimate(cfg.n_paths),
            extrapolated=rich[j].estimate(cfg.n_paths),
            n_steps_coarse=cfg.n_steps,
            n_steps_fine=2 * cfg.n_steps,
        )
        for j, t in enumerate(horizons)
    ]


class _RunningStatPack:
    """First and second sample moments of J accumulated block by block."""

    def __init__(self) -> None:
        self.j = _RunningStat()
        self.j2 = _RunningStat()

    def add(self, values: np.ndarray) -> None:
        self.j.add(values)
        self.j2.add(values * values)

    def estimate(self, n_paths: int) -> McEstimate:
        return McEstimate(
            mean=self.j.mean,
            second_moment=self.j2.mean,
            variance=self.j.sample_variance,
            std_error_mean=self.j.std_error,
            std_error_second_moment=self.j2.std_error,
            n_paths=n_paths,
        )


def sample_horizon(horizon, seed: int, size=None):
    """Draw remaining-lifetime horizons by inverse CDF with linear interpolation.

    Returns a float when ``size`` is None, otherwise an array of draws.
    Fixed horizons have nothing to sample and are rejected.
    """
    if isinstance(horizon, FixedHorizon):
        raise InputError("fixed horizon has no distribution to sample")
    density = as_density(horizon)
    cdf = density.cdf_at_edges()
    rng = np.random.default_rng(seed)
    u = rng.random(size)
    values = np.interp(u, cdf, density.t_edges)
    if size is None:
        return float(values)
    return values
