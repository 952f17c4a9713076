"""Monte-Carlo estimation-error harness.

Because good 64-bit hashes are indistinguishable from uniform random
values, the estimation error can be measured without data: feeding n
random 64-bit values into a sketch is equivalent to inserting n distinct
elements.  Beyond ``direct_limit`` the harness switches to a fast
strategy: for every (register, update value) pair it draws the geometric
waiting time until that pair is next processed, then replays the
resulting event schedule in ascending distinct-count order.  Only first
arrivals matter -- repeating an update value never changes a register --
so the schedule's m * u_max events capture every possible state change.

Determinism: run ``k`` of a plan draws from a Philox generator seeded
with ``SeedSequence(plan.seed, spawn_key=(k,))``, so runs are
independent, reproducible, and independent of execution order.  Runs may
execute concurrently (``workers > 1``); aggregation is a sequential
reduction over per-run results.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .backend import kernels
from .estimator import (
    MartingaleState,
    estimate_distinct,
    record_hashes,
)
from .params import Params
from .sketch import Sketch
from .theory import hurwitz_zeta, mvp_martingale, mvp_ml, theoretical_rmse
from .tokens import TokenSet, estimate_from_tokens

_CHUNK = 1 << 17
_MASK64 = (1 << 64) - 1

ESTIMATORS = ("ml", "martingale", "tokens")

CSV_COLUMNS = ("n", "runs", "mean_estimate", "rel_bias", "rel_rmse",
               "theoretical_rmse")


@dataclass(frozen=True)
class SimPlan:
    """One simulation campaign: configuration, checkpoints, run count."""

    params: Params | None
    estimator: str
    checkpoints: tuple[int, ...]
    runs: int
    seed: int
    direct_limit: int = 10 ** 6
    token_r: int | None = None
    bias_correction: bool = True

    def __post_init__(self) -> None:
        if self.estimator not in ESTIMATORS:
            raise ValueError(
                f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}"
            )
        if self.estimator == "tokens":
            if self.token_r is None:
                raise ValueError("token runs need token_r")
        elif self.params is None:
            raise ValueError("sketch runs need params")
        cps = tuple(int(c) for c in self.checkpoints)
        if not cps:
            raise ValueError("at least one checkpoint is required")
        if any(c < 0 for c in cps):
            raise ValueError("checkpoints must be >= 0")
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be strictly ascending")
        object.__setattr__(self, "checkpoints", cps)
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.direct_limit < 0:
            raise ValueError("direct_limit must be >= 0")


@dataclass(frozen=True)
class ReportRow:
    """Aggregated error statistics at one distinct-count checkpoint."""

    n: int
    runs: int
    mean_estimate: float
    rel_bias: float
    rel_rmse: float
    theoretical_rmse: float | None = None


@dataclass(frozen=True)
class ErrorReport:
    plan: SimPlan
    rows: tuple[ReportRow, ...]

    def csv_text(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows:
            theory = "" if row.theoretical_rmse is None else f"{row.theoretical_rmse:.12g}"
            lines.append(
                f"{row.n},{row.runs},{row.mean_estimate:.12g},"
                f"{row.rel_bias:.12g},{row.rel_rmse:.12g},{theory}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, out: str | IO[str]) -> None:
        if hasattr(out, "write"):
            out.write(self.csv_text())
        else:
            with open(out, "w", encoding="ascii") as handle:
                handle.write(self.csv_text())


def run_stream(plan: SimPlan, run_seed: int) -> np.random.Generator:
    """Per-run random stream, split from the master seed by run index."""
    seq = np.random.SeedSequence(plan.seed, spawn_key=(run_seed,))
    return np.random.Generator(np.random.Philox(seq))


def random_hashes(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform 64-bit values standing in for element hashes."""
    return rng.integers(0, _MASK64, size=size, dtype=np.uint64, endpoint=True)


def geometric_waiting_times(rng, success, shape) -> np.ndarray:
    """Geometric samples (support >= 1) by inverse transform.

    Uses 1 - U in (0, 1] and log1p so that tiny success probabilities
    keep full precision.  Returned as float64; waiting times far beyond
    2**53 lose integer resolution, which is irrelevant at any reachable
    distinct count.
    """
    u = 1.0 - rng.random(shape)
    return np.floor(np.log(u) / np.log1p(-np.asarray(success))) + 1.0


def _snapshot(plan: SimPlan, sketch: Sketch, state: MartingaleState | None) -> float:
    if plan.estimator == "martingale":
        assert state is not None
        return state.estimate
    return estimate_distinct(sketch, plan.bias_correction)


def _feed(sketch: Sketch, state, rng, count: int) -> None:
    while count > 0:
        size = min(count, _CHUNK)
        record_hashes(sketch, random_hashes(rng, size), state)
        count -= size


def _simulate_sketch(plan: SimPlan, rng, fast: bool) -> list[tuple[int, float]]:
    assert plan.params is not None
    params = plan.params
    sketch = Sketch(params)
    state = MartingaleState() if plan.estimator == "martingale" else None
    results: list[tuple[int, float]] = []
    direct_horizon = plan.direct_limit if fast else plan.checkpoints[-1]

    inserted = 0
    remaining: list[int] = []
    for cp in plan.checkpoints:
        if cp <= direct_horizon:
            _feed(sketch, state, rng, cp - inserted)
            inserted = cp
            results.append((cp, _snapshot(plan, sketch, state)))
        else:
            remaining.append(cp)
    if not remaining:
        return results

    _feed(sketch, state, rng, direct_horizon - inserted)
    _fast_phase(plan, rng, sketch, state, direct_horizon, remaining, results)
    return results


def _fast_phase(plan, rng, sketch, state, n0, checkpoints, results) -> None:
    """Replay the per-(register, update value) first-arrival schedule."""
    params = plan.params
    m, t, d, p = params.m, params.t, params.d, params.p
    u_max = params.u_max
    u_values = np.arange(1, u_max + 1, dtype=np.int64)
    e = np.minimum(t + 1 + ((u_values - 1) >> t), 64 - p)
    success = np.ldexp(1.0, -(e + p))  # rho(u) / m, exact
    waits = geometric_waiting_times(rng, success, (m, u_max))
    times = n0 + waits

    reg_grid = np.broadcast_to(np.arange(m, dtype=np.int64)[:, None], times.shape)
    u_grid = np.broadcast_to(u_values[None, :], times.shape)
    flat_times = times.ravel()
    flat_reg = reg_grid.ravel()
    flat_u = u_grid.ravel()
    # Ties in scheduled counts are broken by ascending (register, value);
    # register updates for distinct values commute, so this only pins
    # down determinism.
    order = np.lexsort((flat_u, flat_reg, flat_times))
    flat_times = flat_times[order]
    flat_reg = flat_reg[order].astype(np.uint64)
    flat_u = flat_u[order].astype(np.uint64)

    values = sketch.register_values()
    pos = 0
    for cp in checkpoints:
        hi = int(np.searchsorted(flat_times, cp, side="right"))
        if hi > pos:
            if state is None:
                kernels.apply_updates(values, flat_reg[pos:hi], flat_u[pos:hi], d)
            else:
                state.estimate, state.xi = kernels.apply_updates_martingale(
                    values, flat_reg[pos:hi], flat_u[pos:hi],
                    t, d, p, state.estimate, state.xi,
                )
            pos = hi
            sketch._set_register_values(values)
        results.append((cp, _snapshot(plan, sketch, state)))


def _simulate_tokens(plan: SimPlan, rng) -> list[tuple[int, float]]:
    assert plan.token_r is not None
    token_set = TokenSet(plan.token_r)
    results: list[tuple[int, float]] = []
    inserted = 0
    for cp in plan.checkpoints:
        count = cp - inserted
        while count > 0:
            size = min(count, _CHUNK)
            token_set.add_hashes(random_hashes(rng, size))
            count -= size
        inserted = cp
        results.append((cp, estimate_from_tokens(token_set)))
    return results


def simulate_direct(plan: SimPlan, run_seed: int) -> list[tuple[int, float]]:
    """One run inserting every element individually; deterministic."""
    rng = run_stream(plan, run_seed)
    if plan.estimator == "tokens":
        return _simulate_tokens(plan, rng)
    if plan.checkpoints[-1] > plan.direct_limit:
        raise ValueError(
            f"direct simulation limited to {plan.direct_limit} elements; "
            f"checkpoint {plan.checkpoints[-1]} needs simulate_fast"
        )
    return _simulate_sketch(plan, rng, fast=False)


def simulate_fast(plan: SimPlan, run_seed: int) -> list[tuple[int, float]]:
    """One run switching to the waiting-time schedule after direct_limit."""
    rng = run_stream(plan, run_seed)
    if plan.estimator == "tokens":
        raise ValueError("token runs support direct simulation only")
    return _simulate_sketch(plan, rng, fast=True)


def aggregate(estimates: Sequence[float] | np.ndarray, n: int) -> ReportRow:
    """Bias and RMSE, relative to the true count, over one checkpoint."""
    estimates = np.asarray(estimates, dtype=np.float64)
    if estimates.size < 2:
        raise ValueError(f"need at least 2 runs to aggregate, got {estimates.size}")
    if n <= 0:
        raise ValueError(f"checkpoint must be positive for aggregation, got {n}")
    mean = float(estimates.mean())
    rel_bias = (mean - n) / n
    rel_rmse = math.sqrt(float(np.mean((estimates - n) ** 2))) / n
    return ReportRow(int(n), int(estimates.size), mean, rel_bias, rel_rmse)


def _token_rmse_limit(r: int) -> float:
    """Expected relative RMSE of token estimation.

    A token set carries the information of a register state with
    unbounded indicator range, so the matched relative variance is the
    d -> infinity limit 2**-r * ln(2) / zeta(2, 1).
    """
    return math.sqrt(math.ldexp(math.log(2.0), -r) / hurwitz_zeta(2.0, 1.0))


def plan_theoretical_rmse(plan: SimPlan) -> float:
    """Theory column for the plan's estimator and configuration."""
    if plan.estimator == "tokens":
        return _token_rmse_limit(plan.token_r)
    params = plan.params
    mvp = (
        mvp_ml(params.t, params.d)
        if plan.estimator == "ml"
        else mvp_martingale(params.t, params.d)
    )
    return theoretical_rmse(mvp, params.t, params.d, params.p)


def run_plan(plan: SimPlan, workers: int = 1) -> ErrorReport:
    """Execute all runs of a plan and aggregate per checkpoint."""
    needs_fast = (
        plan.estimator != "tokens" and plan.checkpoints[-1] > plan.direct_limit
    )
    runner = simulate_fast if needs_fast else simulate_direct

    def one(run_index: int) -> list[tuple[int, float]]:
        return runner(plan, run_index)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            all_runs = list(pool.map(one, range(plan.runs)))
    else:
        all_runs = [one(k) for k in range(plan.runs)]

    theory = plan_theoretical_rmse(plan)
    rows = []
    for col, n in enumerate(plan.checkpoints):
        estimates = [run[col][1] for run in all_runs]
        row = aggregate(estimates, n)
        rows.append(dataclasses.replace(row, theoretical_rmse=theory))
    return ErrorReport(plan, tuple(rows))
