"""Empirical convergence-time scaling harness.

Compiles a function spec once, then for a ladder of input sizes runs
seeded trial batches and reports convergence-time statistics as
CSV-ready rows. The log-log slope fit over the means is the scaling
check: linear-time dynamics give slope 1, n log n sits near 1.2 on the
16..1024 ladder, quadratic would sit near 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .compiler import CompileOptions, compile_piecewise
from .kinetics import TrialStats, run_trials
from .rng import stream_key
from .semilinear import PiecewiseAffineFn, eval_fn


@dataclass(frozen=True)
class ScalingRow:
    n: int
    trials: int
    mean_conv_time: float
    median: float
    stddev: float
    censored_fraction: float
    mean_count_peak: float
    warning: str = ""


def balanced_input(k: int) -> Callable[[int], tuple[int, ...]]:
    """Default input shape: n split evenly, remainder on the first coordinate."""

    def shape(n: int) -> tuple[int, ...]:
        base = n // k
        x = [base] * k
        x[0] += n - base * k
        return tuple(x)

    return shape


def scaling_run(
    fn: PiecewiseAffineFn,
    n_values: Sequence[int],
    trials: int,
    seed: int = 0,
    input_shape: Callable[[int], Sequence[int]] | None = None,
) -> list[ScalingRow]:
    """One row per n, deterministic under a fixed seed.

    Statistics cover uncensored trials only; a censored fraction above
    10% is recorded as a warning in the row rather than imputed away.
    """
    if list(n_values) != sorted(n_values):
        raise ValueError("n_values must be sorted ascending")
    crc, _ = compile_piecewise(fn, CompileOptions())
    shape = input_shape or balanced_input(fn.k)
    rows = []
    for n in n_values:
        x = tuple(shape(n))
        expected = eval_fn(fn, x)
        stats: TrialStats = run_trials(
            crc, x, trials, seed=stream_key(seed, n), expected_output=expected
        )
        warning = ""
        if stats.censored_fraction > 0.1:
            warning = f"censored_fraction {stats.censored_fraction:.2f} exceeds 0.1"
        rows.append(
            ScalingRow(
                n=n,
                trials=trials,
                mean_conv_time=stats.mean_conv_time,
                median=stats.median_conv_time,
                stddev=stats.stddev_conv_time,
                censored_fraction=stats.censored_fraction,
                mean_count_peak=stats.mean_count_peak,
                warning=warning,
            )
        )
    return rows


def fit_loglog(rows: Sequence[ScalingRow]) -> float:
    """Ordinary least-squares slope of ln(mean_conv_time) against ln(n)."""
    if len(rows) < 3:
        raise ValueError("need at least 3 rows to fit")
    if any(not row.mean_conv_time > 0 for row in rows):
        raise ValueError("all mean convergence times must be positive")
    xs = [math.log(row.n) for row in rows]
    ys = [math.log(row.mean_conv_time) for row in rows]
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    var = sum((x - mean_x) ** 2 for x in xs)
    if var == 0:
        raise ValueError("all n values are equal; slope undefined")
    cov = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return cov / var


def rows_to_csv(rows: Sequence[ScalingRow]) -> str:
    """CSV with a running slope column (blank until 3 rows are available)."""
    lines = [
        "n,trials,mean_conv_time,median,stddev,censored_fraction,"
        "mean_count_peak,slope_so_far"
    ]
    for i, row in enumerate(rows):
        slope = ""
        if i >= 2:
            try:
                slope = repr(fit_loglog(rows[: i + 1]))
            except ValueError:
                slope = ""
        lines.append(
            f"{row.n},{row.trials},{row.mean_conv_time!r},{row.median!r},"
            f"{row.stddev!r},{row.censored_fraction!r},{row.mean_count_peak!r},{slope}"
        )
    return "\n".join(lines) + "\n"
