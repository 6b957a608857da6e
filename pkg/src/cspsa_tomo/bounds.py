"""Estimation-infidelity lower bounds and summary statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput


def gill_massar_pure(d: int, n_total: float) -> float:
    """Mean-infidelity floor (d - 1) / N for pure-state estimators."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if not n_total > 0:
        raise ValueError(f"ensemble size must be positive, got {n_total}")
    return (d - 1) / float(n_total)


def gill_massar_mixed(d: int, n_total: float) -> float:
    """Weaker floor ((d + 1) / 2)^2 (d - 1) / N attainable by mixed-state methods."""
    if d < 2:
        raise ValueError(f"dimension must be at least 2, got {d}")
    if not n_total > 0:
        raise ValueError(f"ensemble size must be positive, got {n_total}")
    return ((d + 1) / 2.0) ** 2 * (d - 1) / float(n_total)


def total_ensemble(n_est: int, k: int) -> int:
    """Copies consumed through iteration k: two measurements per iteration."""
    if n_est < 1:
        raise ValueError(f"n_est must be positive, got {n_est}")
    if k < 1:
        raise ValueError(f"iteration count must be positive, got {k}")
    return 2 * k * n_est


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    variance: float
    median: float
    q1: float
    q3: float
    count: int


def summarize(samples) -> SummaryStats:
    """Mean, unbiased variance, and quartiles of a 1-d sample.

    A single observation has zero variance by convention.  Quartiles use
    linear interpolation between order statistics.
    """
    arr = np.asarray(samples, dtype=np.float64).ravel()
    if arr.size == 0:
        raise EmptyInput("cannot summarize an empty sample")
    q1, median, q3 = np.percentile(arr, [25.0, 50.0, 75.0])
    variance = float(arr.var(ddof=1)) if arr.size > 1 else 0.0
    return SummaryStats(
        mean=float(arr.mean()),
        variance=variance,
        median=float(median),
        q1=float(q1),
        q3=float(q3),
        count=int(arr.size),
    )
