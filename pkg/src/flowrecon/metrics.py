"""Fidelity metrics between original and reconstructed days.

The headline error metric is the mean absolute relative error per slot in
percent ("MAPE (interpretation)"): slots where the original share is zero
are excluded from the mean and counted. The mean absolute difference of
shares is emitted alongside for transparency, since it lives on a much
smaller scale. Both metrics and the correlation are computed on
percent-of-daily-total signals.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    AllZeroOriginal,
    ConstantInput,
    EmptyResults,
    LengthMismatch,
)
from .ingest import BASE_WINDOW_MINUTES, DaySignal
from .reconstruct import PercentSignal, normalize_percent

ERROR_METRIC_LABEL = "MAPE (interpretation)"


@dataclass(frozen=True)
class DayResult:
    """Per-day, per-level fidelity against the original signal."""

    date: date
    level: int
    correlation: float
    error_pct: float
    baseline_correlation: float
    baseline_error_pct: float
    share_mad: float
    baseline_share_mad: float
    excluded_slots: int

    def __post_init__(self):
        for r in (self.correlation, self.baseline_correlation):
            if not -1.0 <= r <= 1.0:
                raise ValueError(f"correlation {r} outside [-1, 1]")
        if self.error_pct < 0 or self.baseline_error_pct < 0:
            raise ValueError("error percentages must be non-negative")


@dataclass(frozen=True)
class LevelSummary:
    """Mean / median / max / min of both metrics at one aggregation level."""

    level: int
    window_minutes: int
    correlation_mean: float
    correlation_median: float
    correlation_max: float
    correlation_min: float
    error_mean: float
    error_median: float
    error_max: float
    error_min: float
    baseline_correlation_mean: float
    baseline_correlation_median: float
    baseline_correlation_max: float
    baseline_correlation_min: float
    baseline_error_mean: float
    baseline_error_median: float
    baseline_error_max: float
    baseline_error_min: float


def pearson(a, b) -> float:
    """Population product-moment correlation, cov(a, b) / (sigma_a sigma_b)."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
        raise LengthMismatch(f"vector lengths {x.size} != {y.size}")
    if x.size < 2:
        raise ConstantInput("correlation needs at least 2 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    nx = np.sqrt(np.sum(dx * dx))
    ny = np.sqrt(np.sum(dy * dy))
    if nx == 0.0 or ny == 0.0:
        raise ConstantInput("correlation undefined for a constant vector")
    r = float(np.sum(dx * dy) / (nx * ny))
    return max(-1.0, min(1.0, r))


class MapeResult(NamedTuple):
    error_pct: float
    excluded_slots: int


def _shares(signal) -> np.ndarray:
    return signal.values if isinstance(signal, PercentSignal) else np.asarray(signal, float)


def mean_abs_pct_error(original, reconstructed) -> MapeResult:
    """Mean of |orig - recon| / orig over slots with positive original share.

    Returns the mean in percent together with the number of zero-original
    slots that were excluded. Inputs are percent signals (or raw share
    vectors of equal length).
    """
    o = _shares(original)
    r = _shares(reconstructed)
    if o.shape != r.shape:
        raise LengthMismatch(f"share lengths {o.size} != {r.size}")
    included = o > 0
    excluded = int(o.size - included.sum())
    if not included.any():
        raise AllZeroOriginal("no slot with a positive original share")
    rel = np.abs(o[included] - r[included]) / o[included]
    return MapeResult(float(rel.mean() * 100.0), excluded)


def share_mean_abs_diff(original, reconstructed) -> float:
    """Mean absolute difference of shares (transparency metric)."""
    o = _shares(original)
    r = _shares(reconstructed)
    if o.shape != r.shape:
        raise LengthMismatch(f"share lengths {o.size} != {r.size}")
    return float(np.abs(o - r).mean())


def evaluate_day(
    original: DaySignal,
    reconstructed: DaySignal,
    baseline: DaySignal,
    level: int,
) -> DayResult:
    """Score one reconstruction and its staircase baseline on percent signals."""
    orig_pct = normalize_percent(original)
    recon_pct = normalize_percent(reconstructed)
    base_pct = normalize_percent(baseline)
    mape = mean_abs_pct_error(orig_pct, recon_pct)
    base_mape = mean_abs_pct_error(orig_pct, base_pct)
    return DayResult(
        date=original.date,
        level=level,
        correlation=pearson(orig_pct.values, recon_pct.values),
        error_pct=mape.error_pct,
        baseline_correlation=pearson(orig_pct.values, base_pct.values),
        baseline_error_pct=base_mape.error_pct,
        share_mad=share_mean_abs_diff(orig_pct, recon_pct),
        baseline_share_mad=share_mean_abs_diff(orig_pct, base_pct),
        excluded_slots=mape.excluded_slots,
    )


def _lower_median(sorted_values: Sequence[float]) -> float:
    return float(sorted_values[(len(sorted_values) - 1) // 2])


def _stats(values: list[float]) -> tuple[float, float, float, float]:
    ordered = sorted(values)
    return (
        float(np.mean(ordered)),
        _lower_median(ordered),
        float(ordered[-1]),
        float(ordered[0]),
    )


def summarize(results: Sequence[DayResult]) -> list[LevelSummary]:
    """Per-level summary rows over a corpus of day results.

    The median is the lower-middle element for even counts. Levels appear
    in ascending order regardless of input order.
    """
    if not results:
        raise EmptyResults("no day results to summarize")
    by_level: dict[int, list[DayResult]] = {}
    for res in results:
        by_level.setdefault(res.level, []).append(res)

    summaries = []
    for level in sorted(by_level):
        rows = by_level[level]
        corr = _stats([r.correlation for r in rows])
        err = _stats([r.error_pct for r in rows])
        bcorr = _stats([r.baseline_correlation for r in rows])
        berr = _stats([r.baseline_error_pct for r in rows])
        summaries.append(
            LevelSummary(
                level,
                BASE_WINDOW_MINUTES << level,
                *corr,
                *err,
                *bcorr,
                *berr,
            )
        )
    return summaries
