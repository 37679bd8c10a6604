"""Detail transplantation: rebuild a 5-minute day from aggregated counts.

The donor profile is decomposed once per level; its detail coefficients
are kept and its approximation discarded. A target day's aggregated
counts are inserted as the approximation vector and the inverse transform
produces a 288-slot signal. Inserting raw counts (instead of orthonormal
coefficients, which would carry a 2**(k/2) factor) distorts the output
scale, so comparisons run on percent-of-daily-total signals; raw negative
slots are allowed and only clamped when exporting vehicle counts. Set
``rescale_approximation`` for count-faithful output instead.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import LengthMismatch, LevelMismatch, LevelOutOfRange, ZeroDailyTotal
from .formatting import format_number
from .haar import WaveletDecomposition, haar_forward, haar_inverse
from .ingest import (
    MAX_AGGREGATION_LEVEL,
    SLOTS_PER_DAY,
    AggregatedSignal,
    DaySignal,
    slot_start,
)
from .matrix import MatrixProfile


@dataclass(frozen=True)
class DetailBank:
    """Frozen detail coefficients of one donor profile.

    The same bank reconstructs every target day at its level; the arrays
    are read-only so a corpus run cannot mutate the donor data.
    """

    levels: int
    details: tuple[np.ndarray, ...]
    scenario: int
    member_dates: tuple[date, ...]


@dataclass(frozen=True, eq=False)
class PercentSignal:
    """A day's flow as each slot's share of the daily total.

    Shares sum to one. Reconstructed days may produce shares outside
    [0, 1] because raw reconstruction values can be negative.
    """

    values: np.ndarray
    source_date: date

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (SLOTS_PER_DAY,):
            raise ValueError(f"expected {SLOTS_PER_DAY} slots, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("shares must be finite")
        total = vals.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"shares sum to {total!r}, expected 1")
        object.__setattr__(self, "values", vals)


def extract_details(matrix: MatrixProfile, levels: int) -> DetailBank:
    """Decompose the donor profile and keep only its detail coefficients."""
    if not 1 <= levels <= MAX_AGGREGATION_LEVEL:
        raise LevelOutOfRange(f"levels {levels} outside 1..{MAX_AGGREGATION_LEVEL}")
    decomposition = haar_forward(matrix.values, levels)
    frozen = []
    for det in decomposition.details:
        arr = det.copy()
        arr.setflags(write=False)
        frozen.append(arr)
    # the donor approximation is deliberately dropped
    return DetailBank(levels, tuple(frozen), matrix.scenario, matrix.member_dates)


def substitute_approximation(
    bank: DetailBank,
    aggregated: AggregatedSignal,
    rescale_approximation: bool = False,
) -> WaveletDecomposition:
    """Pair the bank's details with a target day's aggregated counts.

    By default the counts go in verbatim; with ``rescale_approximation``
    they are divided by 2**(levels/2), which makes them the orthonormal
    approximation of the target day and yields count-faithful output.
    """
    if aggregated.level != bank.levels:
        raise LevelMismatch(
            f"aggregated level {aggregated.level} != bank levels {bank.levels}"
        )
    expected = SLOTS_PER_DAY >> bank.levels
    approx = np.asarray(aggregated.values, dtype=float)
    if approx.size != expected:
        raise LengthMismatch(
            f"approximation length {approx.size}, expected {expected}"
        )
    if rescale_approximation:
        approx = approx / 2 ** (bank.levels / 2)
    return WaveletDecomposition(bank.levels, approx.copy(), bank.details)


def reconstruct_from_bank(
    bank: DetailBank,
    aggregated: AggregatedSignal,
    rescale_approximation: bool = False,
    sensor_id: str = "",
) -> DaySignal:
    """Inverse-transform the substituted decomposition into a 288-slot day."""
    decomposition = substitute_approximation(bank, aggregated, rescale_approximation)
    values = haar_inverse(decomposition)
    return DaySignal(aggregated.source_date, sensor_id, values, frozenset())


def reconstruct_day(
    matrix: MatrixProfile,
    aggregated: AggregatedSignal,
    levels: int,
    rescale_approximation: bool = False,
    sensor_id: str = "",
) -> DaySignal:
    """Full per-day pipeline: extract details, substitute, invert."""
    bank = extract_details(matrix, levels)
    return reconstruct_from_bank(bank, aggregated, rescale_approximation, sensor_id)


def normalize_percent(day: DaySignal) -> PercentSignal:
    """Each slot's share of the daily total; invariant under uniform scaling."""
    total = float(day.values.sum())
    if total <= 0:
        raise ZeroDailyTotal(f"daily total {total!r} is not positive")
    return PercentSignal(day.values / total, day.date)


def staircase_baseline(aggregated: AggregatedSignal, sensor_id: str = "") -> DaySignal:
    """Spread each window count uniformly over its slots.

    Equals the inverse transform of the substituted approximation with an
    all-zero detail bank, rescaled to conserve counts. This is the
    comparison floor for any reconstruction.
    """
    block = 1 << aggregated.level
    values = np.repeat(aggregated.values / block, block)
    return DaySignal(aggregated.source_date, sensor_id, values, frozenset())


def _reconstruction_rows(
    reconstructed: DaySignal,
    total_vehicles: float,
    original: DaySignal | None,
):
    shares = normalize_percent(reconstructed).values
    clamped = int(np.sum(shares < 0))
    counts = np.clip(shares, 0.0, None) * total_vehicles
    rows = []
    for slot in range(SLOTS_PER_DAY):
        rows.append(
            (
                slot_start(reconstructed.date, slot).isoformat(timespec="minutes"),
                float(shares[slot]),
                float(counts[slot]),
                float(original.values[slot]) if original is not None else None,
            )
        )
    return rows, clamped


def write_reconstruction_csv(
    path,
    reconstructed: DaySignal,
    total_vehicles: float,
    original: DaySignal | None = None,
    full_precision: bool = False,
) -> int:
    """Write (timestamp, share, count, original count) rows for one day.

    Negative shares are clamped to zero in the count column only; the
    number of clamped slots is returned so reports can disclose it.
    """
    rows, clamped = _reconstruction_rows(reconstructed, total_vehicles, original)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "share", "count", "original_count"])
        for ts, share, count, orig in rows:
            writer.writerow(
                [
                    ts,
                    format_number(share, full_precision),
                    format_number(count, full_precision),
                    "" if orig is None else format_number(orig, full_precision),
                ]
            )
    return clamped


def write_reconstruction_json(
    path,
    reconstructed: DaySignal,
    total_vehicles: float,
    original: DaySignal | None = None,
) -> int:
    """JSON twin of :func:`write_reconstruction_csv`, full precision."""
    rows, clamped = _reconstruction_rows(reconstructed, total_vehicles, original)
    payload = {
        "date": reconstructed.date.isoformat(),
        "clamped_slots": clamped,
        "slots": [
            {"timestamp": ts, "share": share, "count": count, "original_count": orig}
            for ts, share, count, orig in rows
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")
    return clamped
