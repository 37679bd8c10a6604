"""Typical-day selection and donor-profile construction.

The donor profile ("matrix") is an average over fault-free typical
weekdays of one month. Scenario 1 keeps the 5-minute slot means; Scenario
2 replaces each 20-minute block (4 slots) with its mean, an equivalent
flow rate on a wider window that keeps the slot count unchanged. A
Scenario-2 profile therefore has identically zero detail coefficients at
levels 1 and 2 of its Haar decomposition.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyDayList, NoTypicalDays
from .ingest import BASE_WINDOW_MINUTES, SLOTS_PER_DAY, DaySignal

TYPICAL_WEEKDAYS = frozenset({1, 2, 3})  # Tuesday, Wednesday, Thursday (Monday = 0)

SCENARIO_SLOT_MEAN = 1
SCENARIO_BLOCK_RATE = 2
RATE_BLOCK_SLOTS = 20 // BASE_WINDOW_MINUTES  # 4 slots per 20-minute block


@dataclass(frozen=True)
class DaySelectionCriteria:
    """Which days of a month qualify as donors."""

    year: int
    month: int
    allowed_weekdays: frozenset[int] = TYPICAL_WEEKDAYS
    excluded_dates: frozenset[date] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "allowed_weekdays", frozenset(self.allowed_weekdays))
        object.__setattr__(self, "excluded_dates", frozenset(self.excluded_dates))
        if not self.allowed_weekdays:
            raise ValueError("allowed_weekdays must not be empty")
        if not 1 <= self.month <= 12:
            raise ValueError(f"month {self.month} out of range")


@dataclass(frozen=True, eq=False)
class MatrixProfile:
    """Averaged typical-day signal that donates detail coefficients."""

    values: np.ndarray
    scenario: int
    member_dates: tuple[date, ...]

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (SLOTS_PER_DAY,):
            raise ValueError(f"expected {SLOTS_PER_DAY} slots, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("profile values must be finite")
        if self.scenario not in (SCENARIO_SLOT_MEAN, SCENARIO_BLOCK_RATE):
            raise ValueError(f"unknown scenario {self.scenario}")
        if self.scenario == SCENARIO_BLOCK_RATE:
            blocks = vals.reshape(-1, RATE_BLOCK_SLOTS)
            if not (blocks == blocks[:, :1]).all():
                raise ValueError("scenario-2 profile must be constant per 20-minute block")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "member_dates", tuple(self.member_dates))

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["slot", "value"])
            for slot, value in enumerate(self.values):
                writer.writerow([slot, repr(float(value))])

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "member_dates": [d.isoformat() for d in self.member_dates],
            "values": [float(v) for v in self.values],
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "MatrixProfile":
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        return cls(
            values=np.asarray(payload["values"], dtype=float),
            scenario=int(payload["scenario"]),
            member_dates=tuple(date.fromisoformat(d) for d in payload["member_dates"]),
        )


def select_typical_days(
    calendar: Iterable[DaySignal], criteria: DaySelectionCriteria
) -> list[date]:
    """Dates in the criteria month that are typical and fault-free.

    A day qualifies when its weekday is allowed, it is not excluded, and
    its signal has no zero-filled slots.
    """
    chosen = {
        day.date
        for day in calendar
        if day.date.year == criteria.year
        and day.date.month == criteria.month
        and day.date.weekday() in criteria.allowed_weekdays
        and day.date not in criteria.excluded_dates
        and not day.filled_slots
    }
    if not chosen:
        raise NoTypicalDays(
            f"no fault-free typical day in {criteria.year}-{criteria.month:02d}"
        )
    return sorted(chosen)


def _slot_mean(days: Sequence[DaySignal]) -> np.ndarray:
    if not days:
        raise EmptyDayList("at least one day is required")
    return np.mean([d.values for d in days], axis=0)


def build_matrix_scenario1(days: Sequence[DaySignal]) -> MatrixProfile:
    """Per-slot arithmetic mean over the donor days, 5-minute resolution kept."""
    values = _slot_mean(days)
    return MatrixProfile(values, SCENARIO_SLOT_MEAN, tuple(sorted(d.date for d in days)))


def build_matrix_scenario2(days: Sequence[DaySignal]) -> MatrixProfile:
    """Per-slot mean widened to 20-minute equivalent flow rates.

    Every block of 4 slots is replaced by its block mean, so the profile
    keeps 288 samples but is piecewise constant on 20-minute windows.
    """
    mean = _slot_mean(days)
    blocks = mean.reshape(-1, RATE_BLOCK_SLOTS).mean(axis=1)
    values = np.repeat(blocks, RATE_BLOCK_SLOTS)
    return MatrixProfile(values, SCENARIO_BLOCK_RATE, tuple(sorted(d.date for d in days)))
