"""Per-trial aggregation of stance metrics and gait speed.

A trial (one protocol stage of walking) is summarized by the mean and SD
of each per-stance measure plus gait speed from the distance markers; a
trial backed by too few stances is flagged low-confidence rather than
rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import sqrt
from typing import Sequence

from ..errors import GaitFeedbackError
from .stance import LOW_CONFIDENCE_STANCES, StanceMetrics

TRIAL_SPEED_WINDOW_S = 120.0


class Condition(str, Enum):
    """The four walking conditions compared in the outcome battery."""

    BASELINE = "baseline"
    DURING_FEEDBACK = "during_feedback"
    POST_FEEDBACK = "post_feedback"
    RETENTION = "retention"


class InsufficientMarkers(GaitFeedbackError):
    """Gait speed needs at least the minute-1 and minute-2 distance marks."""


@dataclass(frozen=True)
class TrialAggregate:
    """Mean and SD of each stance measure over one trial."""

    condition: Condition
    n_stances: int
    peak_agrf_mean_bw: float
    peak_agrf_sd_bw: float
    tla_mean_deg: float
    tla_sd_deg: float
    step_length_mean_m: float
    step_length_sd_m: float
    speed_mps: float

    @property
    def low_confidence(self) -> bool:
        return self.n_stances < LOW_CONFIDENCE_STANCES


def _mean_sd(values: Sequence[float]) -> tuple:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    return mean, sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def gait_speed(minute_marks_m: Sequence[float]) -> float:
    """Speed from cumulative distance at the 2-minute mark.

    minute_marks_m[k] is the cumulative distance at minute k+1; only the
    first two minutes enter the estimate regardless of trial length.
    """
    marks = list(minute_marks_m)
    if len(marks) < 2:
        raise InsufficientMarkers(
            f"need distance marks for minutes 1 and 2, got {len(marks)}"
        )
    distance = float(marks[1])
    if distance < 0:
        raise ValueError(f"cumulative distance cannot be negative, got {distance}")
    return distance / TRIAL_SPEED_WINDOW_S


def aggregate_trial(
    condition: Condition,
    stances: Sequence[StanceMetrics],
    speed_mps: float,
) -> TrialAggregate:
    """Summarize one trial's stance metrics; empty trials are rejected."""
    if not stances:
        raise ValueError("cannot aggregate a trial with zero stances")
    peak_mean, peak_sd = _mean_sd([s.peak_agrf_bw for s in stances])
    tla_mean, tla_sd = _mean_sd([s.tla_deg for s in stances])
    step_mean, step_sd = _mean_sd([s.step_length_m for s in stances])
    return TrialAggregate(
        condition=Condition(condition),
        n_stances=len(stances),
        peak_agrf_mean_bw=peak_mean,
        peak_agrf_sd_bw=peak_sd,
        tla_mean_deg=tla_mean,
        tla_sd_deg=tla_sd,
        step_length_mean_m=step_mean,
        step_length_sd_m=step_sd,
        speed_mps=speed_mps,
    )
