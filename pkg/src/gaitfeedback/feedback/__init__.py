"""Threshold calibration, faded scheduling, and per-stance pulse gating."""

from .controller import (
    BoutSummary,
    FeedbackController,
    NoThreshold,
    StanceOutcome,
    bout_summary,
)
from .schedule import (
    DEFAULT_FADED_SCHEDULE,
    DEFAULT_MINUTES,
    MINUTE_S,
    FadedSchedule,
    OutOfBout,
    SchedulePhase,
    schedule_state,
)
from .threshold import (
    BASELINE_MIN_STANCES,
    DEFAULT_THRESHOLD_MULTIPLIER,
    MIN_PROPULSIVE_PEAK_BW,
    EmptyBaseline,
    NonPositivePeaks,
    Threshold,
    calibrate_threshold,
)

__all__ = [
    "BASELINE_MIN_STANCES",
    "DEFAULT_FADED_SCHEDULE",
    "DEFAULT_MINUTES",
    "DEFAULT_THRESHOLD_MULTIPLIER",
    "MINUTE_S",
    "MIN_PROPULSIVE_PEAK_BW",
    "BoutSummary",
    "EmptyBaseline",
    "FadedSchedule",
    "FeedbackController",
    "NoThreshold",
    "NonPositivePeaks",
    "OutOfBout",
    "SchedulePhase",
    "StanceOutcome",
    "Threshold",
    "bout_summary",
    "calibrate_threshold",
    "schedule_state",
]
