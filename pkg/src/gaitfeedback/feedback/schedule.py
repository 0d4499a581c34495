"""Faded feedback scheduling inside a 3-minute training bout.

Feedback availability fades across the bout: 45 s of the first minute,
30 s of the second, 15 s of the third, with the active block leading each
minute. Success detection never depends on this schedule — it gates only
whether a pulse is delivered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from ..errors import GaitFeedbackError

MINUTE_S = 60.0
DEFAULT_MINUTES: Tuple[Tuple[float, float], ...] = (
    (45.0, 15.0),
    (30.0, 30.0),
    (15.0, 45.0),
)


class OutOfBout(GaitFeedbackError):
    """A schedule query outside [0, bout duration)."""


@dataclass(frozen=True)
class SchedulePhase:
    """Where a bout timestamp falls: active/inactive and 1-based minute."""

    active: bool
    minute: int


@dataclass(frozen=True)
class FadedSchedule:
    """Per-minute (active_s, inactive_s) pairs; active block first."""

    minutes: Tuple[Tuple[float, float], ...] = DEFAULT_MINUTES

    def __post_init__(self):
        if not self.minutes:
            raise ValueError("schedule needs at least one minute")
        cleaned = []
        previous_active = None
        for i, pair in enumerate(self.minutes):
            active_s, inactive_s = (float(pair[0]), float(pair[1]))
            if active_s < 0 or inactive_s < 0:
                raise ValueError(f"minute {i + 1} has negative seconds: {pair}")
            if active_s + inactive_s != MINUTE_S:
                raise ValueError(
                    f"minute {i + 1} must sum to {MINUTE_S:.0f} s, got {pair}"
                )
            if previous_active is not None and active_s >= previous_active:
                raise ValueError(
                    "active seconds must strictly decrease across minutes"
                )
            previous_active = active_s
            cleaned.append((active_s, inactive_s))
        object.__setattr__(self, "minutes", tuple(cleaned))

    @property
    def bout_duration_s(self) -> float:
        return MINUTE_S * len(self.minutes)

    @property
    def total_active_s(self) -> float:
        return sum(active_s for active_s, _ in self.minutes)

    def state(self, t_in_bout_s: float) -> SchedulePhase:
        """Active/inactive plus minute index at a bout-relative time."""
        if not (0 <= t_in_bout_s < self.bout_duration_s):
            raise OutOfBout(
                f"t={t_in_bout_s} s outside [0, {self.bout_duration_s:.0f}) s bout"
            )
        minute_index = int(t_in_bout_s // MINUTE_S)
        offset_s = t_in_bout_s - minute_index * MINUTE_S
        active = offset_s < self.minutes[minute_index][0]
        return SchedulePhase(active=active, minute=minute_index + 1)

    def active_seconds_elapsed(self, t_in_bout_s: float) -> float:
        """Total scheduled active time in [0, t); t may equal bout end."""
        if not (0 <= t_in_bout_s <= self.bout_duration_s):
            raise OutOfBout(
                f"t={t_in_bout_s} s outside [0, {self.bout_duration_s:.0f}] s bout"
            )
        total = 0.0
        for i, (active_s, _) in enumerate(self.minutes):
            into_minute = min(max(t_in_bout_s - i * MINUTE_S, 0.0), MINUTE_S)
            total += min(into_minute, active_s)
        return total


DEFAULT_FADED_SCHEDULE = FadedSchedule()


def schedule_state(
    t_in_bout_s: float, schedule: FadedSchedule = DEFAULT_FADED_SCHEDULE
) -> SchedulePhase:
    """Module-level convenience wrapper over FadedSchedule.state."""
    return schedule.state(t_in_bout_s)
