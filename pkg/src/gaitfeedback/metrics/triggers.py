"""Exploratory feedback-trigger metrics over a session's stance outcomes.

Runs are maximal sequences of consecutive pulsed stances (success inside an
active window). The coefficient of variation of run lengths uses the
population standard deviation; with fewer than two runs it is undefined and
flagged rather than invented.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt
from typing import List, Optional, Sequence

from ..feedback import StanceOutcome


@dataclass(frozen=True)
class TriggerMetrics:
    """Session-level trigger summary."""

    time_to_first_s: Optional[float]
    total_triggers: int
    max_consecutive: int
    cv_consecutive: Optional[float]
    run_lengths: tuple

    def __post_init__(self):
        if not (self.total_triggers >= self.max_consecutive >= 0):
            raise ValueError("total triggers must dominate the longest run")

    @property
    def cv_low_confidence(self) -> bool:
        """CV over fewer than two runs carries no spread information."""
        return len(self.run_lengths) < 2


def _run_lengths(flags: Sequence[bool]) -> List[int]:
    runs: List[int] = []
    current = 0
    for flag in flags:
        if flag:
            current += 1
        elif current:
            runs.append(current)
            current = 0
    if current:
        runs.append(current)
    return runs


def trigger_metrics(
    outcomes: Sequence[StanceOutcome],
    first_bout_start_us: Optional[int] = None,
) -> TriggerMetrics:
    """Trigger summary from time-ordered stance outcomes.

    time_to_first is measured from the first bout's start to the first
    pulse; it stays None (flagged undefined) when either is unavailable.
    """
    pulsed = [o.pulse_sent for o in outcomes]
    runs = _run_lengths(pulsed)
    total = sum(pulsed)

    time_to_first_s: Optional[float] = None
    if first_bout_start_us is not None:
        for outcome in outcomes:
            if outcome.pulse_sent and outcome.trigger_time_us is not None:
                time_to_first_s = (outcome.trigger_time_us - first_bout_start_us) / 1e6
                break

    cv: Optional[float] = None
    if len(runs) >= 2:
        mean = sum(runs) / len(runs)
        pop_sd = sqrt(sum((r - mean) ** 2 for r in runs) / len(runs))
        cv = pop_sd / mean
    elif len(runs) == 1:
        cv = 0.0  # a single run has no spread by definition

    return TriggerMetrics(
        time_to_first_s=time_to_first_s,
        total_triggers=total,
        max_consecutive=max(runs) if runs else 0,
        cv_consecutive=cv,
        run_lengths=tuple(runs),
    )
