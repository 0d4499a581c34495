"""Per-stance success detection and haptic pulse gating.

The controller consumes the 50 Hz estimate stream plus causal gait events
for one limb. It keeps the running peak AGRF inside the current stance
(warmed-up frames only) and decides at swing initiation: success when the
peak reached the calibrated threshold, and a double-pulse command when the
success also lands in an active window of the faded schedule. Success is
always recorded; the schedule gates only the pulse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

from ..core import AgrfEstimate, Limb
from ..errors import GaitFeedbackError
from ..gaitevents import EventKind, GaitEvent, StancePhase, make_stance
from ..haptics import CommandKind, HapticCommand, SequenceCounter
from .schedule import DEFAULT_FADED_SCHEDULE, FadedSchedule
from .threshold import Threshold


class NoThreshold(GaitFeedbackError):
    """update() was called before a threshold was calibrated."""


@dataclass(frozen=True)
class StanceOutcome:
    """The decision record for one completed stance."""

    stance: StancePhase
    peak_agrf_bw: float
    success: bool
    feedback_active: bool
    pulse_sent: bool
    trigger_time_us: Optional[int] = None

    def __post_init__(self):
        if self.pulse_sent and not (self.success and self.feedback_active):
            raise ValueError("a pulse requires both success and an active window")
        if self.pulse_sent and self.trigger_time_us is None:
            raise ValueError("a sent pulse must carry its trigger time")


@dataclass(frozen=True)
class BoutSummary:
    """Totals over one bout's outcomes."""

    active_time_s: float
    success_count: int
    pulse_count: int


class FeedbackController:
    """Single-writer state machine driven by the 50 Hz pipeline."""

    def __init__(
        self,
        threshold: Optional[Threshold] = None,
        schedule: FadedSchedule = DEFAULT_FADED_SCHEDULE,
        limb: Limb = Limb.PARETIC,
        seq_start: int = 0,
    ):
        self.schedule = schedule
        self.limb = limb
        self._threshold = threshold
        self._seq = SequenceCounter(seq_start)
        self._open_contact: Optional[GaitEvent] = None
        self._running_peak_bw = -math.inf
        self.outcomes: List[StanceOutcome] = []

    @property
    def threshold(self) -> Optional[Threshold]:
        return self._threshold

    def set_threshold(self, threshold: Threshold) -> None:
        self._threshold = threshold

    def reset_stance(self) -> None:
        """Forget any half-open stance (e.g. when a bout starts or ends)."""
        self._open_contact = None
        self._running_peak_bw = -math.inf

    def update(
        self,
        estimate: AgrfEstimate,
        event: Optional[GaitEvent],
        t_in_bout_s: float,
    ) -> Optional[HapticCommand]:
        """Advance one frame; returns a double-pulse command when due.

        The event argument is whatever the causal detector emitted on this
        frame (None most frames). The pulse decision is made in the same
        frame the swing_init event is emitted, so command timing tracks the
        detector's emission within one frame.
        """
        if self._threshold is None:
            raise NoThreshold("calibrate a threshold before streaming updates")
        phase = self.schedule.state(t_in_bout_s)

        command: Optional[HapticCommand] = None
        if event is not None and event.side is self.limb:
            if event.kind is EventKind.FOOT_CONTACT:
                self._open_contact = event
                self._running_peak_bw = -math.inf
            elif event.kind is EventKind.SWING_INIT and self._open_contact is not None:
                peak = self._running_peak_bw
                if not math.isfinite(peak):
                    peak = 0.0  # no warmed-up frame landed inside this stance
                success = peak >= self._threshold.value_bw
                pulse = success and phase.active
                trigger_time = estimate.timestamp_us if pulse else None
                if pulse:
                    command = HapticCommand(CommandKind.DOUBLE_PULSE, self._seq.take())
                self.outcomes.append(
                    StanceOutcome(
                        stance=make_stance(self._open_contact, event),
                        peak_agrf_bw=peak,
                        success=success,
                        feedback_active=phase.active,
                        pulse_sent=pulse,
                        trigger_time_us=trigger_time,
                    )
                )
                self._open_contact = None
                self._running_peak_bw = -math.inf

        if self._open_contact is not None and estimate.warmed_up:
            self._running_peak_bw = max(self._running_peak_bw, estimate.agrf_bw)
        return command


def bout_summary(
    outcomes: List[StanceOutcome],
    schedule: FadedSchedule = DEFAULT_FADED_SCHEDULE,
    elapsed_s: Optional[float] = None,
) -> BoutSummary:
    """Totals for one bout; active time comes from the schedule clock.

    elapsed_s is how far the bout ran (None means not started/unknown, so
    active time reports 0; a full bout passes its duration).
    """
    active_time_s = 0.0
    if elapsed_s is not None:
        capped = min(float(elapsed_s), schedule.bout_duration_s)
        active_time_s = schedule.active_seconds_elapsed(capped)
    return BoutSummary(
        active_time_s=active_time_s,
        success_count=sum(1 for o in outcomes if o.success),
        pulse_count=sum(1 for o in outcomes if o.pulse_sent),
    )
