"""Intervention-protocol state machine.

One session walks a fixed stage sequence: a 2-minute baseline control
trial, device don, then four 3-minute feedback bouts each preceded by a
2-minute seated rest, a 2-minute post control trial, a 10-minute seated
rest, and a final 2-minute retention control trial.

The machine is clock-agnostic: callers feed it a session-relative time in
seconds (derived from frame timestamps, so replays are deterministic) and
it reports stage boundaries at exact multiples of the stage durations.
Pausing freezes the stage timer; operator advance skips the skippable
stages (device don and seated rests) at the operator's clock time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from ..errors import GaitFeedbackError
from ..metrics.aggregate import Condition


class InvalidTransition(GaitFeedbackError):
    """The event is not legal in the current stage/state."""


class Stage(str, Enum):
    BASELINE_CONTROL = "baseline_control"
    DON_DEVICE = "don_device"
    REST_1 = "rest_1"
    BOUT_1 = "bout_1"
    REST_2 = "rest_2"
    BOUT_2 = "bout_2"
    REST_3 = "rest_3"
    BOUT_3 = "bout_3"
    REST_4 = "rest_4"
    BOUT_4 = "bout_4"
    POST_CONTROL = "post_control"
    LONG_REST = "long_rest"
    RETENTION_CONTROL = "retention_control"
    COMPLETE = "complete"


#: Canonical stage order; COMPLETE is terminal.
STAGE_ORDER: Tuple[Stage, ...] = (
    Stage.BASELINE_CONTROL,
    Stage.DON_DEVICE,
    Stage.REST_1,
    Stage.BOUT_1,
    Stage.REST_2,
    Stage.BOUT_2,
    Stage.REST_3,
    Stage.BOUT_3,
    Stage.REST_4,
    Stage.BOUT_4,
    Stage.POST_CONTROL,
    Stage.LONG_REST,
    Stage.RETENTION_CONTROL,
    Stage.COMPLETE,
)

CONTROL_TRIAL_S = 120.0
BOUT_S = 180.0
REST_S = 120.0
LONG_REST_S = 600.0

#: None marks the one operator-paced stage (device don has no fixed length).
_DURATIONS = {
    Stage.BASELINE_CONTROL: CONTROL_TRIAL_S,
    Stage.DON_DEVICE: None,
    Stage.REST_1: REST_S,
    Stage.BOUT_1: BOUT_S,
    Stage.REST_2: REST_S,
    Stage.BOUT_2: BOUT_S,
    Stage.REST_3: REST_S,
    Stage.BOUT_3: BOUT_S,
    Stage.REST_4: REST_S,
    Stage.BOUT_4: BOUT_S,
    Stage.POST_CONTROL: CONTROL_TRIAL_S,
    Stage.LONG_REST: LONG_REST_S,
    Stage.RETENTION_CONTROL: CONTROL_TRIAL_S,
    Stage.COMPLETE: None,
}

BOUT_STAGES = (Stage.BOUT_1, Stage.BOUT_2, Stage.BOUT_3, Stage.BOUT_4)

#: Stages during which the participant walks (and stances are scored).
WALKING_STAGES = (
    Stage.BASELINE_CONTROL,
    *BOUT_STAGES,
    Stage.POST_CONTROL,
    Stage.RETENTION_CONTROL,
)

#: Stages the operator may cut short.
SKIPPABLE_STAGES = (
    Stage.DON_DEVICE,
    Stage.REST_1,
    Stage.REST_2,
    Stage.REST_3,
    Stage.REST_4,
    Stage.LONG_REST,
)

#: Walking stage → analysis condition.
STAGE_CONDITION = {
    Stage.BASELINE_CONTROL: Condition.BASELINE,
    Stage.BOUT_1: Condition.DURING_FEEDBACK,
    Stage.BOUT_2: Condition.DURING_FEEDBACK,
    Stage.BOUT_3: Condition.DURING_FEEDBACK,
    Stage.BOUT_4: Condition.DURING_FEEDBACK,
    Stage.POST_CONTROL: Condition.POST_FEEDBACK,
    Stage.RETENTION_CONTROL: Condition.RETENTION,
}


class ProtocolEvent(str, Enum):
    TIMER_ELAPSED = "stage_timer_elapsed"
    START = "operator_start"
    ABORT = "operator_abort"
    PAUSE = "operator_pause"
    RESUME = "operator_resume"
    ADVANCE = "operator_advance"


def stage_duration_s(stage: Stage, don_device_s: Optional[float] = None) -> Optional[float]:
    """Planned duration; None for operator-paced stages.

    don_device_s puts the device-don stage on a timer (used by unattended
    replays); leave it None to wait for an operator advance.
    """
    if stage is Stage.DON_DEVICE:
        return don_device_s
    return _DURATIONS[stage]


def next_stage(stage: Stage) -> Stage:
    if stage is Stage.COMPLETE:
        raise InvalidTransition("session already complete")
    return STAGE_ORDER[STAGE_ORDER.index(stage) + 1]


def is_bout(stage: Stage) -> bool:
    return stage in BOUT_STAGES


def is_walking(stage: Stage) -> bool:
    return stage in WALKING_STAGES


@dataclass
class ProtocolMachine:
    """Mutable protocol state driven by session-relative seconds.

    Timed stages advance at exact boundaries (entry time + duration), so a
    completed unpaused run reports the planned durations exactly no matter
    how the caller's clock ticks land around the boundary.
    """

    don_device_s: Optional[float] = None
    stage: Stage = Stage.BASELINE_CONTROL
    started: bool = False
    paused: bool = False
    aborted: bool = False
    stage_entered_s: float = 0.0
    _paused_at_s: Optional[float] = field(default=None, repr=False)

    @property
    def complete(self) -> bool:
        return self.stage is Stage.COMPLETE

    def stage_duration(self, stage: Optional[Stage] = None) -> Optional[float]:
        return stage_duration_s(self.stage if stage is None else stage, self.don_device_s)

    def elapsed_in_stage(self, now_s: float) -> float:
        if not self.started:
            return 0.0
        end = self._paused_at_s if self.paused else now_s
        return max(0.0, end - self.stage_entered_s)

    def _enter(self, stage: Stage, at_s: float) -> None:
        self.stage = stage
        self.stage_entered_s = at_s

    def inject(self, event: ProtocolEvent, now_s: float) -> Stage:
        """Apply one event; returns the (possibly unchanged) current stage."""
        if event is ProtocolEvent.START:
            if self.started:
                raise InvalidTransition("session already started")
            self.started = True
            self._enter(Stage.BASELINE_CONTROL, now_s)
            return self.stage

        if not self.started:
            raise InvalidTransition(f"{event.value} before session start")

        if event is ProtocolEvent.ABORT:
            if self.complete:
                raise InvalidTransition("session already complete")
            self.aborted = True
            self.paused = False
            self._paused_at_s = None
            self._enter(Stage.COMPLETE, now_s)
            return self.stage

        if event is ProtocolEvent.PAUSE:
            if self.complete:
                raise InvalidTransition("cannot pause a complete session")
            if self.paused:
                raise InvalidTransition("already paused")
            self.paused = True
            self._paused_at_s = now_s
            return self.stage

        if event is ProtocolEvent.RESUME:
            if not self.paused:
                raise InvalidTransition("not paused")
            assert self._paused_at_s is not None
            # Shift the stage-entry reference so paused time never counts.
            self.stage_entered_s += now_s - self._paused_at_s
            self.paused = False
            self._paused_at_s = None
            return self.stage

        if event is ProtocolEvent.ADVANCE:
            if self.complete:
                raise InvalidTransition("session already complete")
            if self.paused:
                raise InvalidTransition("cannot advance while paused")
            if self.stage not in SKIPPABLE_STAGES:
                raise InvalidTransition(f"{self.stage.value} cannot be skipped")
            self._enter(next_stage(self.stage), now_s)
            return self.stage

        if event is ProtocolEvent.TIMER_ELAPSED:
            if self.complete:
                raise InvalidTransition("session already complete")
            if self.paused:
                raise InvalidTransition("timers are frozen while paused")
            duration = self.stage_duration()
            if duration is None:
                raise InvalidTransition(f"{self.stage.value} has no timer")
            # Exact-boundary entry keeps logged durations exact.
            self._enter(next_stage(self.stage), self.stage_entered_s + duration)
            return self.stage

        raise InvalidTransition(f"unknown event {event!r}")

    def tick(self, now_s: float) -> List[Tuple[Stage, float]]:
        """Fire every timer boundary at or before now_s.

        Returns [(entered_stage, boundary_time_s), ...] in order. Multiple
        boundaries can fire from one tick when the caller's clock jumps.
        """
        fired: List[Tuple[Stage, float]] = []
        if not self.started or self.paused:
            return fired
        while not self.complete:
            duration = self.stage_duration()
            if duration is None or now_s - self.stage_entered_s < duration:
                break
            boundary = self.stage_entered_s + duration
            self.inject(ProtocolEvent.TIMER_ELAPSED, boundary)
            fired.append((self.stage, boundary))
        return fired


def advance(state: ProtocolMachine, event: ProtocolEvent, now_s: float = 0.0) -> Stage:
    """Functional facade over ProtocolMachine.inject."""
    return state.inject(event, now_s)
