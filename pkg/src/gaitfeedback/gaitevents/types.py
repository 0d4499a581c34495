"""Event and stance-phase types for gait segmentation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..core import Limb
from ..errors import GaitFeedbackError


class EventKind(str, Enum):
    FOOT_CONTACT = "foot_contact"
    SWING_INIT = "swing_init"


class SignalTooShort(GaitFeedbackError):
    """Offline detection needs at least 2 s of signal at 50 Hz."""


class DegenerateSpan(GaitFeedbackError):
    """A stance span too short to resample."""


@dataclass(frozen=True, order=True)
class GaitEvent:
    """A detected extremum in the foot-relative-to-pelvis anterior position.

    Crests are foot contacts, troughs are swing initiations. frame_index
    refers to the sample the extremum occurred at, not the (later) sample
    a causal detector confirmed it at.
    """

    timestamp_us: int
    frame_index: int
    kind: EventKind
    side: Limb = Limb.PARETIC


# Stance durations a plausible adult gait can produce; anything outside is
# kept but flagged so analysis can exclude it.
STANCE_PLAUSIBLE_MS = (200.0, 2000.0)


@dataclass(frozen=True)
class StancePhase:
    """One foot_contact -> swing_init span on a single side."""

    side: Limb
    start: GaitEvent
    end: GaitEvent
    plausible: bool

    def __post_init__(self):
        if self.start.kind is not EventKind.FOOT_CONTACT:
            raise ValueError("stance must start at a foot_contact event")
        if self.end.kind is not EventKind.SWING_INIT:
            raise ValueError("stance must end at a swing_init event")
        if self.start.timestamp_us >= self.end.timestamp_us:
            raise ValueError("stance start must precede its end")

    @property
    def start_frame(self) -> int:
        return self.start.frame_index

    @property
    def end_frame(self) -> int:
        return self.end.frame_index

    @property
    def duration_ms(self) -> float:
        return (self.end.timestamp_us - self.start.timestamp_us) / 1000.0


def make_stance(start: GaitEvent, end: GaitEvent) -> StancePhase:
    lo, hi = STANCE_PLAUSIBLE_MS
    duration_ms = (end.timestamp_us - start.timestamp_us) / 1000.0
    return StancePhase(
        side=start.side,
        start=start,
        end=end,
        plausible=lo <= duration_ms <= hi,
    )


@dataclass(frozen=True)
class DetectorParams:
    """Tunable extremum-detection knobs.

    min_prominence_m: how far an extremum must stand out from its
        surroundings; defaults to half a short step length so noise ripple
        never qualifies.
    min_event_separation_ms: refractory period between retained events.
    causal_confirm_frames: how many non-exceeding samples the streaming
        detector waits before committing to an extremum (its max lag).
    """

    min_prominence_m: float = 0.05
    min_event_separation_ms: float = 300.0
    causal_confirm_frames: int = 3

    def __post_init__(self):
        if self.min_prominence_m <= 0:
            raise ValueError("min_prominence_m must be positive")
        if self.min_event_separation_ms <= 0:
            raise ValueError("min_event_separation_ms must be positive")
        if self.causal_confirm_frames < 1:
            raise ValueError("causal_confirm_frames must be at least 1")
