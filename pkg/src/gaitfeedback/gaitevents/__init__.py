"""Causal and offline gait event detection from pelvis-relative foot position."""

from .detect import (
    MIN_SAMPLES,
    ap_relative_position,
    ap_signal,
    detect_events_from_frames,
    detect_events_offline,
)
from .stance import segment_stances, time_normalize
from .streaming import StreamEventDetector, detect_events_stream, run_stream
from .types import (
    STANCE_PLAUSIBLE_MS,
    DegenerateSpan,
    DetectorParams,
    EventKind,
    GaitEvent,
    SignalTooShort,
    StancePhase,
    make_stance,
)

__all__ = [
    "MIN_SAMPLES",
    "STANCE_PLAUSIBLE_MS",
    "DegenerateSpan",
    "DetectorParams",
    "EventKind",
    "GaitEvent",
    "SignalTooShort",
    "StancePhase",
    "StreamEventDetector",
    "ap_relative_position",
    "ap_signal",
    "detect_events_from_frames",
    "detect_events_offline",
    "detect_events_stream",
    "make_stance",
    "run_stream",
    "segment_stances",
    "time_normalize",
]
