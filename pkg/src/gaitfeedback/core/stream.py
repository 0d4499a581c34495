"""Stream-level frame invariants.

Frames may individually be valid while the stream is not: timestamps must
be strictly increasing, and inter-frame gaps beyond tolerance are flagged
(never dropped) so feedback-timing consumers can react while analysis
consumers ignore the flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from ..errors import GaitFeedbackError
from .types import FRAME_GAP_TOLERANCE_US, KinematicFrame


class NonMonotonicTime(GaitFeedbackError):
    """A frame timestamp did not strictly increase."""


@dataclass(frozen=True)
class FrameTick:
    frame: KinematicFrame
    dt_us: Optional[int]  # None for the first frame of a stream
    gap_exceeded: bool


class StreamGuard:
    """Single-stream, single-writer timestamp guard."""

    def __init__(self, gap_tolerance_us: int = FRAME_GAP_TOLERANCE_US):
        self.gap_tolerance_us = gap_tolerance_us
        self._last_us: Optional[int] = None

    def admit(self, frame: KinematicFrame) -> FrameTick:
        if self._last_us is not None and frame.timestamp_us <= self._last_us:
            raise NonMonotonicTime(
                f"timestamp {frame.timestamp_us} follows {self._last_us}"
            )
        dt = None if self._last_us is None else frame.timestamp_us - self._last_us
        self._last_us = frame.timestamp_us
        return FrameTick(frame, dt, dt is not None and dt > self.gap_tolerance_us)


def guard_stream(frames: Iterable[KinematicFrame]) -> Iterator[FrameTick]:
    guard = StreamGuard()
    for frame in frames:
        yield guard.admit(frame)
