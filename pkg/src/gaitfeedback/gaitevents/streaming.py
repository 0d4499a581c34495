"""Causal twin of the offline event detector.

The stream detector hunts one extremum kind at a time. A candidate is the
best sample seen so far in the hunted direction; it is committed once
causal_confirm_frames consecutive samples fail to displace it AND it
stands at least min_prominence_m away from the opposite-side reference
(the minimum/maximum seen since the previous event). Committed events
carry the candidate's own frame, so detection lag — confirmation frame
minus extremum frame — is exactly the confirmation window.

On gait-shaped signals this yields the same event set as
detect_events_offline; the offline detector mirrors the causal
constraints (left-flank prominence, and dropping extrema too close to
the signal end to confirm). The one shape where the twins can disagree
is a hesitation plateau: a same-kind extremum that tops the committed
one *more* than the confirmation window later, yet before the opposite
extremum arrives. Bounded-lag causality forces the commitment to stand,
while a batch pass prefers the later, higher sample. Walking at 50 Hz
does not produce that shape — the AP excursion reverses far faster than
the confirmation window — so the equivalence holds on the signals this
detector exists for.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from ..core import KinematicFrame, Limb, NonMonotonicTime
from .detect import ap_relative_position
from .types import DetectorParams, EventKind, GaitEvent

_Sample = Tuple[float, int, int]  # value, frame index, timestamp_us


class _Hunt:
    """Candidate tracking for one extremum kind.

    sign=+1 hunts maxima, sign=-1 minima. `ref` holds the running
    opposite extremum of everything strictly left of the candidate, so
    candidate − ref is the left-flank rise (or fall, for minima).
    """

    __slots__ = ("sign", "cand", "ref", "tail")

    def __init__(self, sign: int, seed: _Sample, ref_value: float):
        self.sign = sign
        self.cand: _Sample = seed
        self.ref = ref_value
        # best opposite-direction sample seen after the candidate; becomes
        # the next hunt's starting candidate when this one commits.
        self.tail: Optional[_Sample] = None

    def push(self, sample: _Sample) -> None:
        value = sample[0]
        if self.sign * (value - self.cand[0]) > 0:
            # Candidate displaced: its former right flank is now left of
            # the new candidate, so fold it into the reference.
            if self.tail is not None:
                self.ref = self._opp(self.ref, self.tail[0])
            self.ref = self._opp(self.ref, self.cand[0])
            self.cand = sample
            self.tail = None
        else:
            if self.tail is None or self.sign * (value - self.tail[0]) < 0:
                self.tail = sample

    def _opp(self, a: float, b: float) -> float:
        return min(a, b) if self.sign > 0 else max(a, b)

    def confirmed(self, frame_index: int, params: DetectorParams) -> bool:
        waited = frame_index - self.cand[1] >= params.causal_confirm_frames
        prominent = self.sign * (self.cand[0] - self.ref) >= params.min_prominence_m
        return waited and prominent


class StreamEventDetector:
    """Single-signal causal event detector; feed samples in time order."""

    def __init__(self, params: DetectorParams = DetectorParams(), side: Limb = Limb.PARETIC):
        self.params = params
        self.side = side
        self._index = -1
        self._last_ts: Optional[int] = None
        self._last_event: Optional[GaitEvent] = None
        # Before the first event the direction is unknown: hunt both ways.
        self._hunts: List[_Hunt] = []

    def push(self, timestamp_us: int, value: float) -> Optional[GaitEvent]:
        if self._last_ts is not None and timestamp_us <= self._last_ts:
            raise NonMonotonicTime(
                f"timestamp {timestamp_us} after {self._last_ts}"
            )
        self._last_ts = timestamp_us
        self._index += 1
        sample: _Sample = (float(value), self._index, timestamp_us)

        if not self._hunts:
            self._hunts = [
                _Hunt(+1, sample, ref_value=value),
                _Hunt(-1, sample, ref_value=value),
            ]
            return None

        for hunt in self._hunts:
            hunt.push(sample)

        ready = [h for h in self._hunts if h.confirmed(self._index, self.params)]
        if not ready:
            return None
        # Two simultaneous confirmations can only happen pre-lock; the
        # earlier extremum wins and fixes the alternation phase.
        hunt = min(ready, key=lambda h: h.cand[1])
        return self._commit(hunt)

    def _commit(self, hunt: _Hunt) -> Optional[GaitEvent]:
        value, idx, ts = hunt.cand
        if self._last_event is not None:
            sep_us = self.params.min_event_separation_ms * 1000.0
            if ts - self._last_event.timestamp_us < sep_us:
                # Refractory: stay in the same hunt rather than emit.
                return None
        kind = EventKind.FOOT_CONTACT if hunt.sign > 0 else EventKind.SWING_INIT
        event = GaitEvent(timestamp_us=ts, frame_index=idx, kind=kind, side=self.side)
        self._last_event = event

        # The committed extremum seeds the opposite hunt: its tail (best
        # opposite sample since the extremum) is the new candidate, and
        # the extremum itself is the new reference.
        assert hunt.tail is not None  # confirmation implies trailing samples
        self._hunts = [_Hunt(-hunt.sign, hunt.tail, ref_value=value)]
        return event

    def push_frame(self, frame: KinematicFrame) -> Optional[GaitEvent]:
        return self.push(frame.timestamp_us, ap_relative_position(frame, self.side))


def detect_events_stream(
    state: StreamEventDetector, timestamp_us: int, value: float
) -> Optional[GaitEvent]:
    """Functional facade over StreamEventDetector.push."""
    return state.push(timestamp_us, value)


def run_stream(
    signal,
    timestamps_us,
    params: DetectorParams = DetectorParams(),
    side: Limb = Limb.PARETIC,
) -> Tuple[List[GaitEvent], List[int]]:
    """Feed a whole signal through the stream detector.

    Returns (events, emission_frames) where emission_frames[i] is the
    sample index at which events[i] was committed — the lag oracle.
    """
    signal = np.asarray(signal, dtype=np.float64)
    timestamps_us = np.asarray(timestamps_us, dtype=np.int64)
    detector = StreamEventDetector(params, side)
    events: List[GaitEvent] = []
    emitted_at: List[int] = []
    for i in range(signal.shape[0]):
        event = detector.push(int(timestamps_us[i]), float(signal[i]))
        if event is not None:
            events.append(event)
            emitted_at.append(i)
    return events, emitted_at
