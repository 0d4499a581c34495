"""Offline peak/valley event detection on the AP foot-pelvis signal.

Crests of the anterior-posterior position of the foot relative to the
pelvis mark foot contact; troughs mark swing initiation. Extrema are kept
when they are prominent enough, then thinned by a refractory period and
an alternation rule, always dropping the weaker (less prominent) of an
offending pair.
"""

from __future__ import annotations

from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..core import KinematicFrame, Limb, SegmentId, foot_segment
from .types import DetectorParams, EventKind, GaitEvent, SignalTooShort

MIN_SAMPLES = 100  # 2 s at the nominal 50 Hz


def ap_relative_position(frame: KinematicFrame, side: Limb = Limb.PARETIC) -> float:
    """Anterior (X) position of the side's foot relative to the pelvis, meters."""
    foot = frame.position[foot_segment(side).value][0]
    pelvis = frame.position[SegmentId.PELVIS.value][0]
    return float(foot) - float(pelvis)


def ap_signal(frames: Iterable[KinematicFrame], side: Limb = Limb.PARETIC):
    """(signal, timestamps_us) arrays for a frame sequence."""
    frames = list(frames)
    signal = np.array([ap_relative_position(f, side) for f in frames], dtype=np.float64)
    stamps = np.array([f.timestamp_us for f in frames], dtype=np.int64)
    return signal, stamps


def _local_maxima(signal: np.ndarray) -> List[int]:
    """Indices of strict local maxima; a flat crest counts once, at its left edge."""
    out: List[int] = []
    n = signal.shape[0]
    i = 1
    while i < n - 1:
        if signal[i] > signal[i - 1]:
            j = i
            while j + 1 < n and signal[j + 1] == signal[i]:
                j += 1
            if j + 1 < n and signal[j + 1] < signal[i]:
                out.append(i)
            i = j + 1
        else:
            i += 1
    return out


def _prominence(signal: np.ndarray, peak: int) -> float:
    """Causal prominence: height of a peak above its left-flank base.

    The base is the minimum between the peak and the nearest sample that
    exceeds it on the left (or the array edge). Only the already-seen
    flank counts, deliberately: the streaming twin must reproduce every
    offline decision in real time, where the right flank hasn't happened
    yet. On gait-like signals an extremum's left descent equals its
    conventional two-sided prominence everywhere except within the last
    fraction of a cycle before the recording stops.
    """
    value = signal[peak]
    left = value
    i = peak - 1
    while i >= 0 and signal[i] <= value:
        left = min(left, signal[i])
        i -= 1
    return float(value - left)


def _candidates(
    signal: np.ndarray, params: DetectorParams
) -> List[Tuple[int, EventKind, float]]:
    """(index, kind, prominence) for every sufficiently prominent extremum.

    An extremum within causal_confirm_frames of the signal end is dropped:
    the causal detector can never confirm it, and keeping offline-only
    events would break the offline/streaming equivalence contract.
    """
    last_confirmable = signal.shape[0] - 1 - params.causal_confirm_frames
    out = []
    for idx in _local_maxima(signal):
        if idx > last_confirmable:
            continue
        prom = _prominence(signal, idx)
        if prom >= params.min_prominence_m:
            out.append((idx, EventKind.FOOT_CONTACT, prom))
    inverted = -signal
    for idx in _local_maxima(inverted):
        if idx > last_confirmable:
            continue
        prom = _prominence(inverted, idx)
        if prom >= params.min_prominence_m:
            out.append((idx, EventKind.SWING_INIT, prom))
    out.sort(key=lambda c: c[0])
    return out


def _thin(
    candidates: List[Tuple[int, EventKind, float]],
    timestamps_us: np.ndarray,
    params: DetectorParams,
) -> List[Tuple[int, EventKind, float]]:
    """Drop the weaker of any pair violating separation or alternation."""
    events = list(candidates)
    min_sep_us = params.min_event_separation_ms * 1000.0

    def first_violation() -> int:
        for i in range(len(events) - 1):
            a, b = events[i], events[i + 1]
            too_close = (timestamps_us[b[0]] - timestamps_us[a[0]]) < min_sep_us
            same_kind = a[1] is b[1]
            if too_close or same_kind:
                return i
        return -1

    while True:
        i = first_violation()
        if i < 0:
            return events
        a, b = events[i], events[i + 1]
        del events[i if a[2] < b[2] else i + 1]


def detect_events_offline(
    signal: Sequence[float],
    timestamps_us: Sequence[int],
    params: DetectorParams = DetectorParams(),
    side: Limb = Limb.PARETIC,
) -> List[GaitEvent]:
    """Ordered, alternating foot_contact/swing_init events for a whole signal."""
    signal = np.asarray(signal, dtype=np.float64)
    timestamps_us = np.asarray(timestamps_us, dtype=np.int64)
    if signal.ndim != 1 or signal.shape != timestamps_us.shape:
        raise ValueError(
            f"signal {signal.shape} and timestamps {timestamps_us.shape} must be equal-length 1D"
        )
    if signal.shape[0] < MIN_SAMPLES:
        raise SignalTooShort(
            f"need at least {MIN_SAMPLES} samples (2 s at 50 Hz), got {signal.shape[0]}"
        )
    kept = _thin(_candidates(signal, params), timestamps_us, params)
    return [
        GaitEvent(
            timestamp_us=int(timestamps_us[idx]),
            frame_index=idx,
            kind=kind,
            side=side,
        )
        for idx, kind, _ in kept
    ]


def detect_events_from_frames(
    frames: Iterable[KinematicFrame],
    params: DetectorParams = DetectorParams(),
    side: Limb = Limb.PARETIC,
) -> List[GaitEvent]:
    signal, stamps = ap_signal(frames, side)
    return detect_events_offline(signal, stamps, params, side)
