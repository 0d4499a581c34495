"""Frame-by-frame online inference.

The sliding window covers the current and five previous frames; until six
frames are buffered the estimate is 0 BW with warmed_up=False so the
50 Hz cadence stays uniform and downstream consumers can simply skip
non-warmed estimates. LSTM state is window-local, so streaming output is
bit-identical to re-evaluating each window offline.
"""

from __future__ import annotations

import time
from typing import Iterable, List, Optional

import numpy as np

from ..core import AGRF_SANITY_BOUND_BW, AgrfEstimate, KinematicFrame
from .features import frame_features, frames_to_features, sliding_windows
from .network import WINDOW_FRAMES, ModelWeights, predict_window

_CLAMP = np.nextafter(AGRF_SANITY_BOUND_BW, 0.0)


class InferenceState:
    """Ring buffer of the last `window` feature vectors plus a frame counter."""

    def __init__(self, channels: int, window: int = WINDOW_FRAMES):
        self.window = window
        self.buffer = np.zeros((window, channels), dtype=np.float64)
        self.frames_seen = 0

    @property
    def warmed_up(self) -> bool:
        return self.frames_seen >= self.window

    def push(self, features: np.ndarray) -> None:
        self.buffer[self.frames_seen % self.window] = features
        self.frames_seen += 1

    def current_window(self) -> np.ndarray:
        """Buffered frames in arrival order, oldest first."""
        start = self.frames_seen % self.window
        return np.roll(self.buffer, -start, axis=0)


def predict_frame(
    state: InferenceState, frame: KinematicFrame, weights: ModelWeights
) -> AgrfEstimate:
    """Push one frame; emit the per-frame AGRF estimate.

    Output is clamped just inside the walking sanity bound; an untrained
    network on pathological input must not poison downstream consumers.
    """
    started = time.perf_counter_ns()
    state.push(frame_features(frame))
    if not state.warmed_up:
        return AgrfEstimate(
            timestamp_us=frame.timestamp_us,
            agrf_bw=0.0,
            warmed_up=False,
            latency_us=(time.perf_counter_ns() - started) // 1000,
        )
    value = predict_window(state.current_window(), weights)
    value = float(np.clip(value, -_CLAMP, _CLAMP))
    return AgrfEstimate(
        timestamp_us=frame.timestamp_us,
        agrf_bw=value,
        warmed_up=True,
        latency_us=(time.perf_counter_ns() - started) // 1000,
    )


class StreamingEstimator:
    """Single-stream stateful wrapper around predict_frame."""

    def __init__(self, weights: ModelWeights):
        self.weights = weights
        self.state = InferenceState(weights.input_channels)

    def push(self, frame: KinematicFrame) -> AgrfEstimate:
        return predict_frame(self.state, frame, self.weights)

    def reset(self) -> None:
        self.state = InferenceState(self.weights.input_channels)


def evaluate_sequence(
    frames: Iterable[KinematicFrame], weights: ModelWeights
) -> List[AgrfEstimate]:
    """Offline whole-sequence evaluation of the same window rule.

    Used as the streaming equivalence oracle: one estimate per frame, the
    first window-1 of them non-warmed zeros.
    """
    frames = list(frames)
    features = frames_to_features(frames)
    windows = sliding_windows(features, WINDOW_FRAMES)
    out: List[AgrfEstimate] = []
    for i, frame in enumerate(frames):
        if i < WINDOW_FRAMES - 1:
            out.append(AgrfEstimate(frame.timestamp_us, 0.0, warmed_up=False))
        else:
            value = predict_window(windows[i - (WINDOW_FRAMES - 1)], weights)
            value = float(np.clip(value, -_CLAMP, _CLAMP))
            out.append(AgrfEstimate(frame.timestamp_us, value, warmed_up=True))
    return out


def measure_latency(
    weights: ModelWeights,
    frames: Iterable[KinematicFrame],
    min_frames: int = 100,
) -> dict:
    """p50/p95/max per-frame inference time (microseconds) over a replayed stream."""
    estimator = StreamingEstimator(weights)
    samples: List[int] = []
    for frame in frames:
        samples.append(estimator.push(frame).latency_us)
    if len(samples) < min_frames:
        raise ValueError(f"need at least {min_frames} frames, got {len(samples)}")
    arr = np.asarray(samples, dtype=np.float64)
    return {
        "n": len(samples),
        "p50_us": float(np.percentile(arr, 50)),
        "p95_us": float(np.percentile(arr, 95)),
        "max_us": float(arr.max()),
    }
