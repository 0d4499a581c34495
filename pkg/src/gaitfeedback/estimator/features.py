"""Feature extraction from kinematic frames.

The network consumes 42 channels per frame: free acceleration (3) and
angular velocity (3) for each of the 7 segments, ordered by SegmentId.
Positions and orientations stay out of the feature set; they serve event
detection and kinematic metrics instead.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..core import KinematicFrame, SegmentId

FEATURES_PER_SEGMENT = 6
N_FEATURES = FEATURES_PER_SEGMENT * len(SegmentId)


def frame_features(frame: KinematicFrame) -> np.ndarray:
    """Return the (42,) float64 feature vector for one frame."""
    out = np.empty(N_FEATURES, dtype=np.float64)
    for seg in SegmentId:
        base = seg.value * FEATURES_PER_SEGMENT
        out[base : base + 3] = frame.free_accel[seg.value]
        out[base + 3 : base + 6] = frame.ang_vel[seg.value]
    return out


def frames_to_features(frames: Iterable[KinematicFrame]) -> np.ndarray:
    """Stack per-frame features into an (N, 42) matrix."""
    rows = [frame_features(f) for f in frames]
    if not rows:
        return np.empty((0, N_FEATURES), dtype=np.float64)
    return np.stack(rows)


def sliding_windows(features: np.ndarray, window: int) -> np.ndarray:
    """All complete windows of `window` consecutive frames: (N-window+1, window, C).

    Window i ends at frame i+window-1, matching the streaming rule that the
    estimate for frame t is computed from frames t-window+1 .. t.
    """
    features = np.asarray(features, dtype=np.float64)
    n = features.shape[0]
    if n < window:
        return np.empty((0, window, features.shape[1]), dtype=np.float64)
    idx = np.arange(window)[None, :] + np.arange(n - window + 1)[:, None]
    return features[idx]


def channel_stats(features: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-channel mean and scale (std floored away from zero) for z-scoring."""
    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    scale = np.maximum(scale, 1e-6)
    return mean, scale
