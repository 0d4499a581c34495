"""Supervised training data for the AGRF estimator, built from the generator.

Each walking block is one synthetic session at a distinct propulsion-peak
level; the target for a window is the ground-truth paretic AGRF at the
window's final frame (the estimator is a causal nowcaster). A block of
standing still teaches the network that a quiet signal means zero force.
"""

from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np

from ..core.types import N_SEGMENTS, NOMINAL_FRAME_INTERVAL_US, zero_motion_frame
from ..estimator.features import frames_to_features, sliding_windows
from ..estimator.network import WINDOW_FRAMES
from .generator import ACCEL_NOISE_SCALE, GYRO_NOISE_SCALE, PELVIS_HEIGHT_M, generate
from .profile import GaitProfile

#: Peak levels spanning the hemiparetic range; multiple levels force the
#: network to read the force amplitude out of the signal instead of
#: memorizing one waveform.
DEFAULT_PEAK_LEVELS = (0.05, 0.08, 0.11, 0.15)


def still_frames(n: int, seed: int = 0, noise_sd: float = 0.0005):
    """Standing still: constant standing pose plus sensor noise."""
    rng = np.random.default_rng(seed)
    pose = np.zeros((N_SEGMENTS, 3), dtype=np.float64)
    pose[:, 2] = PELVIS_HEIGHT_M
    pose[5:, 2] = 0.05
    pose[1:3, 2] = PELVIS_HEIGHT_M * 2 / 3
    pose[3:5, 2] = PELVIS_HEIGHT_M / 3
    frames = []
    for i in range(n):
        f = zero_motion_frame(i * NOMINAL_FRAME_INTERVAL_US)
        pos = pose + rng.normal(0.0, noise_sd, (N_SEGMENTS, 3))
        accel = rng.normal(0.0, ACCEL_NOISE_SCALE * noise_sd, (N_SEGMENTS, 3))
        gyro = rng.normal(0.0, GYRO_NOISE_SCALE * noise_sd, (N_SEGMENTS, 3))
        frames.append(
            type(f)(
                timestamp_us=f.timestamp_us,
                quat=f.quat,
                free_accel=accel.astype(np.float32),
                ang_vel=gyro.astype(np.float32),
                position=pos.astype(np.float32),
            )
        )
    return frames


def session_windows(frames, truth_agrf: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Sliding windows plus the end-of-window ground-truth targets."""
    feats = frames_to_features(frames)
    windows = sliding_windows(feats, WINDOW_FRAMES)
    targets = np.asarray(truth_agrf, dtype=np.float64)[WINDOW_FRAMES - 1 :]
    return windows, targets


def make_training_set(
    peak_levels: Sequence[float] = DEFAULT_PEAK_LEVELS,
    duration_s: float = 40.0,
    seed: int = 0,
    noise_sd: float = 0.0005,
    still_s: float = 8.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Windows (n, WINDOW_FRAMES, 42) and per-window AGRF targets (n,)."""
    all_w = []
    all_t = []
    for i, peak in enumerate(peak_levels):
        profile = GaitProfile(agrf_peak_bw=float(peak), seed=seed + 101 * i + 1, noise_sd=noise_sd)
        frames, truth = generate(profile, duration_s)
        w, t = session_windows(frames, truth.agrf_bw)
        all_w.append(w)
        all_t.append(t)
    n_still = int(round(still_s / (NOMINAL_FRAME_INTERVAL_US * 1e-6)))
    if n_still >= WINDOW_FRAMES:
        frames = still_frames(n_still, seed=seed + 7919, noise_sd=noise_sd)
        w, t = session_windows(frames, np.zeros(n_still))
        all_w.append(w)
        all_t.append(t)
    return np.concatenate(all_w), np.concatenate(all_t)
