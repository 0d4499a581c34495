"""Small input-validation helpers shared by the estimator-style APIs."""

from __future__ import annotations

import numpy as np


def check_windows(X, window_frames: int, channels: int | None = None) -> np.ndarray:
    """Validate an (n_windows, window_frames, channels) float array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 3:
        raise ValueError(f"expected a 3D (n, frames, channels) array, got shape {X.shape}")
    if X.shape[1] != window_frames:
        raise ValueError(f"windows must span {window_frames} frames, got {X.shape[1]}")
    if channels is not None and X.shape[2] != channels:
        raise ValueError(f"expected {channels} channels, got {X.shape[2]}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains NaN or infinity")
    return X


def check_targets(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != n:
        raise ValueError(f"got {y.shape[0]} targets for {n} windows")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets contain NaN or infinity")
    return y


def check_series(x, min_len: int = 1, name: str = "series") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] < min_len:
        raise ValueError(f"{name} needs at least {min_len} samples, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or infinity")
    return x
