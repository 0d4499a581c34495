"""Desk-scale reference trainer.

Plain mini-batch gradient descent with a fixed seed: deterministic runs
outrank wall-clock speed at this scale. Inverted dropout (rate stored on
the weights) regularizes the LSTM output during training only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..errors import GaitFeedbackError
from . import network
from .features import channel_stats
from .gradients import compute_gradients
from .network import ModelWeights, ShapeMismatch, init_weights


class Diverged(GaitFeedbackError):
    """Training loss became non-finite."""


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.1
    epochs: int = 60
    batch_size: int = 256
    seed: int = 0
    conv_filters: int = network.DEFAULT_CONV_FILTERS
    kernel_size: int = network.DEFAULT_KERNEL_SIZE
    lstm_hidden: int = network.DEFAULT_LSTM_HIDDEN
    dense1_units: int = network.DEFAULT_DENSE1_UNITS
    dropout_rate: float = network.DEFAULT_DROPOUT_RATE
    # Per-step gradient L2 clip; plain GD on an LSTM needs a stability
    # guard against rare exploding steps.
    grad_clip: float = 5.0


def train_reference(
    windows: np.ndarray,
    targets: np.ndarray,
    config: TrainingConfig = TrainingConfig(),
) -> Tuple[ModelWeights, List[float]]:
    """Train from scratch on (N, T, C) windows; returns (weights, per-epoch loss).

    Deterministic for a fixed config: initialization, shuffling, and
    dropout masks all come from one seeded generator. The returned weights
    are snapped to the float32 grid so they serialize losslessly.
    """
    windows = np.asarray(windows, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if windows.ndim != 3:
        raise ShapeMismatch(f"windows must be (N, T, C), got {windows.shape}")
    if targets.shape != (windows.shape[0],):
        raise ShapeMismatch(
            f"targets shape {targets.shape} does not match {windows.shape[0]} windows"
        )
    if windows.shape[0] == 0:
        raise ShapeMismatch("dataset must be nonempty")

    n, t, c = windows.shape
    rng = np.random.default_rng(config.seed)
    mean, scale = channel_stats(windows.reshape(n * t, c))

    # Standardize the regression target as well as the inputs: raw targets
    # live around 0.1 BW, which starves the upstream layers of gradient.
    # The affine map is folded back into the output layer afterwards, so
    # the returned weights still predict body weights directly.
    target_mean = float(targets.mean())
    target_scale = float(targets.std())
    if not (np.isfinite(target_scale) and target_scale > 0):
        target_mean, target_scale = 0.0, 1.0
    targets = (targets - target_mean) / target_scale
    weights = init_weights(
        input_channels=c,
        conv_filters=config.conv_filters,
        kernel_size=config.kernel_size,
        lstm_hidden=config.lstm_hidden,
        dense1_units=config.dense1_units,
        dropout_rate=config.dropout_rate,
        norm_mean=mean,
        norm_scale=scale,
        rng=rng,
    )
    if config.epochs == 0:
        return weights, []

    work = weights.copy()
    params = work.params()
    keep = 1.0 - work.dropout_rate
    loss_trace: List[float] = []
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        seen = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            batch = windows[idx]
            batch_targets = targets[idx]
            if work.dropout_rate > 0.0:
                mask = (
                    rng.random((len(idx), work.lstm_hidden)) >= work.dropout_rate
                ) / keep
            else:
                mask = None
            grads, loss = compute_gradients(work, batch, batch_targets, dropout_mask=mask)
            if not np.isfinite(loss):
                raise Diverged(f"loss became {loss} after {len(loss_trace)} epochs")
            norm = np.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
            clip = min(1.0, config.grad_clip / norm) if norm > 0 else 1.0
            for name, grad in grads.items():
                params[name] -= config.learning_rate * clip * grad
            epoch_loss += loss * len(idx)
            seen += len(idx)
        # report the loss in BW^2 units regardless of the internal scaling
        loss_trace.append(epoch_loss / seen * target_scale * target_scale)

    # fold the target standardization into the (affine) output layer
    params["dense2_w"] *= target_scale
    params["dense2_b"] *= target_scale
    params["dense2_b"] += target_mean

    final = work.canonical()
    return final, loss_trace
