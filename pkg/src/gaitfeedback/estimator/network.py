"""From-scratch CNN-LSTM forward pass.

Architecture, applied to a sliding window of 6 frames x C channels:

    z-score (per-channel stats stored with the weights)
    -> Conv1D, valid padding, kernel 5, F filters, ReLU  -> 2 time steps
    -> LSTM, H hidden units, zero initial state per window, gate order (i, f, g, o)
    -> dropout (training only; identity at inference)
    -> Dense(D1) + ReLU
    -> Dense(1) -> AGRF in body weights

All in-memory math is float64. The LSTM state is window-local: it resets
to zero for every window, which makes streaming and whole-sequence
evaluation bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Tuple

import numpy as np

from ..errors import GaitFeedbackError

WINDOW_FRAMES = 6
DEFAULT_CONV_FILTERS = 128
DEFAULT_KERNEL_SIZE = 5
DEFAULT_LSTM_HIDDEN = 64
DEFAULT_DENSE1_UNITS = 32
DEFAULT_DROPOUT_RATE = 0.3

PARAM_NAMES = (
    "conv_kernels",
    "conv_bias",
    "lstm_w",
    "lstm_u",
    "lstm_b",
    "dense1_w",
    "dense1_b",
    "dense2_w",
    "dense2_b",
)


class ShapeMismatch(GaitFeedbackError):
    """Arrays fed to the network do not have mutually consistent shapes."""


class NonFiniteWeight(GaitFeedbackError):
    """A weight file or weight structure contains NaN or infinity."""


def _f64(a) -> np.ndarray:
    return np.asarray(a, dtype=np.float64)


@dataclass
class ModelWeights:
    """All learnable parameters plus the input normalization stats.

    Shapes (F filters, C input channels, K kernel, H LSTM units, D1 dense units):
        conv_kernels (F, C, K)      conv_bias (F,)
        lstm_w (4H, F)              lstm_u (4H, H)          lstm_b (4H,)
        dense1_w (D1, H)            dense1_b (D1,)
        dense2_w (1, D1)            dense2_b (1,)
        norm_mean (C,)              norm_scale (C,) strictly positive

    LSTM gate blocks are stacked (i, f, g, o) along the first axis.
    Treat instances as immutable once loaded; the trainer works on copies.
    """

    conv_kernels: np.ndarray
    conv_bias: np.ndarray
    lstm_w: np.ndarray
    lstm_u: np.ndarray
    lstm_b: np.ndarray
    dense1_w: np.ndarray
    dense1_b: np.ndarray
    dense2_w: np.ndarray
    dense2_b: np.ndarray
    norm_mean: np.ndarray
    norm_scale: np.ndarray
    dropout_rate: float = DEFAULT_DROPOUT_RATE

    def __post_init__(self):
        for name in PARAM_NAMES + ("norm_mean", "norm_scale"):
            setattr(self, name, _f64(getattr(self, name)))
        self.validate()

    @property
    def conv_filters(self) -> int:
        return self.conv_kernels.shape[0]

    @property
    def input_channels(self) -> int:
        return self.conv_kernels.shape[1]

    @property
    def kernel_size(self) -> int:
        return self.conv_kernels.shape[2]

    @property
    def lstm_hidden(self) -> int:
        return self.lstm_u.shape[1]

    @property
    def dense1_units(self) -> int:
        return self.dense1_w.shape[0]

    def validate(self) -> None:
        f, c, k = self.conv_kernels.shape
        h = self.lstm_u.shape[1]
        d1 = self.dense1_w.shape[0]
        expected = {
            "conv_bias": (f,),
            "lstm_w": (4 * h, f),
            "lstm_u": (4 * h, h),
            "lstm_b": (4 * h,),
            "dense1_w": (d1, h),
            "dense1_b": (d1,),
            "dense2_w": (1, d1),
            "dense2_b": (1,),
            "norm_mean": (c,),
            "norm_scale": (c,),
        }
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ShapeMismatch(f"{name}: expected {shape}, got {got}")
        for name in PARAM_NAMES + ("norm_mean", "norm_scale"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NonFiniteWeight(f"non-finite values in {name}")
        if np.any(self.norm_scale <= 0):
            raise ShapeMismatch("norm_scale must be strictly positive")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ShapeMismatch(f"dropout_rate {self.dropout_rate} outside [0, 1)")

    def params(self) -> Dict[str, np.ndarray]:
        """Learnable parameter arrays, keyed by canonical name."""
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def copy(self) -> "ModelWeights":
        return replace(self, **{n: getattr(self, n).copy() for n in PARAM_NAMES},
                       norm_mean=self.norm_mean.copy(), norm_scale=self.norm_scale.copy())

    def canonical(self) -> "ModelWeights":
        """Snap every array to the float32 grid used by the weight file."""
        quant = {
            n: getattr(self, n).astype(np.float32).astype(np.float64)
            for n in PARAM_NAMES + ("norm_mean", "norm_scale")
        }
        return replace(self, **quant)

    def __eq__(self, other) -> bool:
        # dropout_rate is a training-time knob, not part of the inference
        # function, so it stays out of identity (and out of the weight file).
        if not isinstance(other, ModelWeights):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, n), getattr(other, n))
            for n in PARAM_NAMES + ("norm_mean", "norm_scale")
        )


def init_weights(
    input_channels: int,
    conv_filters: int = DEFAULT_CONV_FILTERS,
    kernel_size: int = DEFAULT_KERNEL_SIZE,
    lstm_hidden: int = DEFAULT_LSTM_HIDDEN,
    dense1_units: int = DEFAULT_DENSE1_UNITS,
    dropout_rate: float = DEFAULT_DROPOUT_RATE,
    norm_mean=None,
    norm_scale=None,
    rng: np.random.Generator | None = None,
) -> ModelWeights:
    """Seeded He/Glorot initialization, snapped to the float32 grid.

    The forget-gate bias starts at 1 so early gradients flow through the
    cell state; everything else follows the usual fan-based scales.
    """
    rng = rng or np.random.default_rng(0)
    f, c, k, h, d1 = conv_filters, input_channels, kernel_size, lstm_hidden, dense1_units

    def he(shape, fan_in):
        return rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape)

    def glorot(shape, fan_in, fan_out):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-limit, limit, size=shape)

    lstm_b = np.zeros(4 * h)
    lstm_b[h : 2 * h] = 1.0
    weights = ModelWeights(
        conv_kernels=he((f, c, k), c * k),
        conv_bias=np.zeros(f),
        lstm_w=glorot((4 * h, f), f, h),
        lstm_u=glorot((4 * h, h), h, h),
        lstm_b=lstm_b,
        dense1_w=glorot((d1, h), h, d1),
        dense1_b=np.zeros(d1),
        dense2_w=glorot((1, d1), d1, 1),
        dense2_b=np.zeros(1),
        norm_mean=np.zeros(c) if norm_mean is None else norm_mean,
        norm_scale=np.ones(c) if norm_scale is None else norm_scale,
        dropout_rate=dropout_rate,
    )
    return weights.canonical()


def normalize_window(window: np.ndarray, weights: ModelWeights) -> np.ndarray:
    window = _f64(window)
    if window.ndim != 2 or window.shape[1] != weights.input_channels:
        raise ShapeMismatch(
            f"window shape {window.shape}, expected (T, {weights.input_channels})"
        )
    return (window - weights.norm_mean) / weights.norm_scale


def conv1d_forward(window: np.ndarray, weights: ModelWeights) -> np.ndarray:
    """Valid 1D convolution over time with ReLU.

    out[t, f] = relu(bias[f] + sum_{k, c} kernel[f, c, k] * window[t + k, c])

    A 6-frame window with kernel 5 yields exactly 2 output steps. The input
    is taken as already normalized.
    """
    window = _f64(window)
    f, c, k = weights.conv_kernels.shape
    if window.ndim != 2 or window.shape[1] != c:
        raise ShapeMismatch(f"window shape {window.shape}, expected (T, {c})")
    t_out = window.shape[0] - k + 1
    if t_out < 1:
        raise ShapeMismatch(f"window of {window.shape[0]} frames is shorter than kernel {k}")
    # im2col: row t is window[t:t+k] flattened time-major, so column index k*C + c
    # must line up with kernel[f, c, k] below.
    cols = np.stack([window[t : t + k].reshape(-1) for t in range(t_out)])
    wc = weights.conv_kernels.transpose(2, 1, 0).reshape(k * c, f)
    z = cols @ wc + weights.conv_bias
    return np.maximum(z, 0.0)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Split by sign to stay overflow-free for large |x|.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def lstm_step(
    state: Tuple[np.ndarray, np.ndarray], x: np.ndarray, weights: ModelWeights
) -> Tuple[np.ndarray, np.ndarray]:
    """One LSTM cell update; returns (h', c').

    Gate order in the stacked weights is (i, f, g, o):
        i, f, o = sigmoid, g = tanh
        c' = f * c + i * g
        h' = o * tanh(c')
    """
    h, c = (_f64(state[0]), _f64(state[1]))
    x = _f64(x)
    hid = weights.lstm_hidden
    if h.shape != (hid,) or c.shape != (hid,):
        raise ShapeMismatch(f"state shapes {h.shape}/{c.shape}, expected ({hid},)")
    if x.shape != (weights.conv_filters,):
        raise ShapeMismatch(f"input shape {x.shape}, expected ({weights.conv_filters},)")
    z = weights.lstm_w @ x + weights.lstm_u @ h + weights.lstm_b
    i = _sigmoid(z[0:hid])
    f = _sigmoid(z[hid : 2 * hid])
    g = np.tanh(z[2 * hid : 3 * hid])
    o = _sigmoid(z[3 * hid : 4 * hid])
    c_new = f * c + i * g
    h_new = o * np.tanh(c_new)
    return h_new, c_new


def lstm_forward(sequence: np.ndarray, weights: ModelWeights) -> np.ndarray:
    """Run the LSTM from zero state over (T, F); return the final hidden state."""
    hid = weights.lstm_hidden
    h = np.zeros(hid)
    c = np.zeros(hid)
    for t in range(sequence.shape[0]):
        h, c = lstm_step((h, c), sequence[t], weights)
    return h


def dense_forward(h: np.ndarray, weights: ModelWeights) -> float:
    """Dense(ReLU) head followed by the scalar output neuron."""
    if h.shape != (weights.lstm_hidden,):
        raise ShapeMismatch(f"hidden shape {h.shape}, expected ({weights.lstm_hidden},)")
    d1 = np.maximum(weights.dense1_w @ h + weights.dense1_b, 0.0)
    return float((weights.dense2_w @ d1 + weights.dense2_b)[0])


def predict_window(window: np.ndarray, weights: ModelWeights) -> float:
    """Full forward pass for one raw (unnormalized) window; dropout is identity."""
    xn = normalize_window(window, weights)
    conv = conv1d_forward(xn, weights)
    h = lstm_forward(conv, weights)
    return dense_forward(h, weights)


def batch_forward(
    windows: np.ndarray,
    weights: ModelWeights,
    dropout_mask: np.ndarray | None = None,
    return_cache: bool = False,
):
    """Vectorized forward over (B, T, C) raw windows; returns (B,) predictions.

    dropout_mask, when given, is an inverted-dropout multiplier of shape
    (B, H) applied to the final LSTM hidden state (training passes only).
    With return_cache=True also returns the intermediates backprop needs.
    """
    windows = _f64(windows)
    if windows.ndim != 3:
        raise ShapeMismatch(f"windows must be (B, T, C), got {windows.shape}")
    b, t, c = windows.shape
    f_n, c_w, k = weights.conv_kernels.shape
    if c != c_w:
        raise ShapeMismatch(f"windows carry {c} channels, weights expect {c_w}")
    t_out = t - k + 1
    if t_out < 1:
        raise ShapeMismatch(f"window of {t} frames is shorter than kernel {k}")
    hid = weights.lstm_hidden

    xn = (windows - weights.norm_mean) / weights.norm_scale
    cols = np.stack([xn[:, s : s + k, :].reshape(b, k * c) for s in range(t_out)], axis=1)
    wc = weights.conv_kernels.transpose(2, 1, 0).reshape(k * c, f_n)
    z_conv = cols @ wc + weights.conv_bias
    a_conv = np.maximum(z_conv, 0.0)

    h = np.zeros((b, hid))
    cst = np.zeros((b, hid))
    gates = []
    cells = []
    h_prev_steps = []
    for s in range(t_out):
        x_s = a_conv[:, s, :]
        z = x_s @ weights.lstm_w.T + h @ weights.lstm_u.T + weights.lstm_b
        i = _sigmoid(z[:, 0:hid])
        f = _sigmoid(z[:, hid : 2 * hid])
        g = np.tanh(z[:, 2 * hid : 3 * hid])
        o = _sigmoid(z[:, 3 * hid : 4 * hid])
        h_prev_steps.append(h)
        cells.append(cst)
        cst = f * cst + i * g
        h = o * np.tanh(cst)
        gates.append((i, f, g, o))
    cells.append(cst)

    hd = h if dropout_mask is None else h * dropout_mask
    z_d1 = hd @ weights.dense1_w.T + weights.dense1_b
    a_d1 = np.maximum(z_d1, 0.0)
    y = (a_d1 @ weights.dense2_w.T + weights.dense2_b)[:, 0]

    if not return_cache:
        return y
    cache = {
        "xn": xn,
        "cols": cols,
        "z_conv": z_conv,
        "a_conv": a_conv,
        "gates": gates,
        "cells": cells,
        "h_prev_steps": h_prev_steps,
        "h_final": h,
        "hd": hd,
        "dropout_mask": dropout_mask,
        "z_d1": z_d1,
        "a_d1": a_d1,
        "y": y,
    }
    return y, cache
