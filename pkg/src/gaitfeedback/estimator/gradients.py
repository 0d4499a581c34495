"""Analytic gradients of the mean-squared error through the whole network.

Backpropagation runs through the dense head, the (optional) inverted
dropout mask, both LSTM steps, and the convolution. Gradients are exact
for the float64 forward pass in network.py and are verified against
central finite differences in the test suite.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

from .network import PARAM_NAMES, ModelWeights, ShapeMismatch, batch_forward


def batch_loss(
    weights: ModelWeights,
    windows: np.ndarray,
    targets: np.ndarray,
    dropout_mask: np.ndarray | None = None,
) -> float:
    """MSE over the batch, with the same dropout mask the gradients use."""
    y = batch_forward(windows, weights, dropout_mask=dropout_mask)
    targets = np.asarray(targets, dtype=np.float64)
    return float(np.mean((y - targets) ** 2))


def compute_gradients(
    weights: ModelWeights,
    windows: np.ndarray,
    targets: np.ndarray,
    dropout_mask: np.ndarray | None = None,
) -> Tuple[Dict[str, np.ndarray], float]:
    """Return ({param name: gradient}, batch MSE).

    The dropout mask must be the inverted-dropout multiplier (0 or
    1/(1-rate) entries) of shape (B, H); pass None for inference-mode
    gradients. Using an explicit mask keeps the loss a fixed function of
    the weights, which is what finite-difference checking requires.
    """
    targets = np.asarray(targets, dtype=np.float64)
    if targets.ndim != 1 or targets.shape[0] != np.shape(windows)[0]:
        raise ShapeMismatch(
            f"targets shape {targets.shape} does not match batch {np.shape(windows)[0]}"
        )
    if targets.shape[0] == 0:
        raise ShapeMismatch("batch must be nonempty")

    y, cache = batch_forward(windows, weights, dropout_mask=dropout_mask, return_cache=True)
    b = targets.shape[0]
    hid = weights.lstm_hidden
    f_n, c, k = weights.conv_kernels.shape
    t_out = cache["a_conv"].shape[1]

    loss = float(np.mean((y - targets) ** 2))
    dy = (2.0 / b) * (y - targets)  # (B,)

    # Dense head.
    d_a_d1 = dy[:, None] @ weights.dense2_w  # (B, D1)
    d_dense2_w = (dy[None, :] @ cache["a_d1"])  # (1, D1)
    d_dense2_b = np.array([dy.sum()])
    d_z_d1 = d_a_d1 * (cache["z_d1"] > 0)
    d_dense1_w = d_z_d1.T @ cache["hd"]
    d_dense1_b = d_z_d1.sum(axis=0)
    d_hd = d_z_d1 @ weights.dense1_w  # (B, H)

    mask = cache["dropout_mask"]
    dh = d_hd if mask is None else d_hd * mask

    # LSTM backward through time (final step's h is the only used output).
    d_lstm_w = np.zeros_like(weights.lstm_w)
    d_lstm_u = np.zeros_like(weights.lstm_u)
    d_lstm_b = np.zeros_like(weights.lstm_b)
    d_a_conv = np.zeros_like(cache["a_conv"])
    dc = np.zeros((b, hid))
    for s in range(t_out - 1, -1, -1):
        i, f, g, o = cache["gates"][s]
        c_prev = cache["cells"][s]
        c_new = cache["cells"][s + 1]
        tanh_c = np.tanh(c_new)
        do = dh * tanh_c
        dc = dc + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        df = dc * c_prev
        dg = dc * i
        dz = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g**2),
                do * o * (1.0 - o),
            ],
            axis=1,
        )  # (B, 4H)
        x_s = cache["a_conv"][:, s, :]
        h_prev = cache["h_prev_steps"][s]
        d_lstm_w += dz.T @ x_s
        d_lstm_u += dz.T @ h_prev
        d_lstm_b += dz.sum(axis=0)
        d_a_conv[:, s, :] = dz @ weights.lstm_w
        dh = dz @ weights.lstm_u
        dc = dc * f

    # Convolution backward.
    d_z_conv = d_a_conv * (cache["z_conv"] > 0)
    d_wc = np.zeros((k * c, f_n))
    d_conv_bias = np.zeros(f_n)
    for s in range(t_out):
        d_wc += cache["cols"][:, s, :].T @ d_z_conv[:, s, :]
        d_conv_bias += d_z_conv[:, s, :].sum(axis=0)
    d_conv_kernels = d_wc.reshape(k, c, f_n).transpose(2, 1, 0)

    grads = {
        "conv_kernels": d_conv_kernels,
        "conv_bias": d_conv_bias,
        "lstm_w": d_lstm_w,
        "lstm_u": d_lstm_u,
        "lstm_b": d_lstm_b,
        "dense1_w": d_dense1_w,
        "dense1_b": d_dense1_b,
        "dense2_w": d_dense2_w,
        "dense2_b": d_dense2_b,
    }
    assert set(grads) == set(PARAM_NAMES)
    return grads, loss
