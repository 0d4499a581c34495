"""Analytic gradients versus central finite differences.

A downsized network keeps the parameter count small enough to difference
every single element while exercising every code path: both conv output
steps, both LSTM steps (so the recurrent weights see a nonzero path),
dropout, and the dense head.
"""

import numpy as np
import pytest

from gaitfeedback.estimator import (
    PARAM_NAMES,
    ModelWeights,
    ShapeMismatch,
    batch_loss,
    compute_gradients,
)

EPS = 1e-5
MAX_REL_ERR = 1e-4


def _small_weights(rng, c=3, f=2, k=3, h=3, d1=4, dropout=0.0):
    return ModelWeights(
        conv_kernels=rng.normal(0, 0.5, (f, c, k)),
        conv_bias=rng.normal(0, 0.2, f),
        lstm_w=rng.normal(0, 0.5, (4 * h, f)),
        lstm_u=rng.normal(0, 0.5, (4 * h, h)),
        lstm_b=rng.normal(0, 0.2, 4 * h),
        dense1_w=rng.normal(0, 0.5, (d1, h)),
        dense1_b=rng.normal(0, 0.2, d1),
        dense2_w=rng.normal(0, 0.5, (1, d1)),
        dense2_b=rng.normal(0, 0.2, 1),
        norm_mean=rng.normal(0, 0.5, c),
        norm_scale=np.abs(rng.normal(0, 0.5, c)) + 0.5,
        dropout_rate=dropout,
    )


def _fd_gradient(weights, windows, targets, mask, name, index):
    plus = weights.copy()
    getattr(plus, name)[index] += EPS
    minus = weights.copy()
    getattr(minus, name)[index] -= EPS
    lp = batch_loss(plus, windows, targets, dropout_mask=mask)
    lm = batch_loss(minus, windows, targets, dropout_mask=mask)
    return (lp - lm) / (2.0 * EPS)


def _check_all_params(weights, windows, targets, mask):
    grads, loss = compute_gradients(weights, windows, targets, dropout_mask=mask)
    assert np.isfinite(loss)
    worst = 0.0
    for name in PARAM_NAMES:
        analytic = grads[name]
        assert analytic.shape == getattr(weights, name).shape
        for index in np.ndindex(analytic.shape):
            numeric = _fd_gradient(weights, windows, targets, mask, name, index)
            denom = max(abs(numeric), abs(analytic[index]), 1e-8)
            rel = abs(analytic[index] - numeric) / denom
            worst = max(worst, rel)
            assert rel < MAX_REL_ERR, (
                f"{name}{list(index)}: analytic {analytic[index]:.10g} "
                f"vs numeric {numeric:.10g} (rel {rel:.3g})"
            )
    return worst


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(101)
    weights = _small_weights(rng)
    windows = rng.normal(0, 1.0, (4, 4, 3))  # kernel 3 on 4 frames -> 2 LSTM steps
    targets = rng.normal(0, 0.3, 4)
    worst = _check_all_params(weights, windows, targets, mask=None)
    assert worst < MAX_REL_ERR


def test_gradients_match_finite_differences_with_dropout_mask():
    rng = np.random.default_rng(202)
    weights = _small_weights(rng, dropout=0.5)
    windows = rng.normal(0, 1.0, (3, 4, 3))
    targets = rng.normal(0, 0.3, 3)
    # A fixed inverted-dropout mask makes the loss deterministic in the weights.
    mask = (rng.random((3, 3)) >= 0.5) / 0.5
    _check_all_params(weights, windows, targets, mask=mask)


def test_gradients_match_finite_differences_single_window():
    rng = np.random.default_rng(303)
    weights = _small_weights(rng, c=2, f=3, k=2, h=2, d1=2)
    windows = rng.normal(0, 1.0, (1, 3, 2))
    targets = np.array([0.05])
    _check_all_params(weights, windows, targets, mask=None)


def test_loss_is_mean_squared_error():
    rng = np.random.default_rng(404)
    weights = _small_weights(rng)
    windows = rng.normal(0, 1.0, (5, 4, 3))
    targets = rng.normal(0, 0.3, 5)
    from gaitfeedback.estimator import batch_forward

    y = batch_forward(windows, weights)
    expected = float(np.mean((y - targets) ** 2))
    assert batch_loss(weights, windows, targets) == pytest.approx(expected, abs=1e-15)
    _, loss = compute_gradients(weights, windows, targets)
    assert loss == pytest.approx(expected, abs=1e-15)


def test_gradient_keys_cover_every_learnable_parameter():
    rng = np.random.default_rng(505)
    weights = _small_weights(rng)
    grads, _ = compute_gradients(weights, rng.normal(0, 1, (2, 4, 3)), np.zeros(2))
    assert set(grads) == set(PARAM_NAMES)


def test_mismatched_targets_are_rejected():
    rng = np.random.default_rng(606)
    weights = _small_weights(rng)
    with pytest.raises(ShapeMismatch):
        compute_gradients(weights, rng.normal(0, 1, (2, 4, 3)), np.zeros(3))
    with pytest.raises(ShapeMismatch):
        compute_gradients(weights, np.empty((0, 4, 3)), np.zeros(0))
