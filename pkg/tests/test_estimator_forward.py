"""Forward-pass correctness against independent direct-summation oracles.

The oracle below computes every output element with plain Python loops and
math.* scalar functions — no im2col, no matrix products — so a layout,
transpose, or gate-order bug in the vectorized implementation cannot hide.
"""

import math

import numpy as np
import pytest

from gaitfeedback.estimator import (
    ModelWeights,
    ShapeMismatch,
    batch_forward,
    conv1d_forward,
    dense_forward,
    init_weights,
    lstm_forward,
    lstm_step,
    normalize_window,
    predict_window,
)
from gaitfeedback.estimator.network import _sigmoid


def _random_weights(rng, c, f, k, h, d1):
    return ModelWeights(
        conv_kernels=rng.normal(0, 0.6, (f, c, k)),
        conv_bias=rng.normal(0, 0.3, f),
        lstm_w=rng.normal(0, 0.5, (4 * h, f)),
        lstm_u=rng.normal(0, 0.5, (4 * h, h)),
        lstm_b=rng.normal(0, 0.3, 4 * h),
        dense1_w=rng.normal(0, 0.5, (d1, h)),
        dense1_b=rng.normal(0, 0.3, d1),
        dense2_w=rng.normal(0, 0.5, (1, d1)),
        dense2_b=rng.normal(0, 0.3, 1),
        norm_mean=rng.normal(0, 1.0, c),
        norm_scale=np.abs(rng.normal(0, 1.0, c)) + 0.5,
    )


def oracle_predict(window, weights):
    """Scalar-loop forward pass; returns (conv, final_h, y)."""
    win = np.asarray(window, dtype=np.float64).tolist()
    ck = weights.conv_kernels.tolist()
    cb = weights.conv_bias.tolist()
    lw = weights.lstm_w.tolist()
    lu = weights.lstm_u.tolist()
    lb = weights.lstm_b.tolist()
    d1w = weights.dense1_w.tolist()
    d1b = weights.dense1_b.tolist()
    d2w = weights.dense2_w.tolist()
    d2b = weights.dense2_b.tolist()
    mean = weights.norm_mean.tolist()
    scale = weights.norm_scale.tolist()
    f_n, c_n, k_n = weights.conv_kernels.shape
    h_n = weights.lstm_hidden
    d1_n = weights.dense1_units
    t_n = len(win)

    xn = [[(win[t][c] - mean[c]) / scale[c] for c in range(c_n)] for t in range(t_n)]

    conv = []
    for t in range(t_n - k_n + 1):
        row = []
        for f in range(f_n):
            acc = cb[f]
            for c in range(c_n):
                for k in range(k_n):
                    acc += ck[f][c][k] * xn[t + k][c]
            row.append(max(acc, 0.0))
        conv.append(row)

    def sig(x):
        return 1.0 / (1.0 + math.exp(-x)) if x >= 0 else math.exp(x) / (1.0 + math.exp(x))

    h = [0.0] * h_n
    cell = [0.0] * h_n
    for x in conv:
        z = []
        for j in range(4 * h_n):
            acc = lb[j]
            for f in range(f_n):
                acc += lw[j][f] * x[f]
            for u in range(h_n):
                acc += lu[j][u] * h[u]
            z.append(acc)
        nh, nc = [], []
        for j in range(h_n):
            gi = sig(z[j])
            gf = sig(z[h_n + j])
            gg = math.tanh(z[2 * h_n + j])
            go = sig(z[3 * h_n + j])
            cj = gf * cell[j] + gi * gg
            nc.append(cj)
            nh.append(go * math.tanh(cj))
        h, cell = nh, nc

    y = d2b[0]
    for d in range(d1_n):
        acc = d1b[d]
        for j in range(h_n):
            acc += d1w[d][j] * h[j]
        y += d2w[0][d] * max(acc, 0.0)
    return np.array(conv), np.array(h), y


def _close(a, b, tol=1e-6):
    return abs(a - b) <= tol * max(1.0, abs(b))


def test_forward_matches_oracle_on_100_randomized_cases():
    rng = np.random.default_rng(20240901)
    for case in range(100):
        c = int(rng.integers(1, 6))
        k = int(rng.integers(1, 5))
        f = int(rng.integers(1, 7))
        h = int(rng.integers(1, 6))
        d1 = int(rng.integers(1, 5))
        t = k + int(rng.integers(1, 4))
        weights = _random_weights(rng, c, f, k, h, d1)
        window = rng.normal(0, 1.5, (t, c))

        conv_ref, h_ref, y_ref = oracle_predict(window, weights)
        conv = conv1d_forward(normalize_window(window, weights), weights)
        h_out = lstm_forward(conv, weights)
        y = predict_window(window, weights)

        assert np.allclose(conv, conv_ref, rtol=1e-6, atol=1e-9), f"conv, case {case}"
        assert np.allclose(h_out, h_ref, rtol=1e-6, atol=1e-9), f"lstm, case {case}"
        assert _close(y, y_ref), f"dense, case {case}: {y} vs {y_ref}"
        assert _close(dense_forward(h_out, weights), y_ref), f"head, case {case}"


def test_forward_matches_oracle_at_full_architecture():
    rng = np.random.default_rng(7)
    for case in range(3):
        weights = _random_weights(rng, 42, 128, 5, 64, 32)
        window = rng.normal(0, 1.5, (6, 42))
        _, _, y_ref = oracle_predict(window, weights)
        assert _close(predict_window(window, weights), y_ref), f"case {case}"


def test_zero_weights_pass_only_the_output_bias_through():
    # All-zero gates: i=f=o=0.5 but g=tanh(0)=0, so c=0, h=0 and the
    # prediction is exactly the final bias, independent of the input.
    weights = ModelWeights(
        conv_kernels=np.zeros((4, 3, 2)),
        conv_bias=np.zeros(4),
        lstm_w=np.zeros((8, 4)),
        lstm_u=np.zeros((8, 2)),
        lstm_b=np.zeros(8),
        dense1_w=np.zeros((3, 2)),
        dense1_b=np.zeros(3),
        dense2_w=np.zeros((1, 3)),
        dense2_b=np.array([0.7]),
        norm_mean=np.zeros(3),
        norm_scale=np.ones(3),
    )
    rng = np.random.default_rng(1)
    for _ in range(5):
        assert predict_window(rng.normal(0, 10, (5, 3)), weights) == 0.7


def test_delta_kernel_shifts_and_biases_the_input():
    # kernel[0, 0, 2] = 1 picks out channel 0 two frames into each window.
    weights = ModelWeights(
        conv_kernels=np.zeros((1, 1, 5)),
        conv_bias=np.array([0.25]),
        lstm_w=np.zeros((4, 1)),
        lstm_u=np.zeros((4, 1)),
        lstm_b=np.zeros(4),
        dense1_w=np.zeros((1, 1)),
        dense1_b=np.zeros(1),
        dense2_w=np.zeros((1, 1)),
        dense2_b=np.zeros(1),
        norm_mean=np.zeros(1),
        norm_scale=np.ones(1),
    )
    weights.conv_kernels[0, 0, 2] = 1.0
    window = np.array([[-1.0], [2.0], [0.5], [-3.0], [4.0], [1.0]])
    out = conv1d_forward(window, weights)
    # t=0 sees window[2]+0.25 = 0.75, t=1 sees window[3]+0.25 -> relu -> 0
    assert out.shape == (2, 1)
    assert out[0, 0] == 0.75
    assert out[1, 0] == 0.0


def test_six_frame_window_with_kernel_five_yields_two_steps(rng_weights=None):
    rng = np.random.default_rng(3)
    weights = _random_weights(rng, 42, 8, 5, 4, 4)
    conv = conv1d_forward(rng.normal(0, 1, (6, 42)), weights)
    assert conv.shape == (2, 8)


def test_normalize_window_is_plain_z_scoring():
    weights = _random_weights(np.random.default_rng(4), 3, 2, 2, 2, 2)
    window = np.random.default_rng(5).normal(0, 2, (4, 3))
    expected = (window - weights.norm_mean) / weights.norm_scale
    assert np.array_equal(normalize_window(window, weights), expected)


def test_sigmoid_saturates_without_overflow():
    with np.errstate(over="raise"):
        out = _sigmoid(np.array([800.0, -800.0, 0.0]))
    assert out[0] == 1.0
    assert out[1] == 0.0
    assert out[2] == 0.5


def test_lstm_step_from_zero_state_matches_scalar_formula():
    rng = np.random.default_rng(11)
    weights = _random_weights(rng, 2, 3, 2, 2, 2)
    x = rng.normal(0, 1, 3)
    h, c = lstm_step((np.zeros(2), np.zeros(2)), x, weights)
    z = weights.lstm_w @ x + weights.lstm_b
    for j in range(2):
        gi = 1.0 / (1.0 + math.exp(-z[j]))
        gf = 1.0 / (1.0 + math.exp(-z[2 + j]))
        gg = math.tanh(z[4 + j])
        go = 1.0 / (1.0 + math.exp(-z[6 + j]))
        assert _close(c[j], gi * gg, 1e-12)
        assert _close(h[j], go * math.tanh(gi * gg), 1e-12)


def test_batch_forward_agrees_with_per_window_path():
    rng = np.random.default_rng(21)
    weights = _random_weights(rng, 5, 6, 3, 4, 3)
    windows = rng.normal(0, 1, (9, 5, 5))
    batched = batch_forward(windows, weights)
    single = np.array([predict_window(w, weights) for w in windows])
    assert np.allclose(batched, single, rtol=0, atol=1e-12)


def test_all_ones_dropout_mask_is_identity():
    rng = np.random.default_rng(22)
    weights = _random_weights(rng, 4, 5, 2, 3, 3)
    windows = rng.normal(0, 1, (6, 4, 4))
    plain = batch_forward(windows, weights)
    masked = batch_forward(windows, weights, dropout_mask=np.ones((6, 3)))
    assert np.array_equal(plain, masked)


def test_shape_errors_are_loud():
    weights = init_weights(input_channels=4, conv_filters=3, kernel_size=2,
                           lstm_hidden=2, dense1_units=2)
    with pytest.raises(ShapeMismatch):
        normalize_window(np.zeros((6, 5)), weights)
    with pytest.raises(ShapeMismatch):
        conv1d_forward(np.zeros((1, 4)), weights)  # shorter than kernel
    with pytest.raises(ShapeMismatch):
        lstm_step((np.zeros(3), np.zeros(3)), np.zeros(3), weights)
    with pytest.raises(ShapeMismatch):
        dense_forward(np.zeros(5), weights)
    with pytest.raises(ShapeMismatch):
        batch_forward(np.zeros((2, 6)), weights)


def test_weight_validation_rejects_inconsistent_and_nonfinite_arrays():
    from gaitfeedback.estimator import NonFiniteWeight

    good = init_weights(input_channels=3, conv_filters=2, kernel_size=2,
                        lstm_hidden=2, dense1_units=2)
    bad = good.copy()
    bad.dense1_b = np.zeros(5)
    with pytest.raises(ShapeMismatch):
        bad.validate()

    nan = good.copy()
    nan.lstm_u[0, 0] = np.nan
    with pytest.raises(NonFiniteWeight):
        nan.validate()

    with pytest.raises(ShapeMismatch):
        flat = good.copy()
        flat.norm_scale[0] = 0.0
        flat.validate()
