"""Weight file serialization (.agrfw).

Layout (little-endian):

    magic           u32   0x41475246 ("AGRF")
    version         u8    1
    input_channels  u16
    conv_filters    u16
    kernel          u8
    lstm_hidden     u16
    dense1          u16
    channel means   f32[input_channels]
    channel scales  f32[input_channels]
    parameter blobs, f32 row-major, in order:
        conv kernels, conv bias, lstm input W, lstm recurrent W,
        lstm bias, dense1 W, dense1 bias, dense2 W, dense2 bias

LSTM gate blocks are stored stacked (i, f, g, o). Values are float32 on
disk; loading returns float64 arrays, so save(load(b)) == b and
load(save(w)) == w whenever w sits on the float32 grid (weights produced
by init or the trainer always do).
"""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from ..errors import GaitFeedbackError
from .network import ModelWeights, NonFiniteWeight

WEIGHTS_MAGIC = 0x41475246
WEIGHTS_VERSION = 1

_HEADER = struct.Struct("<IBHHBHH")


class BadHeader(GaitFeedbackError):
    """Weight file magic, version, or header structure is wrong."""


def save_weights(weights: ModelWeights) -> bytes:
    """Serialize weights; in-memory values are cast to float32."""
    w = weights
    out = bytearray(
        _HEADER.pack(
            WEIGHTS_MAGIC,
            WEIGHTS_VERSION,
            w.input_channels,
            w.conv_filters,
            w.kernel_size,
            w.lstm_hidden,
            w.dense1_units,
        )
    )
    blobs = (
        w.norm_mean,
        w.norm_scale,
        w.conv_kernels,
        w.conv_bias,
        w.lstm_w,
        w.lstm_u,
        w.lstm_b,
        w.dense1_w,
        w.dense1_b,
        w.dense2_w,
        w.dense2_b,
    )
    for blob in blobs:
        out += np.ascontiguousarray(blob, dtype="<f4").tobytes()
    return bytes(out)


def load_weights(source: bytes) -> ModelWeights:
    """Parse a complete weight file into shape-validated float64 weights."""
    if len(source) < _HEADER.size:
        raise BadHeader(f"file of {len(source)} bytes is shorter than the header")
    magic, version, c, f, k, h, d1 = _HEADER.unpack_from(source)
    if magic != WEIGHTS_MAGIC:
        raise BadHeader(f"expected magic 0x{WEIGHTS_MAGIC:08X}, got 0x{magic:08X}")
    if version != WEIGHTS_VERSION:
        raise BadHeader(f"unsupported weight file version {version}")
    if min(c, f, k, h, d1) < 1:
        raise BadHeader("header declares a zero-sized dimension")

    shapes = (
        ("norm_mean", (c,)),
        ("norm_scale", (c,)),
        ("conv_kernels", (f, c, k)),
        ("conv_bias", (f,)),
        ("lstm_w", (4 * h, f)),
        ("lstm_u", (4 * h, h)),
        ("lstm_b", (4 * h,)),
        ("dense1_w", (d1, h)),
        ("dense1_b", (d1,)),
        ("dense2_w", (1, d1)),
        ("dense2_b", (1,)),
    )
    from .network import ShapeMismatch  # local import avoids a cycle in docs builds

    arrays = {}
    offset = _HEADER.size
    for name, shape in shapes:
        count = int(np.prod(shape))
        nbytes = count * 4
        if offset + nbytes > len(source):
            raise ShapeMismatch(
                f"{name}: file ends after {len(source) - offset} of {nbytes} bytes"
            )
        flat = np.frombuffer(source, dtype="<f4", count=count, offset=offset)
        arrays[name] = flat.astype(np.float64).reshape(shape)
        offset += nbytes
    if offset != len(source):
        raise ShapeMismatch(f"{len(source) - offset} unexpected trailing bytes")

    for name, arr in arrays.items():
        if not np.all(np.isfinite(arr)):
            raise NonFiniteWeight(f"non-finite values in {name}")
    return ModelWeights(**arrays)


def save_weights_file(path, weights: ModelWeights) -> None:
    with open(path, "wb") as fp:
        fp.write(save_weights(weights))


def load_weights_file(path) -> ModelWeights:
    with open(path, "rb") as fp:
        return load_weights(fp.read())


def describe_weights(weights: ModelWeights) -> dict:
    """Human-oriented summary used by the CLI inspector."""
    params = weights.params()
    n_params = int(sum(a.size for a in params.values()))
    return {
        "input_channels": weights.input_channels,
        "conv_filters": weights.conv_filters,
        "kernel_size": weights.kernel_size,
        "lstm_hidden": weights.lstm_hidden,
        "dense1_units": weights.dense1_units,
        "dropout_rate": weights.dropout_rate,
        "total_parameters": n_params,
        "parameter_shapes": {k: list(v.shape) for k, v in params.items()},
    }
