import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaitfeedback.core import (
    FRAME_RECORD_SIZE,
    BadMagic,
    BadSegmentId,
    DuplicateSegment,
    NonMonotonicTime,
    QuaternionNorm,
    TrailingBytes,
    TruncatedFrame,
    UnknownVersion,
    decode_frame,
    encode_frame,
    guard_stream,
    load_gaitbin,
    read_csv,
    save_gaitbin,
    write_csv,
    zero_motion_frame,
)

from conftest import frame_stream, random_frame


def test_round_trip_preserves_timestamp_and_payload(rng):
    frame = random_frame(rng, 123_456_789)
    decoded = decode_frame(encode_frame(frame))
    assert decoded.timestamp_us == 123_456_789
    assert decoded == frame


def test_zero_motion_frame_round_trips():
    frame = zero_motion_frame(42)
    assert decode_frame(encode_frame(frame)) == frame


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), ts=st.integers(0, 2**63 - 1))
def test_encode_decode_bijection_on_random_frames(seed, ts):
    frame = random_frame(np.random.default_rng(seed), ts)
    assert decode_frame(encode_frame(frame)) == frame


def test_corrupted_magic_rejected(rng):
    data = bytearray(encode_frame(random_frame(rng, 0)))
    data[0] ^= 0xFF
    with pytest.raises(BadMagic):
        decode_frame(bytes(data))


def test_truncation_mid_segment_rejected(rng):
    data = encode_frame(random_frame(rng, 0))
    # cut inside segment 4 (truncated after 3 complete segments)
    cut = 14 + 3 * 53 + 10
    with pytest.raises(TruncatedFrame):
        decode_frame(data[:cut])


def test_unknown_version_rejected(rng):
    data = bytearray(encode_frame(random_frame(rng, 0)))
    data[4] = 9
    with pytest.raises(UnknownVersion):
        decode_frame(bytes(data))


def test_duplicate_segment_rejected(rng):
    data = bytearray(encode_frame(random_frame(rng, 0)))
    # second segment block claims the same id as the first
    data[14 + 53] = data[14]
    with pytest.raises(DuplicateSegment):
        decode_frame(bytes(data))


def test_out_of_range_segment_id_rejected(rng):
    data = bytearray(encode_frame(random_frame(rng, 0)))
    data[14] = 99
    with pytest.raises(BadSegmentId):
        decode_frame(bytes(data))


def test_trailing_bytes_rejected(rng):
    data = encode_frame(random_frame(rng, 0)) + b"\x00"
    with pytest.raises(TrailingBytes):
        decode_frame(data)


def test_record_size_is_fixed(rng):
    assert len(encode_frame(random_frame(rng, 0))) == FRAME_RECORD_SIZE == 385


def test_encode_rejects_bad_quaternion(rng):
    frame = random_frame(rng, 0)
    quat = frame.quat.copy()
    quat *= 0.9
    object.__setattr__(frame, "quat", quat)
    with pytest.raises(QuaternionNorm):
        encode_frame(frame)


def test_gaitbin_round_trip(tmp_path, rng):
    frames = frame_stream(rng, 20)
    path = tmp_path / "session.gaitbin"
    assert save_gaitbin(path, frames) == 20
    assert load_gaitbin(path) == frames


def test_csv_round_trip(rng):
    frames = frame_stream(rng, 5)
    buf = io.StringIO()
    write_csv(buf, frames)
    buf.seek(0)
    assert list(read_csv(buf)) == frames


def test_stream_guard_flags_gaps_and_rejects_reordering(rng):
    frames = frame_stream(rng, 3)
    late = random_frame(rng, frames[-1].timestamp_us + 30_000)  # 30 ms gap
    ticks = list(guard_stream(frames + [late]))
    assert [t.gap_exceeded for t in ticks] == [False, False, False, True]
    assert ticks[0].dt_us is None and ticks[1].dt_us == 20_000

    stale = random_frame(rng, frames[-1].timestamp_us)
    with pytest.raises(NonMonotonicTime):
        list(guard_stream(frames + [stale]))
