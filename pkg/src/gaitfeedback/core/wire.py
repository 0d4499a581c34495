"""Kinematic ingest wire format.

Record layout (all little-endian):

    magic      u32   0x47414954 ("GAIT")
    version    u8    1
    timestamp  u64   microseconds
    seg_count  u8    7
    7 x segment:
        id         u8    SegmentId value
        quat       4xf32 (w, x, y, z)
        free_accel 3xf32 m/s^2
        ang_vel    3xf32 rad/s
        position   3xf32 m

One record per UDP datagram on the live path, or length-prefixed records
(u32 length + record) in a .gaitbin replay file. A documented CSV layout
is accepted for authored fixtures. Decoding is pure and reentrant; a
malformed record never yields partial output.
"""

from __future__ import annotations

import csv
import io
import struct
from typing import BinaryIO, Iterable, Iterator, List

import numpy as np

from ..errors import GaitFeedbackError
from .types import N_SEGMENTS, KinematicFrame, SegmentId

FRAME_MAGIC = 0x47414954
FRAME_VERSION = 1

_HEADER = struct.Struct("<IBQB")
_SEGMENT = struct.Struct("<B13f")

FRAME_RECORD_SIZE = _HEADER.size + N_SEGMENTS * _SEGMENT.size
_LENGTH_PREFIX = struct.Struct("<I")


class FrameDecodeError(GaitFeedbackError):
    """Base class for ingest record decoding failures."""


class BadMagic(FrameDecodeError):
    pass


class TruncatedFrame(FrameDecodeError):
    pass


class UnknownVersion(FrameDecodeError):
    pass


class DuplicateSegment(FrameDecodeError):
    pass


class BadSegmentId(FrameDecodeError):
    pass


class TrailingBytes(FrameDecodeError):
    pass


def decode_frame(data: bytes) -> KinematicFrame:
    """Decode one complete ingest record into a KinematicFrame."""
    if len(data) < _HEADER.size:
        if len(data) >= 4 and struct.unpack_from("<I", data)[0] != FRAME_MAGIC:
            raise BadMagic("bad magic in short record")
        raise TruncatedFrame(f"record of {len(data)} bytes is shorter than the header")
    magic, version, timestamp_us, seg_count = _HEADER.unpack_from(data)
    if magic != FRAME_MAGIC:
        raise BadMagic(f"expected 0x{FRAME_MAGIC:08X}, got 0x{magic:08X}")
    if version != FRAME_VERSION:
        raise UnknownVersion(f"unsupported record version {version}")
    if seg_count != N_SEGMENTS:
        raise TruncatedFrame(f"record declares {seg_count} segments, need {N_SEGMENTS}")
    if len(data) < FRAME_RECORD_SIZE:
        raise TruncatedFrame(
            f"record is {len(data)} bytes, a full frame needs {FRAME_RECORD_SIZE}"
        )
    if len(data) > FRAME_RECORD_SIZE:
        raise TrailingBytes(f"{len(data) - FRAME_RECORD_SIZE} unexpected trailing bytes")

    quat = np.empty((N_SEGMENTS, 4), dtype=np.float32)
    accel = np.empty((N_SEGMENTS, 3), dtype=np.float32)
    gyro = np.empty((N_SEGMENTS, 3), dtype=np.float32)
    pos = np.empty((N_SEGMENTS, 3), dtype=np.float32)
    seen = set()
    offset = _HEADER.size
    for _ in range(N_SEGMENTS):
        fields = _SEGMENT.unpack_from(data, offset)
        offset += _SEGMENT.size
        seg_id = fields[0]
        if seg_id >= N_SEGMENTS:
            raise BadSegmentId(f"segment id {seg_id} out of range")
        if seg_id in seen:
            raise DuplicateSegment(f"segment id {seg_id} appears twice")
        seen.add(seg_id)
        quat[seg_id] = fields[1:5]
        accel[seg_id] = fields[5:8]
        gyro[seg_id] = fields[8:11]
        pos[seg_id] = fields[11:14]

    return KinematicFrame(
        timestamp_us=timestamp_us,
        quat=quat,
        free_accel=accel,
        ang_vel=gyro,
        position=pos,
    )


def encode_frame(frame: KinematicFrame) -> bytes:
    """Encode a valid frame; decode_frame(encode_frame(f)) == f bit-exactly."""
    frame.validate()
    out = bytearray(FRAME_RECORD_SIZE)
    _HEADER.pack_into(out, 0, FRAME_MAGIC, FRAME_VERSION, frame.timestamp_us, N_SEGMENTS)
    offset = _HEADER.size
    for seg in SegmentId:
        _SEGMENT.pack_into(
            out,
            offset,
            seg.value,
            *(float(v) for v in frame.quat[seg]),
            *(float(v) for v in frame.free_accel[seg]),
            *(float(v) for v in frame.ang_vel[seg]),
            *(float(v) for v in frame.position[seg]),
        )
        offset += _SEGMENT.size
    return bytes(out)


def write_gaitbin(fp: BinaryIO, frames: Iterable[KinematicFrame]) -> int:
    """Write frames as length-prefixed records; returns the record count."""
    n = 0
    for frame in frames:
        record = encode_frame(frame)
        fp.write(_LENGTH_PREFIX.pack(len(record)))
        fp.write(record)
        n += 1
    return n


def read_gaitbin(fp: BinaryIO) -> Iterator[KinematicFrame]:
    """Yield frames from a length-prefixed replay file."""
    while True:
        prefix = fp.read(_LENGTH_PREFIX.size)
        if not prefix:
            return
        if len(prefix) < _LENGTH_PREFIX.size:
            raise TruncatedFrame("replay file ends inside a length prefix")
        (length,) = _LENGTH_PREFIX.unpack(prefix)
        record = fp.read(length)
        if len(record) < length:
            raise TruncatedFrame("replay file ends inside a record")
        yield decode_frame(record)


def save_gaitbin(path, frames: Iterable[KinematicFrame]) -> int:
    with open(path, "wb") as fp:
        return write_gaitbin(fp, frames)


def load_gaitbin(path) -> List[KinematicFrame]:
    with open(path, "rb") as fp:
        return list(read_gaitbin(fp))


# CSV layout: one row per frame, header below. Values are parsed as f32 so
# a CSV written with enough digits round-trips against the binary form.
_CSV_FIELDS_PER_SEGMENT = (
    ("q", ("w", "x", "y", "z")),
    ("acc", ("x", "y", "z")),
    ("gyr", ("x", "y", "z")),
    ("pos", ("x", "y", "z")),
)


def csv_header() -> List[str]:
    cols = ["timestamp_us"]
    for seg in SegmentId:
        name = seg.name.lower()
        for prefix, axes in _CSV_FIELDS_PER_SEGMENT:
            cols.extend(f"{name}_{prefix}{axis}" for axis in axes)
    return cols


def write_csv(fp: io.TextIOBase, frames: Iterable[KinematicFrame]) -> int:
    writer = csv.writer(fp)
    writer.writerow(csv_header())
    n = 0
    for frame in frames:
        row = [frame.timestamp_us]
        for seg in SegmentId:
            row.extend(repr(float(v)) for v in frame.quat[seg])
            row.extend(repr(float(v)) for v in frame.free_accel[seg])
            row.extend(repr(float(v)) for v in frame.ang_vel[seg])
            row.extend(repr(float(v)) for v in frame.position[seg])
        writer.writerow(row)
        n += 1
    return n


def read_csv(fp: io.TextIOBase) -> Iterator[KinematicFrame]:
    reader = csv.reader(fp)
    header = next(reader, None)
    if header != csv_header():
        raise FrameDecodeError("CSV header does not match the documented layout")
    per_seg = 13
    for row in reader:
        if len(row) != 1 + N_SEGMENTS * per_seg:
            raise TruncatedFrame(f"CSV row has {len(row)} columns")
        values = np.asarray(row[1:], dtype=np.float32).reshape(N_SEGMENTS, per_seg)
        yield KinematicFrame(
            timestamp_us=int(row[0]),
            quat=values[:, 0:4],
            free_accel=values[:, 4:7],
            ang_vel=values[:, 7:10],
            position=values[:, 10:13],
        )
