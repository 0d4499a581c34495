from .types import (
    AGRF_SANITY_BOUND_BW,
    GRAVITY_MS2,
    N_SEGMENTS,
    AgrfEstimate,
    BodyParams,
    BodySide,
    FrameShapeError,
    KinematicFrame,
    Limb,
    NonPositiveMass,
    QuaternionNorm,
    SegmentId,
    foot_segment,
    newtons_to_bw,
    zero_motion_frame,
)
from .stream import FrameTick, NonMonotonicTime, StreamGuard, guard_stream
from .wire import (
    FRAME_RECORD_SIZE,
    BadMagic,
    BadSegmentId,
    DuplicateSegment,
    FrameDecodeError,
    TrailingBytes,
    TruncatedFrame,
    UnknownVersion,
    decode_frame,
    encode_frame,
    load_gaitbin,
    read_csv,
    read_gaitbin,
    save_gaitbin,
    write_csv,
    write_gaitbin,
)

__all__ = [
    "AGRF_SANITY_BOUND_BW",
    "GRAVITY_MS2",
    "N_SEGMENTS",
    "AgrfEstimate",
    "BodyParams",
    "BodySide",
    "FrameShapeError",
    "KinematicFrame",
    "Limb",
    "NonPositiveMass",
    "QuaternionNorm",
    "SegmentId",
    "foot_segment",
    "newtons_to_bw",
    "zero_motion_frame",
    "FrameTick",
    "NonMonotonicTime",
    "StreamGuard",
    "guard_stream",
    "FRAME_RECORD_SIZE",
    "BadMagic",
    "BadSegmentId",
    "DuplicateSegment",
    "FrameDecodeError",
    "TrailingBytes",
    "TruncatedFrame",
    "UnknownVersion",
    "decode_frame",
    "encode_frame",
    "load_gaitbin",
    "read_csv",
    "read_gaitbin",
    "save_gaitbin",
    "write_csv",
    "write_gaitbin",
]
