"""Domain types shared by the whole pipeline.

Conventions fixed here and relied on everywhere else:

- World frame: X anterior (direction of progression), Z vertical up.
- One kinematic frame = one 50 Hz sample carrying all 7 lower-body
  segments exactly once.
- Per-segment arrays are float32 (the wire precision), row-indexed by
  :class:`SegmentId`, and marked read-only so frames are safe to share
  across threads.
- AGRF values are expressed in body weights (anterior positive, braking
  negative).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum

import numpy as np

from ..errors import GaitFeedbackError

GRAVITY_MS2 = 9.80665

# Nominal 50 Hz cadence and the gap tolerance around it.
NOMINAL_FRAME_INTERVAL_US = 20_000
FRAME_GAP_TOLERANCE_US = 25_000

QUAT_NORM_TOLERANCE = 1e-3

# Sanity bound for walking: |AGRF| of an intact stride stays well under
# one body weight.
AGRF_SANITY_BOUND_BW = 1.0


class SegmentId(IntEnum):
    """Lower-body segment indices, fixed by the ingest wire format."""

    PELVIS = 0
    THIGH_PARETIC = 1
    THIGH_NONPARETIC = 2
    SHANK_PARETIC = 3
    SHANK_NONPARETIC = 4
    FOOT_PARETIC = 5
    FOOT_NONPARETIC = 6


N_SEGMENTS = len(SegmentId)


class BodySide(Enum):
    LEFT = "left"
    RIGHT = "right"


class Limb(Enum):
    """Which leg an event or measurement refers to."""

    PARETIC = "paretic"
    NONPARETIC = "nonparetic"


def foot_segment(limb: Limb) -> SegmentId:
    return SegmentId.FOOT_PARETIC if limb is Limb.PARETIC else SegmentId.FOOT_NONPARETIC


class QuaternionNorm(GaitFeedbackError):
    """A segment orientation is not a unit quaternion (within tolerance)."""


class FrameShapeError(GaitFeedbackError):
    """A frame array has the wrong shape or dtype."""


class NonPositiveMass(GaitFeedbackError):
    """Body mass must be strictly positive."""


def _readonly_f32(values, shape) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float32)
    if arr.shape != shape:
        raise FrameShapeError(f"expected shape {shape}, got {arr.shape}")
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class KinematicFrame:
    """One 50 Hz sample of segment kinematics.

    Fields:
        timestamp_us: monotonic integer microseconds.
        quat: (7, 4) unit quaternions (w, x, y, z) per segment.
        free_accel: (7, 3) gravity-free acceleration, m/s^2, world frame.
        ang_vel: (7, 3) angular velocity, rad/s.
        position: (7, 3) segment position, meters, world frame.
    """

    timestamp_us: int
    quat: np.ndarray
    free_accel: np.ndarray
    ang_vel: np.ndarray
    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "timestamp_us", int(self.timestamp_us))
        object.__setattr__(self, "quat", _readonly_f32(self.quat, (N_SEGMENTS, 4)))
        object.__setattr__(self, "free_accel", _readonly_f32(self.free_accel, (N_SEGMENTS, 3)))
        object.__setattr__(self, "ang_vel", _readonly_f32(self.ang_vel, (N_SEGMENTS, 3)))
        object.__setattr__(self, "position", _readonly_f32(self.position, (N_SEGMENTS, 3)))

    def validate(self) -> None:
        """Raise if any value invariant is violated (shapes are enforced at build)."""
        for name in ("quat", "free_accel", "ang_vel", "position"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)):
                raise FrameShapeError(f"non-finite values in {name}")
        norms = np.linalg.norm(self.quat.astype(np.float64), axis=1)
        if np.any(np.abs(norms - 1.0) > QUAT_NORM_TOLERANCE):
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise QuaternionNorm(
                f"segment {SegmentId(worst).name} quaternion norm {norms[worst]:.6f}"
            )
        if self.timestamp_us < 0:
            raise FrameShapeError("timestamp_us must be non-negative")

    def __eq__(self, other) -> bool:
        if not isinstance(other, KinematicFrame):
            return NotImplemented
        return (
            self.timestamp_us == other.timestamp_us
            and np.array_equal(self.quat, other.quat)
            and np.array_equal(self.free_accel, other.free_accel)
            and np.array_equal(self.ang_vel, other.ang_vel)
            and np.array_equal(self.position, other.position)
        )

    def __hash__(self):
        return hash((self.timestamp_us, self.quat.tobytes()))


def zero_motion_frame(timestamp_us: int, positions=None) -> KinematicFrame:
    """Identity orientations, zero accel/gyro; handy for tests and idle streams."""
    quat = np.zeros((N_SEGMENTS, 4), dtype=np.float32)
    quat[:, 0] = 1.0
    pos = np.zeros((N_SEGMENTS, 3), dtype=np.float32) if positions is None else positions
    return KinematicFrame(
        timestamp_us=timestamp_us,
        quat=quat,
        free_accel=np.zeros((N_SEGMENTS, 3), dtype=np.float32),
        ang_vel=np.zeros((N_SEGMENTS, 3), dtype=np.float32),
        position=pos,
    )


@dataclass(frozen=True)
class BodyParams:
    """Participant mass, affected side, and the gravity constant used throughout."""

    mass_kg: float
    paretic_side: BodySide = BodySide.LEFT
    g: float = GRAVITY_MS2

    def __post_init__(self):
        if not (self.mass_kg > 0):
            raise NonPositiveMass(f"mass_kg must be > 0, got {self.mass_kg}")


def newtons_to_bw(force_n: float, body: BodyParams) -> float:
    """Normalize a force in newtons to body weights: F / (m * g)."""
    if not (body.mass_kg > 0):
        raise NonPositiveMass(f"mass_kg must be > 0, got {body.mass_kg}")
    return force_n / (body.mass_kg * body.g)


@dataclass(frozen=True)
class AgrfEstimate:
    """Per-frame AGRF estimate in body weights.

    warmed_up is False while the sliding window is still filling; consumers
    must ignore non-warmed estimates. latency_us is wall-clock inference
    time, telemetry only — it never enters persisted logs.
    """

    timestamp_us: int
    agrf_bw: float
    warmed_up: bool
    latency_us: int = 0

    def __post_init__(self):
        if abs(self.agrf_bw) >= AGRF_SANITY_BOUND_BW:
            raise FrameShapeError(
                f"|agrf_bw| = {abs(self.agrf_bw):.3f} exceeds the walking sanity bound"
            )
