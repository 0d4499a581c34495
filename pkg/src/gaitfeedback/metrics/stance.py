"""Per-stance biomechanical metrics from kinematic frames and estimates.

Peak AGRF is the primary outcome; trailing limb angle (TLA) is read at the
frame of that peak, and step length at foot contact. Geometry conventions:
world X is the direction of travel (anterior +), Z is vertical (up +).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from ..core import AgrfEstimate, KinematicFrame, Limb, SegmentId, foot_segment
from ..errors import GaitFeedbackError

MIN_VERTICAL_SEPARATION_M = 0.1
LOW_CONFIDENCE_STANCES = 5


class EmptyStance(GaitFeedbackError):
    """No warmed-up estimates fell inside the stance."""


class DegenerateGeometry(GaitFeedbackError):
    """Pelvis and foot are too close vertically for a meaningful angle."""


class MissingSegment(GaitFeedbackError):
    """A required segment is absent from the frame."""


@dataclass(frozen=True)
class StanceMetrics:
    """The three per-stance outcome measures."""

    peak_agrf_bw: float
    tla_deg: float
    step_length_m: float
    peak_frame: int = -1
    non_propulsive: bool = False

    def __post_init__(self):
        if not (-90.0 < self.tla_deg < 90.0):
            raise ValueError(f"TLA must lie in (-90, 90) deg, got {self.tla_deg}")
        if self.step_length_m < 0:
            raise ValueError(f"step length must be >= 0, got {self.step_length_m}")


def peak_agrf(series: Sequence[AgrfEstimate]) -> Tuple[float, int]:
    """Maximum warmed-up estimate within a stance and its series index.

    A stance whose largest value is still <= 0 is braking-only; the caller
    can detect that from the returned value (max semantics are preserved).
    """
    best_value: Optional[float] = None
    best_index = -1
    for i, est in enumerate(series):
        if not est.warmed_up:
            continue
        if best_value is None or est.agrf_bw > best_value:
            best_value = est.agrf_bw
            best_index = i
    if best_value is None:
        raise EmptyStance("no warmed-up estimates in the stance")
    return best_value, best_index


def tla_at(frame: KinematicFrame, side: Limb) -> float:
    """Trailing limb angle in degrees at one frame.

    Angle between vertical and the pelvis->foot vector in the sagittal
    (X-Z) plane: atan2(pelvis_x - foot_x, pelvis_z - foot_z). Positive when
    the foot is posterior to the pelvis.
    """
    pelvis = frame.position[SegmentId.PELVIS]
    foot = frame.position[foot_segment(side)]
    dx = float(pelvis[0]) - float(foot[0])
    dz = float(pelvis[2]) - float(foot[2])
    if dz < MIN_VERTICAL_SEPARATION_M:
        raise DegenerateGeometry(
            f"pelvis only {dz:.3f} m above the foot; need {MIN_VERTICAL_SEPARATION_M}"
        )
    return math.degrees(math.atan2(dx, dz))


def step_length(frame: KinematicFrame, leading: Limb = Limb.PARETIC) -> float:
    """AP distance from trailing foot to leading foot at a contact frame.

    Negative values (leading foot behind the trailing one) indicate the
    contact frame was mislabeled; they are returned as-is so callers can
    flag them.
    """
    lead = frame.position[foot_segment(leading)]
    trail_limb = Limb.NONPARETIC if leading is Limb.PARETIC else Limb.PARETIC
    trail = frame.position[foot_segment(trail_limb)]
    if not (math.isfinite(float(lead[0])) and math.isfinite(float(trail[0]))):
        raise MissingSegment("foot positions must be finite")
    return float(lead[0]) - float(trail[0])


def stance_metrics(
    estimates: Sequence[AgrfEstimate],
    frames: Sequence[KinematicFrame],
    contact_index: int,
    swing_index: int,
    side: Limb = Limb.PARETIC,
) -> StanceMetrics:
    """All three per-stance measures for frames[contact_index:swing_index].

    estimates[i] must correspond to frames[i] (both indexed by session
    frame). The AGRF peak search runs over the stance interval; TLA is
    evaluated at the frame of that peak and step length at contact.
    """
    if not (0 <= contact_index < swing_index <= len(frames)):
        raise ValueError(
            f"stance [{contact_index}, {swing_index}) outside session of {len(frames)}"
        )
    window = estimates[contact_index:swing_index]
    value, rel_index = peak_agrf(window)
    peak_frame = contact_index + rel_index
    return StanceMetrics(
        peak_agrf_bw=value,
        tla_deg=tla_at(frames[peak_frame], side),
        step_length_m=max(0.0, step_length(frames[contact_index], side)),
        peak_frame=peak_frame,
        non_propulsive=value <= 0.0,
    )
