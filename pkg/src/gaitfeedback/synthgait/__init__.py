"""Deterministic synthetic hemiparetic-gait generator with known ground truth."""

from .dataset import (
    DEFAULT_PEAK_LEVELS,
    make_training_set,
    session_windows,
    still_frames,
)
from .generator import (
    ACCEL_NOISE_SCALE,
    CYCLE_LEAD,
    FOOT_HEIGHT_M,
    FOOT_LIFT_M,
    GYRO_NOISE_SCALE,
    PELVIS_HEIGHT_M,
    PROP_PEAK_PHASE,
    GroundTruth,
    StanceTruth,
    StrideSynthesizer,
    generate,
)
from .loop import closed_loop
from .profile import (
    BRAKE_END,
    PROP_START,
    STANCE_FRACTION,
    BadProfile,
    GaitProfile,
)
from .response import (
    CONSOLIDATION_RATE,
    MAX_CONSOLIDATION,
    NONRESPONDER_DRIFT,
    NONRESPONDER_FLOOR,
    PEAK_CLAMP_BW,
    RELAXATION_RETAINED,
    RESPONDER_HEADROOM,
    ResponseMode,
    ResponseModel,
    step_response,
)
from .truthfile import BadTruthFile, read_truth, truth_from_file, write_truth
from .waveforms import agrf_curve, ap_excursion, foot_lift

__all__ = [
    "ACCEL_NOISE_SCALE",
    "BRAKE_END",
    "BadProfile",
    "BadTruthFile",
    "CONSOLIDATION_RATE",
    "CYCLE_LEAD",
    "DEFAULT_PEAK_LEVELS",
    "FOOT_HEIGHT_M",
    "FOOT_LIFT_M",
    "GYRO_NOISE_SCALE",
    "GaitProfile",
    "GroundTruth",
    "MAX_CONSOLIDATION",
    "NONRESPONDER_DRIFT",
    "NONRESPONDER_FLOOR",
    "PEAK_CLAMP_BW",
    "PELVIS_HEIGHT_M",
    "PROP_PEAK_PHASE",
    "PROP_START",
    "RELAXATION_RETAINED",
    "RESPONDER_HEADROOM",
    "ResponseMode",
    "ResponseModel",
    "STANCE_FRACTION",
    "StanceTruth",
    "StrideSynthesizer",
    "agrf_curve",
    "ap_excursion",
    "closed_loop",
    "foot_lift",
    "generate",
    "make_training_set",
    "read_truth",
    "session_windows",
    "step_response",
    "still_frames",
    "truth_from_file",
    "write_truth",
]
