import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaitfeedback.core import (
    AgrfEstimate,
    BodyParams,
    BodySide,
    FrameShapeError,
    NonPositiveMass,
    QuaternionNorm,
    SegmentId,
    newtons_to_bw,
    zero_motion_frame,
)

from conftest import random_frame


def test_segment_enumeration_is_fixed():
    assert len(SegmentId) == 7
    assert SegmentId.PELVIS == 0
    assert SegmentId.FOOT_NONPARETIC == 6


def test_zero_force_is_zero_bw():
    body = BodyParams(mass_kg=70.0)
    assert newtons_to_bw(0.0, body) == 0.0


def test_newtons_to_bw_against_hand_arithmetic():
    body = BodyParams(mass_kg=81.5)
    # 800 / (81.5 * 9.80665), computed independently
    assert newtons_to_bw(800.0, body) == pytest.approx(1.0009484299169848, abs=1e-12)
    # magnitude matches the typical baseline peak AGRF scale (~0.088 BW)
    assert newtons_to_bw(70.4, body) == pytest.approx(0.0880834618, abs=1e-9)


def test_non_positive_mass_rejected():
    with pytest.raises(NonPositiveMass):
        BodyParams(mass_kg=0.0)
    with pytest.raises(NonPositiveMass):
        BodyParams(mass_kg=-5.0)


@given(
    force=st.floats(-2000, 2000, allow_nan=False),
    mass=st.floats(30, 150),
    scale=st.floats(0.1, 10),
)
def test_newtons_to_bw_scaling_laws(force, mass, scale):
    body = BodyParams(mass_kg=mass)
    scaled_body = BodyParams(mass_kg=mass * scale)
    base = newtons_to_bw(force, body)
    assert newtons_to_bw(force * scale, body) == pytest.approx(base * scale, rel=1e-12)
    assert newtons_to_bw(force, scaled_body) == pytest.approx(base / scale, rel=1e-12)


def test_quaternion_norm_outside_tolerance_rejected(rng):
    frame = random_frame(rng, 0)
    quat = frame.quat.copy()
    quat[2] *= 0.9
    bad = random_frame(rng, 0)
    object.__setattr__(bad, "quat", quat)
    with pytest.raises(QuaternionNorm):
        bad.validate()


def test_zero_motion_frame_validates():
    zero_motion_frame(0).validate()


def test_paretic_side_default_and_override():
    assert BodyParams(mass_kg=70).paretic_side is BodySide.LEFT
    assert BodyParams(mass_kg=70, paretic_side=BodySide.RIGHT).paretic_side is BodySide.RIGHT


def test_agrf_estimate_sanity_bound():
    AgrfEstimate(0, 0.95, warmed_up=True)
    with pytest.raises(FrameShapeError):
        AgrfEstimate(0, 1.2, warmed_up=True)
