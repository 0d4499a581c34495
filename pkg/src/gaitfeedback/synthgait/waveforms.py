"""Closed-form gait-cycle waveforms.

Everything here is a pure function of cycle phase in [0, 1), where phase 0
is foot contact and STANCE_FRACTION marks swing initiation. The shapes are
deliberately simple: a C1 piecewise cosine for the foot's anterior
excursion (crest exactly at contact, trough exactly at swing init, so the
event detector's extrema coincide with the ground-truth events), and two
raised-sine lobes for the AGRF — braking through the first half of stance,
propulsion peaking in terminal stance.
"""

from __future__ import annotations

import numpy as np

from .profile import BRAKE_END, PROP_START, STANCE_FRACTION


def ap_excursion(phase, amplitude_m: float) -> np.ndarray:
    """Foot anterior-posterior position relative to the pelvis, meters.

    +amplitude at contact (foot ahead), -amplitude at swing init (foot
    behind), cosine in between. The two branches share value and slope
    (zero) at both junctions, so the curve is C1-smooth across the cycle.
    """
    phase = np.asarray(phase, dtype=np.float64)
    swing_span = 1.0 - STANCE_FRACTION
    stance = np.cos(np.pi * phase / STANCE_FRACTION)
    swing = np.cos(np.pi * (phase - 1.0) / swing_span)
    return amplitude_m * np.where(phase < STANCE_FRACTION, stance, swing)


def foot_lift(phase, lift_m: float) -> np.ndarray:
    """Vertical foot clearance: zero through stance, a sin^2 arch in swing."""
    phase = np.asarray(phase, dtype=np.float64)
    swing_span = 1.0 - STANCE_FRACTION
    arch = np.sin(np.pi * (phase - STANCE_FRACTION) / swing_span) ** 2
    return lift_m * np.where(phase >= STANCE_FRACTION, arch, 0.0)


def agrf_curve(phase, braking_peak_bw: float, propulsion_peak_bw: float) -> np.ndarray:
    """Anterior GRF in body weights as a function of cycle phase.

    Stance progress s = phase / STANCE_FRACTION runs 0..1 over stance.
    Braking: sin^2 lobe on s in [0, BRAKE_END], trough (most negative) at
    s = 0.25. Propulsion: sin^2 lobe on s in [PROP_START, 1], peaking at
    s = 0.85 — terminal stance. Identically zero through swing and in the
    mid-stance gap between the lobes.
    """
    phase = np.asarray(phase, dtype=np.float64)
    s = phase / STANCE_FRACTION
    out = np.zeros_like(s)

    braking = (phase < STANCE_FRACTION) & (s < BRAKE_END)
    out[braking] = braking_peak_bw * np.sin(np.pi * s[braking] / BRAKE_END) ** 2

    prop = (phase < STANCE_FRACTION) & (s >= PROP_START)
    prop_span = 1.0 - PROP_START
    out[prop] = propulsion_peak_bw * np.sin(np.pi * (s[prop] - PROP_START) / prop_span) ** 2
    return out
