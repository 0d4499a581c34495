"""Stride-by-stride synthesis of hemiparetic walking with known ground truth.

The synthetic walker is built so that every quantity downstream modules
estimate has an exact closed-form answer:

- Foot-vs-pelvis AP excursion is a piecewise cosine whose crest/trough
  land exactly on ground-truth contact/swing-init times (detector oracle).
- The paretic AGRF is two raised-sine lobes per stance; the realized
  propulsion peak of every stride is recorded (estimator oracle).
- The summed AGRF of both legs drives a fore-aft center-of-mass surge
  that is added to *all* segment X positions, and the published free
  acceleration is the exact second central difference of the published
  positions — so the inertial channels both carry the AGRF signal the
  estimator must recover and integrate back to the positions.

Determinism: one seeded Generator drives stride-peak jitter and channel
noise in a fixed draw order, so identical profiles give identical frames.
With noise_sd = 0 no random draws happen at all and the output is exactly
periodic.

The session starts at late swing of the paretic leg (cycle coordinate
CYCLE_LEAD) so the first contact falls a fifth of a stride *into* the
recording — an extremum at sample zero would be undetectable by any
causal or offline detector, which would poison oracle-agreement checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.types import (
    GRAVITY_MS2,
    N_SEGMENTS,
    NOMINAL_FRAME_INTERVAL_US,
    KinematicFrame,
    Limb,
    SegmentId,
)
from ..gaitevents.types import EventKind, GaitEvent
from .profile import STANCE_FRACTION, PEAK_BOUNDS_BW, BadProfile, GaitProfile
from .waveforms import agrf_curve, ap_excursion, foot_lift

# Body geometry of the stick walker (meters).
PELVIS_HEIGHT_M = 0.95
FOOT_HEIGHT_M = 0.05
FOOT_LIFT_M = 0.05
HIP_HALF_WIDTH_M = 0.08
THIGH_FRACTION = 1.0 / 3.0
SHANK_FRACTION = 2.0 / 3.0

# Cycle coordinate at t = 0 (late swing); first paretic contact happens
# (1 - CYCLE_LEAD) of a stride into the session.
CYCLE_LEAD = 0.8

# Phase (fraction of the full cycle) at which the propulsion lobe peaks:
# 85% of stance.
PROP_PEAK_PHASE = 0.85 * STANCE_FRACTION

# Channel noise scales relative to profile.noise_sd (which is the
# position noise floor in meters).
ACCEL_NOISE_SCALE = 40.0
GYRO_NOISE_SCALE = 4.0

# Per-stride propulsion-peak jitter: relative sd = PEAK_JITTER_PER_NOISE
# * noise_sd (5% at the default noise floor), truncated so realized peaks
# stay positive and inside the profile bounds.
PEAK_JITTER_PER_NOISE = 100.0
PEAK_JITTER_CLIP_SD = 2.5

_DT_S = NOMINAL_FRAME_INTERVAL_US * 1e-6

# X-fraction of the foot excursion each segment inherits, and its fixed
# lateral offset, indexed by SegmentId. None = pelvis (no excursion).
_SEGMENT_BLEND = {
    SegmentId.PELVIS: (None, 0.0, 0.0),
    SegmentId.THIGH_PARETIC: (Limb.PARETIC, THIGH_FRACTION, +HIP_HALF_WIDTH_M * THIGH_FRACTION),
    SegmentId.THIGH_NONPARETIC: (
        Limb.NONPARETIC,
        THIGH_FRACTION,
        -HIP_HALF_WIDTH_M * THIGH_FRACTION,
    ),
    SegmentId.SHANK_PARETIC: (Limb.PARETIC, SHANK_FRACTION, +HIP_HALF_WIDTH_M * SHANK_FRACTION),
    SegmentId.SHANK_NONPARETIC: (
        Limb.NONPARETIC,
        SHANK_FRACTION,
        -HIP_HALF_WIDTH_M * SHANK_FRACTION,
    ),
    SegmentId.FOOT_PARETIC: (Limb.PARETIC, 1.0, +HIP_HALF_WIDTH_M),
    SegmentId.FOOT_NONPARETIC: (Limb.NONPARETIC, 1.0, -HIP_HALF_WIDTH_M),
}


@dataclass(frozen=True)
class StanceTruth:
    """Ground truth for one paretic stance."""

    stride: int
    peak_bw: float  # realized propulsion peak (scheduled x jitter)
    scheduled_bw: float  # pre-jitter scheduled value
    contact_frame: int
    swing_frame: int
    peak_frame: int  # sample nearest the analytic propulsion peak


@dataclass
class GroundTruth:
    """Everything the generator knows that the pipeline must estimate."""

    agrf_bw: np.ndarray  # (n_frames,) paretic AGRF at each sample, body weights
    events: List[GaitEvent]  # paretic contact/swing-init, frame-aligned
    stances: List[StanceTruth]
    dt_us: int = NOMINAL_FRAME_INTERVAL_US

    def peak_values(self) -> np.ndarray:
        return np.array([s.peak_bw for s in self.stances], dtype=np.float64)


class StrideSynthesizer:
    """Incremental generator: one stride chunk in, finished frames out.

    Stride k covers cycle coordinate [k, k+1); its paretic contact sits at
    the chunk start, its full stance (braking + propulsion) inside the
    chunk, so one scheduled peak cleanly owns one chunk. Chunk 0 is the
    partial leading swing and has no propulsion, so its scheduled value is
    irrelevant.

    Frames lag the generated positions by one sample because the published
    acceleration is a central second difference; call emit_ready() after
    each add_stride() and once more after the final stride.
    """

    def __init__(self, profile: GaitProfile):
        self.profile = profile
        self._rng = np.random.default_rng(profile.seed)
        self._period = profile.stride_period_s
        self._next_stride = 0
        self._rows = 0  # clean position samples generated so far
        self._emitted = 0  # frames handed out so far
        self._base = 0  # global index of buffer row 0
        self._v_carry = 0.0
        self._w_carry = 0.0
        self._pos: np.ndarray = np.empty((0, N_SEGMENTS, 3))
        self._pos_noise: Optional[np.ndarray] = None
        self._accel_noise: Optional[np.ndarray] = None
        self._gyro_noise: Optional[np.ndarray] = None
        self._agrf_chunks: List[np.ndarray] = []
        self.events: List[GaitEvent] = []
        self.stances: List[StanceTruth] = []
        quat = np.zeros((N_SEGMENTS, 4), dtype=np.float32)
        quat[:, 0] = 1.0
        self._quat = quat
        self._zero_gyro = np.zeros((N_SEGMENTS, 3), dtype=np.float32)

    # -- stride bookkeeping -------------------------------------------------

    @property
    def rows_generated(self) -> int:
        return self._rows

    @property
    def strides_added(self) -> int:
        return self._next_stride

    @property
    def frames_emitted(self) -> int:
        return self._emitted

    def _chunk_range(self, k: int) -> Tuple[int, int]:
        """Sample indices [start, end) whose cycle coordinate floors to k."""
        per = self._period / _DT_S
        start = max(0, math.ceil((k - CYCLE_LEAD) * per - 1e-9))
        end = max(0, math.ceil((k + 1 - CYCLE_LEAD) * per - 1e-9))
        return start, end

    def _realize_peak(self, scheduled: float) -> float:
        lo, hi = PEAK_BOUNDS_BW
        if self.profile.noise_sd == 0.0:
            return float(np.clip(scheduled, lo + 1e-3, hi - 1e-3))
        rel_sd = PEAK_JITTER_PER_NOISE * self.profile.noise_sd
        jitter = float(self._rng.normal(0.0, 1.0))
        jitter = max(-PEAK_JITTER_CLIP_SD, min(PEAK_JITTER_CLIP_SD, jitter))
        realized = scheduled * (1.0 + rel_sd * jitter)
        return float(np.clip(realized, lo + 1e-3, hi - 1e-3))

    # -- synthesis ----------------------------------------------------------

    def add_stride(self, scheduled_peak: Optional[float] = None) -> float:
        """Generate stride chunk k; returns the realized propulsion peak."""
        prof = self.profile
        k = self._next_stride
        self._next_stride += 1
        scheduled = prof.agrf_peak_bw if scheduled_peak is None else float(scheduled_peak)
        peak = self._realize_peak(scheduled)

        i0, i1 = self._chunk_range(k)
        m = i1 - i0
        if m > 0:
            idx = np.arange(i0, i1, dtype=np.float64)
            t = idx * _DT_S
            phase_p = t / self._period + CYCLE_LEAD - k  # in [0, 1) within the chunk
            phase_np = np.mod(phase_p + 0.5, 1.0)

            w_p = agrf_curve(phase_p, prof.braking_peak_bw, peak)
            w_np = agrf_curve(phase_np, prof.braking_peak_bw, prof.nonparetic_peak_bw)

            # Center-of-mass surge: remove the chunk-mean impulse so velocity
            # returns to its carry at every stride boundary, and the chunk-mean
            # velocity so the displacement wobble stays bounded for any peak
            # schedule.
            a_raw = GRAVITY_MS2 * (w_p + w_np)
            a_eff = a_raw - a_raw.mean()
            v = self._v_carry + _DT_S * np.cumsum(a_eff)
            wobble = self._w_carry + _DT_S * np.cumsum(v - v.mean())
            self._v_carry = float(v[-1])
            self._w_carry = float(wobble[-1])

            trans = prof.speed_mps * t + wobble
            r = {
                Limb.PARETIC: ap_excursion(phase_p, prof.stride_amplitude_m),
                Limb.NONPARETIC: ap_excursion(phase_np, prof.stride_amplitude_m),
            }
            foot_z = {
                Limb.PARETIC: FOOT_HEIGHT_M + foot_lift(phase_p, FOOT_LIFT_M),
                Limb.NONPARETIC: FOOT_HEIGHT_M + foot_lift(phase_np, FOOT_LIFT_M),
            }

            pos = np.empty((m, N_SEGMENTS, 3))
            for seg in SegmentId:
                side, frac, lateral = _SEGMENT_BLEND[seg]
                if side is None:
                    pos[:, seg, 0] = trans
                    pos[:, seg, 2] = PELVIS_HEIGHT_M
                else:
                    pos[:, seg, 0] = trans + frac * r[side]
                    pos[:, seg, 2] = PELVIS_HEIGHT_M + frac * (foot_z[side] - PELVIS_HEIGHT_M)
                pos[:, seg, 1] = lateral

            self._pos = np.concatenate([self._pos, pos]) if self._pos.size else pos
            self._agrf_chunks.append(w_p)
            if prof.noise_sd > 0.0:
                shape = (m, N_SEGMENTS, 3)
                pn = self._rng.normal(0.0, prof.noise_sd, shape)
                an = self._rng.normal(0.0, ACCEL_NOISE_SCALE * prof.noise_sd, shape)
                gn = self._rng.normal(0.0, GYRO_NOISE_SCALE * prof.noise_sd, shape)
                self._pos_noise = (
                    np.concatenate([self._pos_noise, pn]) if self._pos_noise is not None else pn
                )
                self._accel_noise = (
                    np.concatenate([self._accel_noise, an])
                    if self._accel_noise is not None
                    else an
                )
                self._gyro_noise = (
                    np.concatenate([self._gyro_noise, gn]) if self._gyro_noise is not None else gn
                )
            self._rows += m

        if k >= 1:
            per = self._period / _DT_S
            contact = int(round((k - CYCLE_LEAD) * per))
            swing = int(round((k - CYCLE_LEAD + STANCE_FRACTION) * per))
            peak_frame = int(round((k - CYCLE_LEAD + PROP_PEAK_PHASE) * per))
            self.events.append(
                GaitEvent(
                    timestamp_us=contact * NOMINAL_FRAME_INTERVAL_US,
                    frame_index=contact,
                    kind=EventKind.FOOT_CONTACT,
                    side=Limb.PARETIC,
                )
            )
            self.events.append(
                GaitEvent(
                    timestamp_us=swing * NOMINAL_FRAME_INTERVAL_US,
                    frame_index=swing,
                    kind=EventKind.SWING_INIT,
                    side=Limb.PARETIC,
                )
            )
            self.stances.append(
                StanceTruth(
                    stride=k,
                    peak_bw=peak,
                    scheduled_bw=scheduled,
                    contact_frame=contact,
                    swing_frame=swing,
                    peak_frame=peak_frame,
                )
            )
        return peak

    # -- emission -----------------------------------------------------------

    def emit_ready(self, limit: Optional[int] = None) -> List[KinematicFrame]:
        """Build every frame whose central-difference stencil is complete.

        Frame i needs positions i-1, i, i+1 (frame 0 borrows frame 1's
        acceleration, so it needs rows 0..2). `limit` caps the global frame
        index (exclusive) — generate() uses it to stop at the requested
        session length.
        """
        hi = self._rows - 1
        if limit is not None:
            hi = min(hi, limit)
        lo = self._emitted
        if lo == 0 and self._rows < 3:
            return []
        if hi <= lo:
            return []

        dt2 = _DT_S * _DT_S
        pos = self._pos
        base = self._base
        lo_loc = lo - base
        hi_loc = hi - base

        accel = np.empty((hi - lo, N_SEGMENTS, 3))
        if lo == 0:
            accel[1:] = (pos[2 : hi_loc + 1] - 2.0 * pos[1:hi_loc] + pos[0 : hi_loc - 1]) / dt2
            accel[0] = (pos[2] - 2.0 * pos[1] + pos[0]) / dt2
        else:
            accel[:] = (
                pos[lo_loc + 1 : hi_loc + 1] - 2.0 * pos[lo_loc:hi_loc] + pos[lo_loc - 1 : hi_loc - 1]
            ) / dt2

        out_pos = pos[lo_loc:hi_loc].copy()
        if self._pos_noise is not None:
            out_pos += self._pos_noise[lo_loc:hi_loc]
            accel += self._accel_noise[lo_loc:hi_loc]
            gyro = self._gyro_noise[lo_loc:hi_loc].astype(np.float32)
        else:
            gyro = None

        frames = []
        for j in range(hi - lo):
            frames.append(
                KinematicFrame(
                    timestamp_us=(lo + j) * NOMINAL_FRAME_INTERVAL_US,
                    quat=self._quat,
                    free_accel=accel[j].astype(np.float32),
                    ang_vel=self._zero_gyro if gyro is None else gyro[j],
                    position=out_pos[j].astype(np.float32),
                )
            )
        self._emitted = hi

        # Drop rows older than the stencil will ever need again.
        new_base = hi - 1
        cut = new_base - base
        if cut > 0:
            self._pos = self._pos[cut:]
            if self._pos_noise is not None:
                self._pos_noise = self._pos_noise[cut:]
                self._accel_noise = self._accel_noise[cut:]
                self._gyro_noise = self._gyro_noise[cut:]
            self._base = new_base
        return frames

    def truth_agrf(self) -> np.ndarray:
        if not self._agrf_chunks:
            return np.empty(0)
        return np.concatenate(self._agrf_chunks)


def generate(
    profile: GaitProfile,
    duration_s: float,
    peak_schedule: Optional[Sequence[float]] = None,
) -> Tuple[List[KinematicFrame], GroundTruth]:
    """Synthesize a walking session of the given duration at 50 Hz.

    peak_schedule optionally sets the scheduled propulsion peak per stride
    chunk (last value repeats when exhausted); omitted strides use the
    profile default. Raises BadProfile if the duration covers fewer than
    two strides.
    """
    if duration_s < 2.0 * profile.stride_period_s:
        raise BadProfile(
            f"duration {duration_s} s covers fewer than 2 strides "
            f"(period {profile.stride_period_s} s)"
        )
    n_frames = int(round(duration_s / _DT_S))
    syn = StrideSynthesizer(profile)
    while syn.rows_generated < n_frames + 1:
        if peak_schedule is not None and len(peak_schedule) > 0:
            k = min(syn.strides_added, len(peak_schedule) - 1)
            syn.add_stride(peak_schedule[k])
        else:
            syn.add_stride()
    frames = syn.emit_ready(limit=n_frames)
    truth = GroundTruth(
        agrf_bw=syn.truth_agrf()[:n_frames].astype(np.float64),
        events=[e for e in syn.events if e.frame_index < n_frames],
        stances=[s for s in syn.stances if s.swing_frame < n_frames],
    )
    return frames, truth
