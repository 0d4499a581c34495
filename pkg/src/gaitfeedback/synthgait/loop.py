"""Closed-loop harness: synthetic participant vs the full session engine.

The participant is a stride generator whose scheduled propulsion peak
adapts between strides according to a behavioral archetype: after each
stride's frames are consumed by the pipeline, the harness checks whether
the emulated device received a pulse during that stride and feeds the
answer to step_response() for the next stride. Everything — generator,
estimator, detector, gating, device — runs off the frame clock, so one
(profile, response, weights) triple always produces the same log bytes.
"""

from __future__ import annotations

from typing import Iterator, Optional

from ..core import KinematicFrame
from ..estimator import ModelWeights
from ..haptics import DirectDeviceLink
from ..session import SessionConfig, SessionLog, run_session
from .generator import StrideSynthesizer
from .profile import GaitProfile
from .response import ResponseModel, step_response


def _adaptive_frames(
    profile: GaitProfile, model: ResponseModel, link: DirectDeviceLink
) -> Iterator[KinematicFrame]:
    """Endless frame stream with stride-by-stride peak adaptation."""
    synthesizer = StrideSynthesizer(profile)
    scheduled = profile.agrf_peak_bw
    pulses_seen = 0
    while True:
        synthesizer.add_stride(scheduled)
        for frame in synthesizer.emit_ready():
            yield frame
        received = link.pulse_count > pulses_seen
        pulses_seen = link.pulse_count
        scheduled = step_response(model, received, scheduled)


def closed_loop(
    profile: GaitProfile,
    response: ResponseModel,
    weights: ModelWeights,
    config: Optional[SessionConfig] = None,
) -> SessionLog:
    """Run the full intervention protocol against the synthetic participant.

    Returns the completed session log; the emulated haptic device receives
    every pulse over the real wire encoding at frame-clock timestamps.
    """
    if config is None:
        config = SessionConfig(participant=f"synthetic-{response.mode.value}")
    link = DirectDeviceLink()
    frames = _adaptive_frames(profile, response, link)
    return run_session(config, frames, weights, sink=link)
