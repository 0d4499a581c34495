"""Stride-to-stride behavioral archetypes for the synthetic participant.

Two archetypes, applied once per stride by the closed-loop harness:

responder
    A haptic pulse (reward for clearing the threshold) raises the next
    stride's propulsion peak by `gain` and consolidates part of the
    improvement into the participant's intrinsic anchor; pulseless strides
    relax 20% of the remaining excess back toward that anchor. Because the
    anchor ratchets up with rewarded practice, a responder retains gains
    after feedback stops instead of decaying all the way to baseline.

nonresponder
    Ignores the cue at best: a pulse nudges the peak down 1% (the cue is a
    distraction, floored well below baseline), pulseless strides change
    nothing. A nonresponder therefore never ends up above baseline.

The numbers are test scaffolding — chosen for clear, stable closed-loop
behavior, not fitted to any human data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .profile import BadProfile

#: Fraction of the peak-above-anchor excess retained per pulseless stride
#: (i.e. 20% of the excess decays each stride).
RELAXATION_RETAINED = 0.8
#: Fraction of the post-pulse excess folded into the anchor per pulse.
CONSOLIDATION_RATE = 0.05
#: Pulses stop helping once the peak exceeds the anchor by this fraction
#: (a within-session effort ceiling).
RESPONDER_HEADROOM = 0.5
#: The anchor never consolidates above baseline x (1 + MAX_CONSOLIDATION):
#: single-session retention tops out at +25%.
MAX_CONSOLIDATION = 0.25
#: Multiplicative drift applied to a nonresponder's peak on pulsed strides.
NONRESPONDER_DRIFT = 0.99
#: Nonresponders never drift below this fraction of their baseline.
NONRESPONDER_FLOOR = 0.85
#: Hard clamp keeping every generated peak physiologically sane (BW).
PEAK_CLAMP_BW = (0.001, 0.295)


class ResponseMode(Enum):
    RESPONDER = "responder"
    NONRESPONDER = "nonresponder"


@dataclass
class ResponseModel:
    """State of one synthetic participant's stride-to-stride adaptation.

    anchor_bw is the consolidated intrinsic peak; it starts at baseline
    and is mutated by step_response() as the responder practices.
    """

    mode: ResponseMode
    gain: float = 0.08
    baseline_peak_bw: float = 0.088
    anchor_bw: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not isinstance(self.mode, ResponseMode):
            self.mode = ResponseMode(self.mode)
        if self.gain <= -1.0:
            raise BadProfile(f"gain must exceed -1, got {self.gain}")
        lo, hi = PEAK_CLAMP_BW
        if not lo <= self.baseline_peak_bw <= hi:
            raise BadProfile(
                f"baseline_peak_bw must lie in [{lo}, {hi}], got {self.baseline_peak_bw}"
            )
        if self.anchor_bw is None:
            self.anchor_bw = self.baseline_peak_bw


def _clamp(peak: float) -> float:
    lo, hi = PEAK_CLAMP_BW
    return min(hi, max(lo, peak))


def step_response(model: ResponseModel, received_pulse: bool, current_peak: float) -> float:
    """Return the next stride's scheduled propulsion peak (BW).

    Mutates model.anchor_bw for responders (consolidation).
    """
    if model.mode is ResponseMode.RESPONDER:
        if received_pulse:
            excess = max(0.0, current_peak - model.anchor_bw)
            sat = max(0.0, 1.0 - excess / (RESPONDER_HEADROOM * model.anchor_bw))
            nxt = _clamp(current_peak * (1.0 + model.gain * sat))
            cap = model.baseline_peak_bw * (1.0 + MAX_CONSOLIDATION)
            target = min(nxt, cap)
            if target > model.anchor_bw:
                model.anchor_bw = _clamp(
                    model.anchor_bw + CONSOLIDATION_RATE * (target - model.anchor_bw)
                )
            return nxt
        return _clamp(model.anchor_bw + RELAXATION_RETAINED * (current_peak - model.anchor_bw))

    if received_pulse:
        floor = model.baseline_peak_bw * NONRESPONDER_FLOOR
        return _clamp(max(floor, current_peak * NONRESPONDER_DRIFT))
    return _clamp(current_peak)
