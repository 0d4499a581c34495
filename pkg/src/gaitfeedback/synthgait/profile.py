"""Synthetic gait profile and its validity rules."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import GaitFeedbackError

#: Fraction of the gait cycle spent in stance; swing starts here.
STANCE_FRACTION = 0.6
#: Within stance: braking lobe spans [0, 0.5], propulsion spans [0.7, 1.0]
#: and peaks at 0.85 (terminal stance).
BRAKE_END = 0.5
PROP_START = 0.7
PROP_PEAK_AT = 0.85

#: Propulsion peaks outside this open interval are physiologically absurd
#: for walking and are rejected.
PEAK_BOUNDS_BW = (0.0, 0.3)


class BadProfile(GaitFeedbackError):
    """A gait profile parameter outside its valid range."""


@dataclass(frozen=True)
class GaitProfile:
    """Parameters of the synthetic hemiparetic walker.

    Defaults sit at the magnitudes of slow post-stroke overground gait:
    0.64 m/s, 1.2 s strides, 0.088 BW propulsion peaks. stride_amplitude_m
    is the half-amplitude of the foot's anterior-posterior excursion
    relative to the pelvis (0.137 m puts step length near 0.256 m).
    asymmetry scales the nonparetic propulsion peak by (1 + asymmetry).
    noise_sd is the position-noise floor in meters; acceleration and gyro
    noise scale from it (see generator). Zero noise means bit-exact,
    perfectly periodic output.
    """

    stride_period_s: float = 1.2
    speed_mps: float = 0.64
    stride_amplitude_m: float = 0.137
    agrf_peak_bw: float = 0.088
    braking_peak_bw: float = -0.10
    asymmetry: float = 0.0
    noise_sd: float = 0.0005
    seed: int = 0

    def __post_init__(self):
        if self.stride_period_s <= 0:
            raise BadProfile(f"stride_period_s must be positive, got {self.stride_period_s}")
        if self.speed_mps <= 0:
            raise BadProfile(f"speed_mps must be positive, got {self.speed_mps}")
        if self.stride_amplitude_m <= 0:
            raise BadProfile(
                f"stride_amplitude_m must be positive, got {self.stride_amplitude_m}"
            )
        lo, hi = PEAK_BOUNDS_BW
        if not lo < self.agrf_peak_bw < hi:
            raise BadProfile(
                f"agrf_peak_bw must lie in ({lo}, {hi}), got {self.agrf_peak_bw}"
            )
        if not -0.5 <= self.braking_peak_bw <= 0.0:
            raise BadProfile(
                f"braking_peak_bw must lie in [-0.5, 0], got {self.braking_peak_bw}"
            )
        nonparetic = self.agrf_peak_bw * (1.0 + self.asymmetry)
        if not lo < nonparetic < hi:
            raise BadProfile(
                f"asymmetry {self.asymmetry} pushes the nonparetic peak to {nonparetic}"
            )
        if self.noise_sd < 0:
            raise BadProfile(f"noise_sd must be non-negative, got {self.noise_sd}")

    @property
    def nonparetic_peak_bw(self) -> float:
        return self.agrf_peak_bw * (1.0 + self.asymmetry)
