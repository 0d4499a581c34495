"""Participant-specific propulsion threshold calibration.

The target is set a fixed multiplier (default 5%) above the mean per-stance
peak AGRF observed during the baseline walk. Peaks below a small floor are
treated as non-propulsive artifacts and excluded; threshold quality drives
the whole intervention, so garbage stances must not dilute the mean.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite
from statistics import fmean
from typing import Sequence

from ..errors import GaitFeedbackError

DEFAULT_THRESHOLD_MULTIPLIER = 1.05
MIN_PROPULSIVE_PEAK_BW = 0.005
BASELINE_MIN_STANCES = 10


class EmptyBaseline(GaitFeedbackError):
    """Calibration was attempted with no baseline peaks at all."""


class NonPositivePeaks(GaitFeedbackError):
    """No baseline peak cleared the propulsive floor."""


@dataclass(frozen=True)
class Threshold:
    """Calibrated success threshold: multiplier x mean baseline peak."""

    baseline_mean_peak_bw: float
    multiplier: float = DEFAULT_THRESHOLD_MULTIPLIER
    n_peaks: int = 0

    def __post_init__(self):
        if not (isfinite(self.baseline_mean_peak_bw) and self.baseline_mean_peak_bw > 0):
            raise NonPositivePeaks(
                f"baseline mean peak must be positive, got {self.baseline_mean_peak_bw}"
            )
        if not (isfinite(self.multiplier) and self.multiplier > 0):
            raise ValueError(f"multiplier must be positive, got {self.multiplier}")

    @property
    def value_bw(self) -> float:
        """The success threshold in body weights."""
        return self.multiplier * self.baseline_mean_peak_bw

    @property
    def meets_baseline_minimum(self) -> bool:
        """Whether enough stances backed the calibration for clinical use."""
        return self.n_peaks >= BASELINE_MIN_STANCES


def calibrate_threshold(
    baseline_peaks: Sequence[float],
    multiplier: float = DEFAULT_THRESHOLD_MULTIPLIER,
) -> Threshold:
    """Compute the threshold from per-stance baseline peak AGRF values.

    Peaks below MIN_PROPULSIVE_PEAK_BW are excluded before averaging.
    Raises EmptyBaseline for an empty list and NonPositivePeaks when
    nothing usable remains after exclusion.
    """
    peaks = list(baseline_peaks)
    if not peaks:
        raise EmptyBaseline("cannot calibrate a threshold from zero baseline stances")
    usable = [float(p) for p in peaks if isfinite(p) and p >= MIN_PROPULSIVE_PEAK_BW]
    if not usable:
        raise NonPositivePeaks(
            f"all {len(peaks)} baseline peaks fall below the "
            f"{MIN_PROPULSIVE_PEAK_BW} BW propulsive floor"
        )
    return Threshold(
        baseline_mean_peak_bw=fmean(usable),
        multiplier=multiplier,
        n_peaks=len(usable),
    )
