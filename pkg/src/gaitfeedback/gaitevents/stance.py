"""Stance segmentation and 0-100% time normalization."""

from __future__ import annotations

from typing import Iterable, List, Sequence

import numpy as np

from ..core import Limb
from .types import DegenerateSpan, EventKind, GaitEvent, StancePhase, make_stance


def segment_stances(events: Iterable[GaitEvent]) -> List[StancePhase]:
    """Pair each foot_contact with the following swing_init on the same side.

    Leading swing_inits and a trailing unmatched contact carry no stance
    and are dropped.
    """
    stances: List[StancePhase] = []
    pending: dict[Limb, GaitEvent] = {}
    for event in sorted(events, key=lambda e: e.timestamp_us):
        if event.kind is EventKind.FOOT_CONTACT:
            pending[event.side] = event
        else:
            start = pending.pop(event.side, None)
            if start is not None:
                stances.append(make_stance(start, event))
    return stances


def time_normalize(series: Sequence[float], n_points: int = 101) -> np.ndarray:
    """Resample one stance's samples onto n_points uniform stations.

    Linear interpolation over the sample index axis; the first and last
    values are preserved exactly, so normalizing an already-uniform
    n_points series is the identity.
    """
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 1:
        raise ValueError(f"series must be 1D, got shape {series.shape}")
    if series.shape[0] < 2:
        raise DegenerateSpan(f"cannot normalize a {series.shape[0]}-sample span")
    if n_points < 2:
        raise ValueError("n_points must be at least 2")
    stations = np.linspace(0.0, series.shape[0] - 1, n_points)
    return np.interp(stations, np.arange(series.shape[0]), series)
