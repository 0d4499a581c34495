"""The statistical battery for session outcomes.

Percent change, Cohen's d (pooled and paired), paired-difference confidence
intervals, one-way repeated-measures ANOVA, and Pearson correlation — all
implemented directly from their defining formulas with sample (n−1)
variance unless stated otherwise. Distribution tails come from the internal
special functions in numerics; an independent library serves only as a test
oracle, never at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import isfinite, sqrt
from typing import Sequence, Tuple

from ..errors import GaitFeedbackError
from .numerics import f_sf, t_ppf


class ZeroBaseline(GaitFeedbackError):
    """Percent change from a zero baseline is undefined."""


class DegenerateVariance(GaitFeedbackError):
    """A statistic needed spread where the data had none (or too few points)."""


class IncompleteMatrix(GaitFeedbackError):
    """RM-ANOVA requires a complete subjects x conditions matrix."""


class ZeroErrorVariance(GaitFeedbackError):
    """RM-ANOVA error mean square is zero; F is undefined."""


class DVariant(str, Enum):
    POOLED = "pooled"
    PAIRED = "paired"


def _mean(xs: Sequence[float]) -> float:
    return sum(xs) / len(xs)


def _sample_var(xs: Sequence[float]) -> float:
    m = _mean(xs)
    return sum((x - m) ** 2 for x in xs) / (len(xs) - 1)


def percent_change(baseline: float, condition: float) -> float:
    """100 x (condition - baseline) / baseline."""
    if baseline == 0 or not isfinite(baseline):
        raise ZeroBaseline(f"baseline must be nonzero and finite, got {baseline}")
    return 100.0 * (condition - baseline) / baseline


def mean_percent_change(
    baselines: Sequence[float], conditions: Sequence[float]
) -> float:
    """Group figure: mean of per-participant percent changes."""
    if len(baselines) != len(conditions):
        raise ValueError(
            f"paired lists required, got {len(baselines)} vs {len(conditions)}"
        )
    if not baselines:
        raise ValueError("need at least one participant")
    return _mean([percent_change(b, c) for b, c in zip(baselines, conditions)])


def cohens_d(
    a: Sequence[float], b: Sequence[float], variant: DVariant = DVariant.POOLED
) -> float:
    """Effect size of b relative to a.

    pooled: (mean_b - mean_a) / sqrt((sd_a^2 + sd_b^2) / 2)
    paired: mean(b - a) / sd(b - a)
    """
    variant = DVariant(variant)
    if len(a) < 2 or len(b) < 2:
        raise DegenerateVariance("need at least 2 points per sample")
    if variant is DVariant.POOLED:
        denom = sqrt((_sample_var(a) + _sample_var(b)) / 2.0)
        if denom == 0:
            if _mean(b) == _mean(a):
                return 0.0
            raise DegenerateVariance("both samples are constant with unequal means")
        return (_mean(b) - _mean(a)) / denom
    if len(a) != len(b):
        raise ValueError(
            f"paired variant needs equal lengths, got {len(a)} vs {len(b)}"
        )
    diffs = [y - x for x, y in zip(a, b)]
    sd = sqrt(_sample_var(diffs))
    if sd == 0:
        if _mean(diffs) == 0:
            return 0.0
        raise DegenerateVariance("constant nonzero differences")
    return _mean(diffs) / sd


def paired_ci(
    diffs: Sequence[float], level: float = 0.95
) -> Tuple[float, float]:
    """mean(diffs) +/- t_{n-1, (1+level)/2} * sd / sqrt(n)."""
    if len(diffs) < 2:
        raise DegenerateVariance("need at least 2 differences")
    if not (0.0 < level < 1.0):
        raise ValueError(f"confidence level must be in (0, 1), got {level}")
    n = len(diffs)
    m = _mean(diffs)
    sd = sqrt(_sample_var(diffs))
    if sd == 0:
        return (m, m)  # degenerate: zero-width interval
    half = t_ppf(0.5 * (1.0 + level), n - 1) * sd / sqrt(n)
    return (m - half, m + half)


@dataclass(frozen=True)
class AnovaResult:
    """One-way within-subjects ANOVA summary."""

    f_value: float
    df_conditions: int
    df_error: int
    p_value: float
    ss_conditions: float
    ss_subjects: float
    ss_error: float


def rm_anova(matrix: Sequence[Sequence[float]]) -> AnovaResult:
    """One-way repeated-measures ANOVA over a subjects x conditions matrix.

    SS_total = SS_subjects + SS_conditions + SS_error;
    F = MS_conditions / MS_error with df (k-1, (n-1)(k-1)).
    """
    rows = [list(map(float, row)) for row in matrix]
    if len(rows) < 2:
        raise IncompleteMatrix("need at least 2 subjects")
    k = len(rows[0])
    if k < 2:
        raise IncompleteMatrix("need at least 2 conditions")
    if any(len(row) != k for row in rows):
        raise IncompleteMatrix("ragged matrix: every subject needs every condition")
    if any(not isfinite(x) for row in rows for x in row):
        raise IncompleteMatrix("matrix contains non-finite entries")

    n = len(rows)
    grand = sum(sum(row) for row in rows) / (n * k)
    subject_means = [_mean(row) for row in rows]
    condition_means = [_mean([rows[i][j] for i in range(n)]) for j in range(k)]

    ss_subjects = k * sum((m - grand) ** 2 for m in subject_means)
    ss_conditions = n * sum((m - grand) ** 2 for m in condition_means)
    ss_total = sum((x - grand) ** 2 for row in rows for x in row)
    ss_error = ss_total - ss_subjects - ss_conditions
    # float cancellation can leave a tiny negative residue
    if ss_error < 0 and ss_error > -1e-12 * max(1.0, ss_total):
        ss_error = 0.0

    df_c = k - 1
    df_e = (n - 1) * (k - 1)
    ms_error = ss_error / df_e
    if ms_error == 0:
        if ss_conditions == 0:
            raise ZeroErrorVariance(
                "no variance anywhere beyond subject offsets; F undefined"
            )
        raise ZeroErrorVariance("zero error variance with a condition effect")
    f_value = (ss_conditions / df_c) / ms_error
    return AnovaResult(
        f_value=f_value,
        df_conditions=df_c,
        df_error=df_e,
        p_value=f_sf(f_value, df_c, df_e),
        ss_conditions=ss_conditions,
        ss_subjects=ss_subjects,
        ss_error=ss_error,
    )


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation."""
    if len(x) != len(y):
        raise ValueError(f"equal lengths required, got {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise DegenerateVariance("need at least 3 pairs")
    mx, my = _mean(x), _mean(y)
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        raise DegenerateVariance("a constant series has no correlation")
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    return sxy / sqrt(sxx * syy)
