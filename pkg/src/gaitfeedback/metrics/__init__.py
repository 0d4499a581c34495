"""Biomechanical outcome measures, statistics, triggers, and reporting."""

from .aggregate import (
    TRIAL_SPEED_WINDOW_S,
    Condition,
    InsufficientMarkers,
    TrialAggregate,
    aggregate_trial,
    gait_speed,
)
from .numerics import f_sf, reg_inc_beta, t_cdf, t_ppf
from .report import (
    REPORT_FORMAT_VERSION,
    CorruptReport,
    MetricComparison,
    MissingCondition,
    SessionReport,
    build_report,
    read_report,
    render_text,
    report_from_records,
    report_to_records,
    write_report,
)
from .stance import (
    LOW_CONFIDENCE_STANCES,
    MIN_VERTICAL_SEPARATION_M,
    DegenerateGeometry,
    EmptyStance,
    MissingSegment,
    StanceMetrics,
    peak_agrf,
    stance_metrics,
    step_length,
    tla_at,
)
from .stats import (
    AnovaResult,
    DegenerateVariance,
    DVariant,
    IncompleteMatrix,
    ZeroBaseline,
    ZeroErrorVariance,
    cohens_d,
    mean_percent_change,
    paired_ci,
    pearson_r,
    percent_change,
    rm_anova,
)
from .triggers import TriggerMetrics, trigger_metrics

__all__ = [
    "LOW_CONFIDENCE_STANCES",
    "MIN_VERTICAL_SEPARATION_M",
    "REPORT_FORMAT_VERSION",
    "TRIAL_SPEED_WINDOW_S",
    "AnovaResult",
    "Condition",
    "CorruptReport",
    "DVariant",
    "DegenerateGeometry",
    "DegenerateVariance",
    "EmptyStance",
    "IncompleteMatrix",
    "InsufficientMarkers",
    "MetricComparison",
    "MissingCondition",
    "MissingSegment",
    "SessionReport",
    "StanceMetrics",
    "TrialAggregate",
    "TriggerMetrics",
    "ZeroBaseline",
    "ZeroErrorVariance",
    "aggregate_trial",
    "build_report",
    "cohens_d",
    "f_sf",
    "gait_speed",
    "mean_percent_change",
    "paired_ci",
    "peak_agrf",
    "pearson_r",
    "percent_change",
    "read_report",
    "reg_inc_beta",
    "render_text",
    "report_from_records",
    "report_to_records",
    "rm_anova",
    "stance_metrics",
    "step_length",
    "t_cdf",
    "t_ppf",
    "tla_at",
    "trigger_metrics",
    "write_report",
]
