"""Cross-participant outcome report over the four walking conditions.

For each outcome measure (peak AGRF, TLA, step length, speed) the report
gives per-condition group mean +/- SD, percent changes versus baseline
(both the mean of per-participant changes — primary — and the change of
group means), both Cohen's d variants, the paired-difference CI, and the
repeated-measures ANOVA across conditions. Machine-readable form is
line-delimited JSON, mirrored by a plain-text table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import sqrt
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..errors import GaitFeedbackError
from .aggregate import Condition, TrialAggregate
from .stats import (
    AnovaResult,
    DegenerateVariance,
    DVariant,
    ZeroErrorVariance,
    cohens_d,
    paired_ci,
    percent_change,
    rm_anova,
)
from .triggers import TriggerMetrics

REPORT_FORMAT_VERSION = 1

METRIC_NAMES: Tuple[Tuple[str, str], ...] = (
    ("peak_agrf_bw", "peak_agrf_mean_bw"),
    ("tla_deg", "tla_mean_deg"),
    ("step_length_m", "step_length_mean_m"),
    ("speed_mps", "speed_mps"),
)

_COMPARED = (Condition.DURING_FEEDBACK, Condition.POST_FEEDBACK, Condition.RETENTION)


class MissingCondition(GaitFeedbackError):
    """Every participant must contribute all four conditions."""


class CorruptReport(GaitFeedbackError):
    """A machine-readable report line failed to parse."""


@dataclass(frozen=True)
class MetricComparison:
    """One outcome measure compared across the four conditions."""

    metric: str
    group_mean: Dict[str, float]
    group_sd: Dict[str, float]
    mean_pct_change: Dict[str, float]
    pct_change_of_means: Dict[str, float]
    d_pooled: Dict[str, Optional[float]]
    d_paired: Dict[str, Optional[float]]
    ci95: Dict[str, Optional[Tuple[float, float]]]
    anova: Optional[AnovaResult]


@dataclass(frozen=True)
class SessionReport:
    """The full outcome battery for a set of participant sessions."""

    n_participants: int
    metrics: Tuple[MetricComparison, ...]
    triggers: Tuple[TriggerMetrics, ...]


def _mean_sd(values: Sequence[float]) -> Tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return mean, 0.0
    return mean, sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))


def build_report(
    per_participant: Sequence[Mapping[Condition, TrialAggregate]],
    triggers: Sequence[TriggerMetrics] = (),
) -> SessionReport:
    """Assemble the report; raises MissingCondition on incomplete input."""
    if not per_participant:
        raise MissingCondition("no participant sessions supplied")
    for i, conditions in enumerate(per_participant):
        missing = [c.value for c in Condition if c not in conditions]
        if missing:
            raise MissingCondition(
                f"participant {i} lacks conditions: {', '.join(missing)}"
            )

    n = len(per_participant)
    comparisons: List[MetricComparison] = []
    for metric, field in METRIC_NAMES:
        values: Dict[Condition, List[float]] = {
            cond: [float(getattr(p[cond], field)) for p in per_participant]
            for cond in Condition
        }
        baseline = values[Condition.BASELINE]

        group_mean: Dict[str, float] = {}
        group_sd: Dict[str, float] = {}
        for cond in Condition:
            m, s = _mean_sd(values[cond])
            group_mean[cond.value] = m
            group_sd[cond.value] = s

        mean_pct: Dict[str, float] = {}
        pct_of_means: Dict[str, float] = {}
        d_pooled: Dict[str, Optional[float]] = {}
        d_paired: Dict[str, Optional[float]] = {}
        ci95: Dict[str, Optional[Tuple[float, float]]] = {}
        for cond in _COMPARED:
            sample = values[cond]
            mean_pct[cond.value] = sum(
                percent_change(b, c) for b, c in zip(baseline, sample)
            ) / n
            pct_of_means[cond.value] = percent_change(
                group_mean[Condition.BASELINE.value], group_mean[cond.value]
            )
            diffs = [c - b for b, c in zip(baseline, sample)]
            try:
                d_pooled[cond.value] = cohens_d(baseline, sample, DVariant.POOLED)
            except DegenerateVariance:
                d_pooled[cond.value] = None
            try:
                d_paired[cond.value] = cohens_d(baseline, sample, DVariant.PAIRED)
            except DegenerateVariance:
                d_paired[cond.value] = None
            try:
                ci95[cond.value] = paired_ci(diffs)
            except DegenerateVariance:
                ci95[cond.value] = None

        anova: Optional[AnovaResult] = None
        if n >= 2:
            matrix = [[values[cond][i] for cond in Condition] for i in range(n)]
            try:
                anova = rm_anova(matrix)
            except ZeroErrorVariance:
                anova = None

        comparisons.append(
            MetricComparison(
                metric=metric,
                group_mean=group_mean,
                group_sd=group_sd,
                mean_pct_change=mean_pct,
                pct_change_of_means=pct_of_means,
                d_pooled=d_pooled,
                d_paired=d_paired,
                ci95=ci95,
                anova=anova,
            )
        )

    return SessionReport(
        n_participants=n,
        metrics=tuple(comparisons),
        triggers=tuple(triggers),
    )


def report_to_records(report: SessionReport) -> List[dict]:
    """Machine-readable form: a list of JSON-serializable records."""
    records: List[dict] = [
        {
            "record": "report_meta",
            "version": REPORT_FORMAT_VERSION,
            "n_participants": report.n_participants,
        }
    ]
    for comparison in report.metrics:
        entry = {
            "record": "metric_comparison",
            "metric": comparison.metric,
            "group_mean": comparison.group_mean,
            "group_sd": comparison.group_sd,
            "mean_pct_change": comparison.mean_pct_change,
            "pct_change_of_means": comparison.pct_change_of_means,
            "d_pooled": comparison.d_pooled,
            "d_paired": comparison.d_paired,
            "ci95": {
                k: (list(v) if v is not None else None)
                for k, v in comparison.ci95.items()
            },
            "anova": None,
        }
        if comparison.anova is not None:
            a = comparison.anova
            entry["anova"] = {
                "f_value": a.f_value,
                "df_conditions": a.df_conditions,
                "df_error": a.df_error,
                "p_value": a.p_value,
                "ss_conditions": a.ss_conditions,
                "ss_subjects": a.ss_subjects,
                "ss_error": a.ss_error,
            }
        records.append(entry)
    for i, trig in enumerate(report.triggers):
        records.append(
            {
                "record": "trigger_metrics",
                "participant": i,
                "time_to_first_s": trig.time_to_first_s,
                "total_triggers": trig.total_triggers,
                "max_consecutive": trig.max_consecutive,
                "cv_consecutive": trig.cv_consecutive,
                "run_lengths": list(trig.run_lengths),
            }
        )
    return records


def write_report(path, report: SessionReport) -> None:
    """Write the line-delimited machine-readable report (.report)."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in report_to_records(report):
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def report_from_records(records: Sequence[dict]) -> SessionReport:
    """Rebuild a SessionReport from its machine-readable records."""
    meta = None
    metrics: List[MetricComparison] = []
    triggers: List[TriggerMetrics] = []
    for record in records:
        kind = record.get("record")
        if kind == "report_meta":
            if record.get("version") != REPORT_FORMAT_VERSION:
                raise CorruptReport(
                    f"unsupported report version {record.get('version')}"
                )
            meta = record
        elif kind == "metric_comparison":
            anova = None
            if record.get("anova") is not None:
                anova = AnovaResult(**record["anova"])
            metrics.append(
                MetricComparison(
                    metric=record["metric"],
                    group_mean=dict(record["group_mean"]),
                    group_sd=dict(record["group_sd"]),
                    mean_pct_change=dict(record["mean_pct_change"]),
                    pct_change_of_means=dict(record["pct_change_of_means"]),
                    d_pooled=dict(record["d_pooled"]),
                    d_paired=dict(record["d_paired"]),
                    ci95={
                        k: (tuple(v) if v is not None else None)
                        for k, v in record["ci95"].items()
                    },
                    anova=anova,
                )
            )
        elif kind == "trigger_metrics":
            triggers.append(
                TriggerMetrics(
                    time_to_first_s=record["time_to_first_s"],
                    total_triggers=record["total_triggers"],
                    max_consecutive=record["max_consecutive"],
                    cv_consecutive=record["cv_consecutive"],
                    run_lengths=tuple(record["run_lengths"]),
                )
            )
        else:
            raise CorruptReport(f"unknown report record kind: {kind!r}")
    if meta is None:
        raise CorruptReport("missing report_meta record")
    return SessionReport(
        n_participants=meta["n_participants"],
        metrics=tuple(metrics),
        triggers=tuple(triggers),
    )


def read_report(path) -> SessionReport:
    """Read a .report file written by write_report."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CorruptReport(f"line {line_no}: {exc}") from None
    return report_from_records(records)


_METRIC_LABELS = {
    "peak_agrf_bw": "Peak AGRF (BW)",
    "tla_deg": "TLA (deg)",
    "step_length_m": "Step length (m)",
    "speed_mps": "Gait speed (m/s)",
}


def render_text(report: SessionReport) -> str:
    """Human-readable table of the full battery."""
    lines: List[str] = []
    lines.append(f"Outcome report — {report.n_participants} participant(s)")
    lines.append("")
    conditions = [c.value for c in Condition]
    for comparison in report.metrics:
        label = _METRIC_LABELS.get(comparison.metric, comparison.metric)
        lines.append(label)
        for cond in conditions:
            mean = comparison.group_mean[cond]
            sd = comparison.group_sd[cond]
            lines.append(f"  {cond:<16} {mean: .4f} ± {sd:.4f}")
        for cond in (c.value for c in _COMPARED):
            pieces = [
                f"Δ% (per-participant) {comparison.mean_pct_change[cond]:+.2f}",
                f"Δ% (of means) {comparison.pct_change_of_means[cond]:+.2f}",
            ]
            if comparison.d_pooled[cond] is not None:
                pieces.append(f"d_pooled {comparison.d_pooled[cond]:+.3f}")
            if comparison.d_paired[cond] is not None:
                pieces.append(f"d_paired {comparison.d_paired[cond]:+.3f}")
            ci = comparison.ci95[cond]
            if ci is not None:
                pieces.append(f"CI95 [{ci[0]:+.4f}, {ci[1]:+.4f}]")
            lines.append(f"  vs {cond:<13} " + "  ".join(pieces))
        if comparison.anova is not None:
            a = comparison.anova
            lines.append(
                f"  RM-ANOVA F({a.df_conditions},{a.df_error}) = {a.f_value:.3f},"
                f" p = {a.p_value:.4f}"
            )
        lines.append("")
    for i, trig in enumerate(report.triggers):
        first = (
            f"{trig.time_to_first_s:.2f} s"
            if trig.time_to_first_s is not None
            else "n/a"
        )
        cv = (
            f"{trig.cv_consecutive:.3f}"
            if trig.cv_consecutive is not None
            else "n/a"
        )
        lines.append(
            f"Triggers P{i}: first {first}, total {trig.total_triggers},"
            f" max run {trig.max_consecutive}, CV {cv}"
        )
    return "\n".join(lines).rstrip() + "\n"
