"""Post-hoc analysis of a session log: per-condition aggregates and report.

Everything here re-derives from logged records only — no live pipeline
state — so an analysis of a loaded log equals an analysis of the log the
engine just produced.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence

from ..core import Limb
from ..feedback import StanceOutcome
from ..gaitevents import EventKind, GaitEvent, make_stance
from ..metrics import (
    Condition,
    SessionReport,
    StanceMetrics,
    TrialAggregate,
    TriggerMetrics,
    aggregate_trial,
    build_report,
    gait_speed,
    trigger_metrics,
)
from .log import SessionLog
from .protocol import BOUT_STAGES, STAGE_CONDITION, Stage


def _stage_outcomes(log: SessionLog) -> Dict[str, List[Mapping]]:
    grouped: Dict[str, List[Mapping]] = {}
    for record in log.of_kind("outcome"):
        grouped.setdefault(record["stage"], []).append(record)
    return grouped


def _stance_metrics(records: Sequence[Mapping]) -> List[StanceMetrics]:
    out: List[StanceMetrics] = []
    for r in records:
        if r["tla_deg"] is None or r["step_m"] is None:
            continue  # geometry was degenerate for this stance
        out.append(
            StanceMetrics(
                peak_agrf_bw=r["peak_bw"],
                tla_deg=r["tla_deg"],
                step_length_m=r["step_m"],
                peak_frame=-1 if r["peak_frame"] is None else r["peak_frame"],
                non_propulsive=r["peak_bw"] <= 0.0,
            )
        )
    return out


def _minute_marks(log: SessionLog, stage: Stage) -> Optional[List[float]]:
    """Per-minute cumulative distances, preferring operator entries."""
    marks: Dict[int, float] = {}
    for source in ("auto", "operator"):  # operator overwrites auto
        for r in log.of_kind("distance"):
            if r["stage"] == stage.value and r["source"] == source:
                marks[r["minute"]] = r["meters"]
    if 1 not in marks or 2 not in marks:
        return None
    return [marks[1], marks[2]]


def _stage_speed(log: SessionLog, stage: Stage) -> Optional[float]:
    marks = _minute_marks(log, stage)
    if marks is None or len(marks) < 2:
        return None
    return gait_speed(marks)


def session_aggregates(log: SessionLog) -> Dict[Condition, TrialAggregate]:
    """Group logged stances into the four analysis conditions."""
    grouped = _stage_outcomes(log)
    result: Dict[Condition, TrialAggregate] = {}
    for condition in Condition:
        stages = [s for s, c in STAGE_CONDITION.items() if c is condition]
        records: List[Mapping] = []
        speeds: List[float] = []
        for stage in stages:
            records.extend(grouped.get(stage.value, []))
            speed = _stage_speed(log, stage)
            if speed is not None:
                speeds.append(speed)
        stances = _stance_metrics(records)
        if not stances:
            continue
        speed_mps = sum(speeds) / len(speeds) if speeds else 0.0
        result[condition] = aggregate_trial(condition, stances, speed_mps=speed_mps)
    return result


def session_triggers(log: SessionLog, side: Limb = Limb.PARETIC) -> TriggerMetrics:
    """Re-assemble bout stance outcomes from the log for trigger metrics."""
    outcomes: List[StanceOutcome] = []
    bout_values = {s.value for s in BOUT_STAGES}
    for r in log.of_kind("outcome"):
        if r["stage"] not in bout_values:
            continue
        contact = GaitEvent(
            r["contact_t_us"], r["contact_frame"], EventKind.FOOT_CONTACT, side
        )
        swing = GaitEvent(
            r["swing_t_us"], r["swing_frame"], EventKind.SWING_INIT, side
        )
        outcomes.append(
            StanceOutcome(
                stance=make_stance(contact, swing),
                peak_agrf_bw=r["peak_bw"],
                success=bool(r["success"]),
                feedback_active=bool(r["active"]),
                pulse_sent=bool(r["pulse"]),
                trigger_time_us=r["swing_t_us"] if r["pulse"] else None,
            )
        )
    first_bout_start: Optional[int] = None
    for r in log.of_kind("stage"):
        if r["stage"] == Stage.BOUT_1.value:
            first_bout_start = r["t_us"]
            break
    return trigger_metrics(outcomes, first_bout_start_us=first_bout_start)


def analyze_log(log: SessionLog) -> SessionReport:
    """One-participant report straight from a session log."""
    aggregates = session_aggregates(log)
    triggers = session_triggers(log)
    return build_report([aggregates], triggers=[triggers])
