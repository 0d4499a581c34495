"""Append-only session log with lossless line-delimited persistence.

One record per line, JSON-encoded with sorted keys and no whitespace, so
identical sessions serialize byte-for-byte identically. Every record has
a "kind" discriminator, a session timestamp "t_us", and a monotone "n"
sequence number; records are appended in non-decreasing time order and
the loader re-validates that invariant plus the pulse/outcome pairing.

Record kinds
------------
meta        first record: format version, participant, config echo
stage       stage entry: stage, via (event name), abort flag
sample      10 Hz pipeline summary: agrf_bw, warmed, stage, active
event       detected gait event: event, frame, side
outcome     completed stance: window, peak, metrics, gating flags
trigger     haptic command sent: command, seq
threshold   calibration result: value_bw, baseline stats
distance    minute-marker distance: stage, minute, meters, source
device_error  non-fatal haptic-send failure: detail
"""

from __future__ import annotations

import json
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..errors import GaitFeedbackError
from .protocol import Stage, is_walking, stage_duration_s

LOG_FORMAT_VERSION = 1
LOG_SUFFIX = ".sessionl"

RECORD_KINDS = (
    "meta",
    "stage",
    "sample",
    "event",
    "outcome",
    "trigger",
    "threshold",
    "distance",
    "device_error",
)


class CorruptLog(GaitFeedbackError):
    """Log bytes violate the format or an ordering/pairing invariant."""


class NonMonotoneDistance(GaitFeedbackError):
    """A cumulative distance entry decreased within one stage."""


def _canonical(record: Mapping) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False)


class SessionLog:
    """Ordered record list with invariant-checking append helpers."""

    def __init__(self) -> None:
        self._records: List[Dict] = []
        self._last_t_us: Optional[int] = None

    # -- core append ---------------------------------------------------------

    @property
    def records(self) -> Tuple[Dict, ...]:
        return tuple(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SessionLog):
            return NotImplemented
        return self._records == other._records

    def append(self, kind: str, t_us: int, **fields) -> Dict:
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown record kind {kind!r}")
        if not self._records and kind != "meta":
            raise ValueError("meta must be the first record")
        t_us = int(t_us)
        if self._last_t_us is not None and t_us < self._last_t_us:
            raise ValueError(
                f"record at {t_us} us would precede the last record at {self._last_t_us} us"
            )
        record = {"kind": kind, "t_us": t_us, "n": len(self._records), **fields}
        _canonical(record)  # fail fast on NaN/inf or unserializable fields
        self._records.append(record)
        self._last_t_us = t_us
        return record

    # -- typed helpers ---------------------------------------------------------

    def meta(self, t_us: int, participant: str, config: Mapping) -> Dict:
        if self._records:
            raise ValueError("meta must be the first record")
        return self.append(
            "meta", t_us, version=LOG_FORMAT_VERSION, participant=participant,
            config=dict(config),
        )

    def stage_entry(self, t_us: int, stage: Stage, via: str, abort: bool = False) -> Dict:
        return self.append("stage", t_us, stage=stage.value, via=via, abort=abort)

    def sample(
        self, t_us: int, agrf_bw: float, warmed: bool, stage: Stage,
        active: Optional[bool],
    ) -> Dict:
        return self.append(
            "sample", t_us, agrf_bw=float(agrf_bw), warmed=bool(warmed),
            stage=stage.value, active=active,
        )

    def gait_event(
        self, t_us: int, frame: int, event: str, side: str, at_t_us: int
    ) -> Dict:
        """Detected gait event. t_us is detection (stream) time; the event
        itself physically occurred at at_t_us, up to a few frames earlier."""
        return self.append(
            "event", t_us, frame=int(frame), event=event, side=side,
            at_t_us=int(at_t_us),
        )

    def outcome(
        self,
        t_us: int,
        stage: Stage,
        contact_t_us: int,
        contact_frame: int,
        swing_t_us: int,
        swing_frame: int,
        peak_bw: float,
        peak_frame: Optional[int],
        tla_deg: Optional[float],
        step_m: Optional[float],
        success: Optional[bool],
        active: bool,
        pulse: bool,
        trigger_seq: Optional[int],
    ) -> Dict:
        if pulse and trigger_seq is None:
            raise ValueError("a pulsed outcome must reference its trigger seq")
        return self.append(
            "outcome", t_us, stage=stage.value,
            contact_t_us=int(contact_t_us), contact_frame=int(contact_frame),
            swing_t_us=int(swing_t_us), swing_frame=int(swing_frame),
            peak_bw=float(peak_bw),
            peak_frame=None if peak_frame is None else int(peak_frame),
            tla_deg=None if tla_deg is None else float(tla_deg),
            step_m=None if step_m is None else float(step_m),
            success=success, active=bool(active), pulse=bool(pulse),
            trigger_seq=None if trigger_seq is None else int(trigger_seq),
        )

    def trigger(self, t_us: int, seq: int, command: str = "double_pulse") -> Dict:
        return self.append("trigger", t_us, seq=int(seq), command=command)

    def threshold(
        self, t_us: int, value_bw: float, baseline_mean_bw: float,
        multiplier: float, n_peaks: int, meets_minimum: bool,
    ) -> Dict:
        return self.append(
            "threshold", t_us, value_bw=float(value_bw),
            baseline_mean_bw=float(baseline_mean_bw), multiplier=float(multiplier),
            n_peaks=int(n_peaks), meets_minimum=bool(meets_minimum),
        )

    def distance(
        self, t_us: int, stage: Stage, minute: int, meters: float, source: str,
    ) -> Dict:
        return self.append(
            "distance", t_us, stage=stage.value, minute=int(minute),
            meters=float(meters), source=source,
        )

    def device_error(self, t_us: int, detail: str) -> Dict:
        return self.append("device_error", t_us, detail=detail)

    # -- queries ---------------------------------------------------------------

    def of_kind(self, kind: str) -> List[Dict]:
        return [r for r in self._records if r["kind"] == kind]

    def last_distance(self, stage: Stage, source: str) -> Optional[float]:
        best: Optional[float] = None
        for r in self._records:
            if r["kind"] == "distance" and r["stage"] == stage.value and r["source"] == source:
                best = r["meters"]
        return best

    # -- persistence ------------------------------------------------------------

    def to_lines(self) -> List[str]:
        return [_canonical(r) for r in self._records]

    def to_bytes(self) -> bytes:
        return ("\n".join(self.to_lines()) + "\n").encode("utf-8") if self._records else b""

    def save(self, path) -> None:
        with open(path, "wb") as fp:
            fp.write(self.to_bytes())


def record_distance(
    log: SessionLog,
    stage: Stage,
    minute: int,
    meters: float,
    *,
    t_us: int,
    source: str = "operator",
) -> Dict:
    """Append a minute-marker distance, enforcing per-stage monotonicity.

    Distances are cumulative within a stage and reset at each stage start,
    so a new entry may never fall below the previous entry for the same
    stage and source. The minute index must fit the stage's duration.
    """
    if not is_walking(stage):
        raise ValueError(f"distance applies to walking stages, not {stage.value}")
    if not (meters >= 0.0):
        raise ValueError(f"meters must be >= 0, got {meters}")
    duration = stage_duration_s(stage)
    assert duration is not None  # all walking stages are timed
    if not 1 <= minute <= int(duration // 60):
        raise ValueError(
            f"minute {minute} outside {stage.value}'s {duration:.0f} s window"
        )
    previous = log.last_distance(stage, source)
    if previous is not None and meters < previous:
        raise NonMonotoneDistance(
            f"{meters} m at minute {minute} falls below the previous {previous} m"
        )
    return log.distance(t_us, stage, minute, meters, source)


def _validate(records: Sequence[Mapping]) -> None:
    if not records:
        return
    last_t: Optional[int] = None
    trigger_seqs: List[int] = []
    outcome_seqs: List[int] = []
    for i, record in enumerate(records):
        if not isinstance(record, Mapping):
            raise CorruptLog(f"record {i} is not an object")
        kind = record.get("kind")
        if kind not in RECORD_KINDS:
            raise CorruptLog(f"record {i} has unknown kind {kind!r}")
        t_us = record.get("t_us")
        if not isinstance(t_us, int):
            raise CorruptLog(f"record {i} has no integer t_us")
        if last_t is not None and t_us < last_t:
            raise CorruptLog(
                f"record {i} at {t_us} us precedes the previous record at {last_t} us"
            )
        last_t = t_us
        if record.get("n") != i:
            raise CorruptLog(f"record {i} carries sequence number {record.get('n')!r}")
        if kind == "meta":
            if i != 0:
                raise CorruptLog("meta record after the first line")
            if record.get("version") != LOG_FORMAT_VERSION:
                raise CorruptLog(f"unsupported log version {record.get('version')!r}")
        if kind == "trigger":
            trigger_seqs.append(record["seq"])
        if kind == "outcome" and record.get("pulse"):
            if record.get("trigger_seq") is None:
                raise CorruptLog(f"pulsed outcome {i} lacks trigger_seq")
            outcome_seqs.append(record["trigger_seq"])
    if sorted(trigger_seqs) != sorted(outcome_seqs):
        raise CorruptLog(
            f"trigger records {sorted(trigger_seqs)} do not pair with pulsed "
            f"outcomes {sorted(outcome_seqs)}"
        )


def log_from_records(records: Iterable[Mapping]) -> SessionLog:
    materialized = [dict(r) for r in records]
    _validate(materialized)
    log = SessionLog()
    log._records = materialized
    log._last_t_us = materialized[-1]["t_us"] if materialized else None
    return log


def log_from_lines(lines: Iterable[str]) -> SessionLog:
    records = []
    for i, line in enumerate(lines):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CorruptLog(f"line {i + 1} is not valid JSON: {exc}") from exc
    return log_from_records(records)


def load_log(path) -> SessionLog:
    with open(path, "r", encoding="utf-8") as fp:
        return log_from_lines(fp)


def save_log(path, log: SessionLog) -> None:
    log.save(path)
