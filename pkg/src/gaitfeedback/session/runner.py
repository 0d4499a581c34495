"""Frame-driven session engine: ingest → estimate → detect → gate → log.

One engine instance owns all mutable session state and is driven from a
single thread, frame by frame. All timing derives from frame timestamps —
never the wall clock — so a replayed ingest stream produces a bit-identical
log every run. Control messages are applied between frames by the same
thread (live servers enqueue them; the engine drains the queue at each
frame boundary).
"""

from __future__ import annotations

import dataclasses
import math
import queue
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from ..core import AgrfEstimate, KinematicFrame, Limb, SegmentId
from ..errors import GaitFeedbackError
from ..estimator import ModelWeights, StreamingEstimator
from ..feedback import (
    DEFAULT_FADED_SCHEDULE,
    DEFAULT_THRESHOLD_MULTIPLIER,
    EmptyBaseline,
    FadedSchedule,
    FeedbackController,
    StanceOutcome,
    calibrate_threshold,
)
from ..gaitevents import DetectorParams, EventKind, GaitEvent, StreamEventDetector
from ..haptics import HapticCommand
from ..metrics.stance import DegenerateGeometry, MissingSegment, step_length, tla_at
from .log import SessionLog, record_distance
from .protocol import (
    STAGE_ORDER,
    InvalidTransition,
    ProtocolEvent,
    ProtocolMachine,
    Stage,
    is_bout,
    is_walking,
)

NOMINAL_RATE_HZ = 50.0
SAMPLE_EVERY_N_FRAMES = 5  # 50 Hz pipeline → 10 Hz log/telemetry samples
FRAME_RING_SIZE = 512

#: Stage → the stage whose timer expiring enters it.
STAGE_BEFORE = {STAGE_ORDER[i]: STAGE_ORDER[i - 1] for i in range(1, len(STAGE_ORDER))}


class IngestLost(GaitFeedbackError):
    """The ingest stream gapped or ended before the protocol completed."""

    def __init__(self, message: str, log: Optional[SessionLog] = None):
        super().__init__(message)
        self.log = log


class CalibrationFailed(GaitFeedbackError):
    """Baseline produced no usable propulsion peaks to calibrate from."""


class SchemaViolation(GaitFeedbackError):
    """A control message did not conform to the command schema."""


@dataclass(frozen=True)
class SessionConfig:
    """Static per-session parameters; everything here is JSON-encodable."""

    participant: str = "anonymous"
    mass_kg: float = 81.5
    threshold_multiplier: float = DEFAULT_THRESHOLD_MULTIPLIER
    schedule: FadedSchedule = DEFAULT_FADED_SCHEDULE
    detector: DetectorParams = DetectorParams()
    side: Limb = Limb.PARETIC
    don_device_s: Optional[float] = 60.0
    ingest_gap_limit_us: int = 1_000_000
    auto_distance: bool = True

    def to_json(self) -> Dict:
        return {
            "participant": self.participant,
            "mass_kg": self.mass_kg,
            "threshold_multiplier": self.threshold_multiplier,
            "schedule_minutes": [list(pair) for pair in self.schedule.minutes],
            "side": self.side.value,
            "don_device_s": self.don_device_s,
            "ingest_gap_limit_us": self.ingest_gap_limit_us,
            "auto_distance": self.auto_distance,
        }


@dataclass
class _StanceWindow:
    """Running peak bookkeeping for the engine's metric enrichment."""

    contact: GaitEvent
    peak_bw: float = -math.inf
    peak_frame: Optional[int] = None

    def absorb(self, estimate: AgrfEstimate, frame_index: int) -> None:
        if estimate.warmed_up and estimate.agrf_bw > self.peak_bw:
            self.peak_bw = estimate.agrf_bw
            self.peak_frame = frame_index


class SessionEngine:
    """Single-threaded pipeline core; see module docstring."""

    def __init__(
        self,
        config: SessionConfig,
        weights: ModelWeights,
        sink=None,
        telemetry: Optional[Callable[[Dict], None]] = None,
    ):
        self.config = config
        self.log = SessionLog()
        self._machine = ProtocolMachine(don_device_s=config.don_device_s)
        self._estimator = StreamingEstimator(weights)
        self._controller = FeedbackController(
            schedule=config.schedule, limb=config.side, seq_start=0
        )
        self._sink = sink
        self._telemetry = telemetry
        self._detector: Optional[StreamEventDetector] = None
        self._detector_frame_base = 0
        self._stance: Optional[_StanceWindow] = None
        self._outcome_cursor = 0  # controller outcomes already logged
        self._t0_us: Optional[int] = None
        self._last_t_us: Optional[int] = None
        self._frame_index = -1
        self._ring: Dict[int, KinematicFrame] = {}
        self._calibrated = False
        self._baseline_peaks: List[float] = []
        self._stage_path_m = 0.0
        self._stage_minutes_logged = 0
        self._last_pelvis_xy: Optional[Tuple[float, float]] = None

    # -- clock helpers ---------------------------------------------------------

    def _now_s(self, t_us: int) -> float:
        assert self._t0_us is not None
        return (t_us - self._t0_us) / 1e6

    def _to_us(self, session_s: float) -> int:
        assert self._t0_us is not None
        return self._t0_us + int(round(session_s * 1e6))

    @property
    def started(self) -> bool:
        return self._machine.started

    @property
    def stage(self) -> Stage:
        return self._machine.stage

    @property
    def complete(self) -> bool:
        return self._machine.complete

    @property
    def aborted(self) -> bool:
        return self._machine.aborted

    @property
    def threshold(self):
        return self._controller.threshold

    def elapsed_s(self) -> float:
        if self._t0_us is None or self._last_t_us is None:
            return 0.0
        return self._machine.elapsed_in_stage(self._now_s(self._last_t_us))

    # -- session lifecycle -------------------------------------------------------

    def start(self, t_us: int) -> None:
        """Begin the protocol clock at the given ingest timestamp."""
        if self._machine.started:
            raise InvalidTransition("session already started")
        self._t0_us = int(t_us)
        self.log.meta(t_us, self.config.participant, self.config.to_json())
        self._machine.inject(ProtocolEvent.START, 0.0)
        self.log.stage_entry(t_us, self._machine.stage, ProtocolEvent.START.value)
        self._enter_stage(self._machine.stage)

    # -- per-frame pipeline --------------------------------------------------------

    def push_frame(self, frame: KinematicFrame) -> None:
        """Process one 50 Hz kinematic frame."""
        if not self._machine.started or self._machine.complete:
            return
        if self._last_t_us is not None:
            dt = frame.timestamp_us - self._last_t_us
            if dt <= 0:
                raise IngestLost(
                    f"non-monotonic ingest timestamp {frame.timestamp_us}", self.log
                )
            if dt > self.config.ingest_gap_limit_us:
                raise IngestLost(
                    f"ingest gap of {dt} us at {frame.timestamp_us}", self.log
                )
        self._last_t_us = frame.timestamp_us
        now_s = self._now_s(frame.timestamp_us)

        # Stage boundaries at or before this frame fire first, so the frame
        # is processed under its true stage.
        if not self._machine.paused:
            for entered, boundary_s in self._machine.tick(now_s):
                self._cross_boundary(entered, boundary_s)

        if self._machine.complete:
            return

        self._frame_index += 1
        index = self._frame_index
        self._ring[index] = frame
        if index >= FRAME_RING_SIZE:
            self._ring.pop(index - FRAME_RING_SIZE, None)

        estimate = self._estimator.push(frame)
        stage = self._machine.stage
        event: Optional[GaitEvent] = None

        if is_walking(stage) and not self._machine.paused:
            event = self._push_detector(frame, index)
            self._track_distance(frame, now_s, stage)

        command: Optional[HapticCommand] = None
        if is_bout(stage) and not self._machine.paused:
            t_in_bout = self._machine.elapsed_in_stage(now_s)
            command = self._controller.update(estimate, event, t_in_bout)

        outcome = self._absorb_stance(estimate, event, index, stage, command)

        if command is not None:
            self._send_command(command, frame.timestamp_us)

        if index % SAMPLE_EVERY_N_FRAMES == 0:
            active: Optional[bool] = None
            if is_bout(stage) and not self._machine.paused:
                active = self.config.schedule.state(
                    self._machine.elapsed_in_stage(now_s)
                ).active
            self.log.sample(
                frame.timestamp_us, estimate.agrf_bw, estimate.warmed_up, stage, active
            )
            self._emit_telemetry(
                frame.timestamp_us, estimate, stage, active, event, outcome
            )
        elif command is not None and self._telemetry is not None:
            # Triggers are pushed immediately, never held for the next sample.
            self._telemetry(
                {"type": "trigger", "t_us": frame.timestamp_us, "seq": command.seq}
            )

    # -- stage transitions ----------------------------------------------------------

    def _cross_boundary(self, entered: Stage, boundary_s: float) -> None:
        """Handle one timer-driven transition at its exact boundary time."""
        left = STAGE_BEFORE[entered]
        t_us = self._to_us(boundary_s)
        self._close_walking_stage(left, t_us)
        if left is Stage.BASELINE_CONTROL:
            self._calibrate(t_us)
        self.log.stage_entry(t_us, entered, ProtocolEvent.TIMER_ELAPSED.value)
        self._enter_stage(entered)

    def _close_walking_stage(self, left: Stage, t_us: int) -> None:
        """Log the final minute-marker distance for a stage that just ended.

        The frame that lands exactly on the boundary belongs to the next
        stage, so the last full-minute mark is written here instead.
        """
        if not (is_walking(left) and self.config.auto_distance):
            return
        duration = self._machine.stage_duration(left)
        if duration is None:
            return
        final_minute = int(duration // 60.0)
        if self._last_pelvis_xy is None or final_minute <= self._stage_minutes_logged:
            return
        record_distance(
            self.log, left, final_minute, round(self._stage_path_m, 4),
            t_us=t_us, source="auto",
        )

    def _enter_stage(self, stage: Stage) -> None:
        self._stance = None
        self._stage_path_m = 0.0
        self._stage_minutes_logged = 0
        self._last_pelvis_xy = None
        if is_walking(stage):
            self._detector = StreamEventDetector(self.config.detector, self.config.side)
            self._detector_frame_base = self._frame_index + 1
        else:
            self._detector = None
        if is_bout(stage):
            self._controller.reset_stance()
            self._outcome_cursor = len(self._controller.outcomes)

    def _calibrate(self, t_us: int) -> None:
        if self._calibrated:
            return
        try:
            threshold = calibrate_threshold(
                self._baseline_peaks, self.config.threshold_multiplier
            )
        except EmptyBaseline as exc:
            raise CalibrationFailed(
                f"baseline yielded no usable propulsion peaks: {exc}"
            ) from exc
        self._controller.set_threshold(threshold)
        self._calibrated = True
        self.log.threshold(
            t_us,
            threshold.value_bw,
            threshold.baseline_mean_peak_bw,
            threshold.multiplier,
            threshold.n_peaks,
            threshold.meets_baseline_minimum,
        )

    # -- detection and stance bookkeeping ------------------------------------------------

    def _push_detector(self, frame: KinematicFrame, index: int) -> Optional[GaitEvent]:
        assert self._detector is not None
        event = self._detector.push_frame(frame)
        if event is None:
            return None
        event = dataclasses.replace(
            event, frame_index=self._detector_frame_base + event.frame_index
        )
        self.log.gait_event(
            frame.timestamp_us, event.frame_index, event.kind.value,
            event.side.value, event.timestamp_us,
        )
        return event

    def _absorb_stance(
        self,
        estimate: AgrfEstimate,
        event: Optional[GaitEvent],
        index: int,
        stage: Stage,
        command: Optional[HapticCommand],
    ) -> Optional[Dict]:
        """Mirror the controller's stance windowing for metric enrichment."""
        outcome_record: Optional[Dict] = None
        if event is not None and event.side is self.config.side:
            if event.kind is EventKind.FOOT_CONTACT:
                self._stance = _StanceWindow(contact=event)
            elif event.kind is EventKind.SWING_INIT and self._stance is not None:
                outcome_record = self._log_outcome(
                    event, stage, command, estimate.timestamp_us
                )
                self._stance = None
        if self._stance is not None:
            self._stance.absorb(estimate, index)
        return outcome_record

    def _log_outcome(
        self,
        swing: GaitEvent,
        stage: Stage,
        command: Optional[HapticCommand],
        t_us: int,
    ) -> Dict:
        assert self._stance is not None
        window = self._stance
        peak = window.peak_bw if math.isfinite(window.peak_bw) else 0.0

        success: Optional[bool] = None
        active = False
        pulse = False
        trigger_seq: Optional[int] = None
        if is_bout(stage) and len(self._controller.outcomes) > self._outcome_cursor:
            gated: StanceOutcome = self._controller.outcomes[-1]
            self._outcome_cursor = len(self._controller.outcomes)
            success = gated.success
            active = gated.feedback_active
            pulse = gated.pulse_sent
            if pulse:
                assert command is not None
                trigger_seq = command.seq

        tla: Optional[float] = None
        step: Optional[float] = None
        peak_frame = window.peak_frame
        if peak_frame is not None and peak_frame in self._ring:
            try:
                tla = tla_at(self._ring[peak_frame], self.config.side)
            except (DegenerateGeometry, MissingSegment):
                tla = None
        contact_frame = window.contact.frame_index
        if contact_frame in self._ring:
            try:
                step = step_length(self._ring[contact_frame], self.config.side)
            except MissingSegment:
                step = None

        if stage is Stage.BASELINE_CONTROL:
            self._baseline_peaks.append(peak)

        return self.log.outcome(
            t_us,
            stage,
            contact_t_us=window.contact.timestamp_us,
            contact_frame=contact_frame,
            swing_t_us=swing.timestamp_us,
            swing_frame=swing.frame_index,
            peak_bw=peak,
            peak_frame=peak_frame,
            tla_deg=tla,
            step_m=step,
            success=success,
            active=active,
            pulse=pulse,
            trigger_seq=trigger_seq,
        )

    # -- distance --------------------------------------------------------------------

    def _track_distance(self, frame: KinematicFrame, now_s: float, stage: Stage) -> None:
        if not self.config.auto_distance:
            return
        pelvis = frame.position[SegmentId.PELVIS]
        xy = (float(pelvis[0]), float(pelvis[1]))
        if self._last_pelvis_xy is not None:
            self._stage_path_m += math.hypot(
                xy[0] - self._last_pelvis_xy[0], xy[1] - self._last_pelvis_xy[1]
            )
        self._last_pelvis_xy = xy
        elapsed = self._machine.elapsed_in_stage(now_s)
        minute = int(elapsed // 60.0)
        duration = self._machine.stage_duration(stage)
        max_minutes = int(duration // 60.0) if duration else 0
        if minute > self._stage_minutes_logged and minute <= max_minutes:
            self._stage_minutes_logged = minute
            record_distance(
                self.log, stage, minute, round(self._stage_path_m, 4),
                t_us=frame.timestamp_us, source="auto",
            )

    # -- haptics ----------------------------------------------------------------------

    def _send_command(self, command: HapticCommand, t_us: int) -> None:
        self.log.trigger(t_us, command.seq, command.kind.name.lower())
        if self._sink is None:
            return
        advance = getattr(self._sink, "advance_clock", None)
        if advance is not None:
            advance(t_us)
        try:
            self._sink.send_trigger(command)
        except OSError as exc:
            # The device being unreachable must never stall the session.
            self.log.device_error(t_us, f"{type(exc).__name__}: {exc}")

    # -- telemetry ----------------------------------------------------------------------

    def _emit_telemetry(
        self,
        t_us: int,
        estimate: AgrfEstimate,
        stage: Stage,
        active: Optional[bool],
        event: Optional[GaitEvent],
        outcome: Optional[Dict],
    ) -> None:
        if self._telemetry is None:
            return
        message: Dict = {
            "type": "sample",
            "t_us": t_us,
            "agrf_bw": estimate.agrf_bw,
            "warmed": estimate.warmed_up,
            "stage": stage.value,
            "schedule_active": active,
            "threshold_bw": None if self.threshold is None else self.threshold.value_bw,
        }
        if event is not None:
            message["event"] = {"kind": event.kind.value, "t_us": event.timestamp_us}
        if outcome is not None:
            message["outcome"] = {
                "peak_bw": outcome["peak_bw"],
                "success": outcome["success"],
                "pulse": outcome["pulse"],
            }
        self._telemetry(message)

    # -- control channel -----------------------------------------------------------------

    def handle_control(self, message: Mapping) -> Dict:
        """Apply one operator command; always returns exactly one ack."""
        try:
            cmd = self._parse_command(message)
            payload = self._apply_command(cmd, message)
        except SchemaViolation as exc:
            return self._ack(False, error="SchemaViolation", detail=str(exc))
        except InvalidTransition as exc:
            return self._ack(False, error="InvalidTransition", detail=str(exc))
        except (ValueError, GaitFeedbackError) as exc:
            return self._ack(False, error=type(exc).__name__, detail=str(exc))
        return self._ack(True, **payload)

    def _parse_command(self, message: Mapping) -> str:
        if not isinstance(message, Mapping):
            raise SchemaViolation("control message must be an object")
        cmd = message.get("cmd")
        if not isinstance(cmd, str):
            raise SchemaViolation("control message requires a string 'cmd'")
        known = {
            "status", "start", "pause", "resume", "abort", "advance",
            "set_multiplier", "enter_distance",
        }
        if cmd not in known:
            raise SchemaViolation(f"unknown cmd {cmd!r}")
        return cmd

    def _control_now_s(self) -> float:
        if self._t0_us is None or self._last_t_us is None:
            return 0.0
        return self._now_s(self._last_t_us)

    def _apply_command(self, cmd: str, message: Mapping) -> Dict:
        now_s = self._control_now_s()
        if cmd == "status":
            return {"last_outcomes": self._recent_outcomes()}
        if cmd == "start":
            if self._machine.started:
                raise InvalidTransition("session already started")
            # Frame-driven sessions start when the first ingest frame lands;
            # the operator's start is acknowledged as an arm-only no-op.
            return {"note": "armed; protocol starts with the first ingest frame"}
        if cmd == "pause":
            self._machine.inject(ProtocolEvent.PAUSE, now_s)
            return {}
        if cmd == "resume":
            self._machine.inject(ProtocolEvent.RESUME, now_s)
            return {}
        if cmd == "abort":
            self._machine.inject(ProtocolEvent.ABORT, now_s)
            self.log.stage_entry(
                self._to_us(now_s), Stage.COMPLETE, ProtocolEvent.ABORT.value,
                abort=True,
            )
            return {}
        if cmd == "advance":
            left = self._machine.stage
            self._machine.inject(ProtocolEvent.ADVANCE, now_s)
            t_us = self._to_us(now_s)
            self._close_walking_stage(left, t_us)
            self.log.stage_entry(t_us, self._machine.stage, ProtocolEvent.ADVANCE.value)
            self._enter_stage(self._machine.stage)
            return {}
        if cmd == "set_multiplier":
            value = message.get("value")
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise SchemaViolation("set_multiplier requires numeric 'value'")
            if self._calibrated:
                raise InvalidTransition("threshold is frozen after calibration")
            if not (math.isfinite(value) and value > 0.0):
                raise SchemaViolation(f"multiplier must be finite and > 0, got {value}")
            self.config = dataclasses.replace(
                self.config, threshold_multiplier=float(value)
            )
            return {"multiplier": float(value)}
        if cmd == "enter_distance":
            minute = message.get("minute")
            meters = message.get("meters")
            if not isinstance(minute, int) or isinstance(minute, bool):
                raise SchemaViolation("enter_distance requires integer 'minute'")
            if not isinstance(meters, (int, float)) or isinstance(meters, bool):
                raise SchemaViolation("enter_distance requires numeric 'meters'")
            stage = self._machine.stage
            record_distance(
                self.log, stage, minute, float(meters),
                t_us=self._to_us(now_s), source="operator",
            )
            return {"stage": stage.value, "minute": minute, "meters": float(meters)}
        raise SchemaViolation(f"unhandled cmd {cmd!r}")  # pragma: no cover

    def _recent_outcomes(self) -> List[Dict]:
        recent = self.log.of_kind("outcome")[-5:]
        return [
            {
                "t_us": r["t_us"],
                "peak_bw": r["peak_bw"],
                "success": r["success"],
                "pulse": r["pulse"],
            }
            for r in recent
        ]

    def _ack(self, ok: bool, **extra) -> Dict:
        ack = {
            "ok": ok,
            "stage": self._machine.stage.value,
            "elapsed_s": round(self.elapsed_s(), 3),
            "paused": self._machine.paused,
            "aborted": self._machine.aborted,
            "threshold_bw": None if self.threshold is None else self.threshold.value_bw,
        }
        ack.update(extra)
        return ack

    # -- finalization -----------------------------------------------------------------------

    def finalize(self) -> SessionLog:
        return self.log


def run_session(
    config: SessionConfig,
    frames: Iterable[KinematicFrame],
    weights: ModelWeights,
    sink=None,
    controls: Optional[Iterable[Tuple[int, Mapping]]] = None,
    control_queue: Optional["queue.Queue"] = None,
    telemetry: Optional[Callable[[Dict], None]] = None,
) -> SessionLog:
    """Drive a full session from an ingest iterable; returns the finished log.

    controls: optional pre-scripted (t_us, message) pairs applied at the
    first frame boundary at or after t_us (deterministic replays).
    control_queue: optional queue.Queue of (message, reply_callback) pairs
    drained at every frame boundary (live operation).
    Raises IngestLost if the stream gaps or ends before the protocol
    completes (the partial log rides on the exception).
    """
    engine = SessionEngine(config, weights, sink=sink, telemetry=telemetry)
    scripted = sorted(controls, key=lambda pair: pair[0]) if controls else []
    scripted_i = 0

    for frame in frames:
        if not engine.started:
            engine.start(frame.timestamp_us)
        while (
            scripted_i < len(scripted)
            and scripted[scripted_i][0] <= frame.timestamp_us
        ):
            engine.handle_control(scripted[scripted_i][1])
            scripted_i += 1
        if control_queue is not None:
            while True:
                try:
                    message, reply = control_queue.get_nowait()
                except queue.Empty:
                    break
                ack = engine.handle_control(message)
                if reply is not None:
                    reply(ack)
        engine.push_frame(frame)
        if engine.complete:
            return engine.finalize()

    if not engine.complete:
        raise IngestLost("ingest ended before the protocol completed", engine.finalize())
    return engine.finalize()
