"""Protocol orchestration: stage machine, frame pipeline, log, control channel."""

from .analysis import analyze_log, session_aggregates, session_triggers
from .log import (
    LOG_FORMAT_VERSION,
    LOG_SUFFIX,
    CorruptLog,
    NonMonotoneDistance,
    SessionLog,
    load_log,
    log_from_lines,
    log_from_records,
    record_distance,
    save_log,
)
from .protocol import (
    BOUT_S,
    BOUT_STAGES,
    CONTROL_TRIAL_S,
    LONG_REST_S,
    REST_S,
    SKIPPABLE_STAGES,
    STAGE_CONDITION,
    STAGE_ORDER,
    WALKING_STAGES,
    InvalidTransition,
    ProtocolEvent,
    ProtocolMachine,
    Stage,
    advance,
    is_bout,
    is_walking,
    next_stage,
    stage_duration_s,
)
from .runner import (
    CalibrationFailed,
    IngestLost,
    SchemaViolation,
    SessionConfig,
    SessionEngine,
    run_session,
)
from .server import ControlServer

__all__ = [
    "BOUT_S",
    "BOUT_STAGES",
    "CONTROL_TRIAL_S",
    "CalibrationFailed",
    "ControlServer",
    "CorruptLog",
    "IngestLost",
    "InvalidTransition",
    "LONG_REST_S",
    "LOG_FORMAT_VERSION",
    "LOG_SUFFIX",
    "NonMonotoneDistance",
    "ProtocolEvent",
    "ProtocolMachine",
    "REST_S",
    "SKIPPABLE_STAGES",
    "STAGE_CONDITION",
    "STAGE_ORDER",
    "SchemaViolation",
    "SessionConfig",
    "SessionEngine",
    "SessionLog",
    "Stage",
    "WALKING_STAGES",
    "advance",
    "analyze_log",
    "is_bout",
    "is_walking",
    "load_log",
    "log_from_lines",
    "log_from_records",
    "next_stage",
    "record_distance",
    "run_session",
    "save_log",
    "session_aggregates",
    "session_triggers",
    "stage_duration_s",
]
