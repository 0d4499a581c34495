/**
 * Wire contract between the console and the session engine.
 *
 * The engine speaks JSON text lines over a single websocket. Two kinds of
 * message arrive at the console:
 *
 *  - telemetry, distinguished by a `type` key: `sample` (~10 Hz state
 *    snapshots) and `trigger` (pushed immediately when a pulse fires);
 *  - command acknowledgements, distinguished by an `ok` key.
 *
 * Everything the console displays must come from fields defined here; the
 * console performs no biomechanics of its own.
 */

export class ProtocolError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

// ---------------------------------------------------------------------------
// Inbound: telemetry
// ---------------------------------------------------------------------------

export interface EventInfo {
  /** Gait event kind: "foot_contact" | "swing_init". */
  kind: string;
  /** Event time in stream microseconds. */
  t_us: number;
}

export interface OutcomeInfo {
  /** Peak propulsive force of the just-finished stance, in body weights. */
  peak_bw: number;
  /** Whether the peak cleared the feedback threshold (null pre-calibration). */
  success: boolean | null;
  /** Whether a haptic pulse was commanded for this stance. */
  pulse: boolean;
}

export interface SampleMessage {
  type: "sample";
  /** Stream time of the frame, microseconds. */
  t_us: number;
  /** Estimated anterior ground reaction force, body weights. */
  agrf_bw: number;
  /** False until the estimator's input window is full. */
  warmed: boolean;
  /** Engine stage name, e.g. "baseline_control", "bout_1". */
  stage: string;
  /** Faded-schedule state: true/false inside a bout, null outside. */
  schedule_active: boolean | null;
  /** Feedback threshold (BW); null until calibration. */
  threshold_bw: number | null;
  /** Present only on frames where a gait event was detected. */
  event?: EventInfo;
  /** Present only on frames where a stance outcome was decided. */
  outcome?: OutcomeInfo;
}

export interface TriggerMessage {
  type: "trigger";
  /** Stream time of the triggering swing event, microseconds. */
  t_us: number;
  /** Haptic command sequence number. */
  seq: number;
}

export type TelemetryMessage = SampleMessage | TriggerMessage;

// ---------------------------------------------------------------------------
// Inbound: command acknowledgements
// ---------------------------------------------------------------------------

export interface OutcomeRecord {
  t_us: number;
  peak_bw: number;
  success: boolean | null;
  pulse: boolean;
}

export interface EngineAck {
  /** False when the command was refused. */
  ok: boolean;
  /** Engine stage after applying (or refusing) the command. */
  stage: string;
  /** Seconds elapsed in the current stage, engine-computed. */
  elapsed_s: number;
  paused: boolean;
  aborted: boolean;
  threshold_bw: number | null;
  /** Refusals: "SchemaViolation" | "InvalidTransition". */
  error?: string;
  detail?: string;
  /** `start` ack: human-readable arming note. */
  note?: string;
  /** `set_multiplier` ack: the multiplier now in force. */
  multiplier?: number;
  /** `enter_distance` ack echoes the accepted entry. */
  minute?: number;
  meters?: number;
  /** `status` ack: most recent stance outcomes, oldest first. */
  last_outcomes?: OutcomeRecord[];
}

export type InboundMessage =
  | { kind: "telemetry"; message: TelemetryMessage }
  | { kind: "ack"; ack: EngineAck };

// ---------------------------------------------------------------------------
// Outbound: control actions
// ---------------------------------------------------------------------------

export type ControlAction =
  | { cmd: "start" }
  | { cmd: "pause" }
  | { cmd: "resume" }
  | { cmd: "abort" }
  | { cmd: "advance" }
  | { cmd: "status" }
  | { cmd: "set_multiplier"; value: number }
  /** minute is the 1-based minute marker within the current walking stage. */
  | { cmd: "enter_distance"; minute: number; meters: number };

export type ControlVerb = ControlAction["cmd"];

export const CONTROL_VERBS: readonly ControlVerb[] = [
  "start",
  "pause",
  "resume",
  "abort",
  "advance",
  "status",
  "set_multiplier",
  "enter_distance",
];

/** One operator action encodes to exactly one JSON text line. */
export function encodeAction(action: ControlAction): string {
  switch (action.cmd) {
    case "set_multiplier":
      if (!Number.isFinite(action.value)) {
        throw new ProtocolError("set_multiplier value must be finite");
      }
      return JSON.stringify({ cmd: "set_multiplier", value: action.value });
    case "enter_distance":
      // Minute markers are 1-based: minute 1 closes the stage's first minute.
      if (!Number.isInteger(action.minute) || action.minute < 1) {
        throw new ProtocolError("enter_distance minute must be a positive integer");
      }
      if (!Number.isFinite(action.meters) || action.meters < 0) {
        throw new ProtocolError("enter_distance meters must be finite and non-negative");
      }
      return JSON.stringify({
        cmd: "enter_distance",
        minute: action.minute,
        meters: action.meters,
      });
    default:
      return JSON.stringify({ cmd: action.cmd });
  }
}

// ---------------------------------------------------------------------------
// Parsing and validation
// ---------------------------------------------------------------------------

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function requireFiniteNumber(obj: Record<string, unknown>, field: string): number {
  const v = obj[field];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`field "${field}" must be a finite number`);
  }
  return v;
}

function requireBoolean(obj: Record<string, unknown>, field: string): boolean {
  const v = obj[field];
  if (typeof v !== "boolean") {
    throw new ProtocolError(`field "${field}" must be a boolean`);
  }
  return v;
}

function requireString(obj: Record<string, unknown>, field: string): string {
  const v = obj[field];
  if (typeof v !== "string") {
    throw new ProtocolError(`field "${field}" must be a string`);
  }
  return v;
}

function nullableNumber(obj: Record<string, unknown>, field: string): number | null {
  const v = obj[field];
  if (v === null) return null;
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ProtocolError(`field "${field}" must be a finite number or null`);
  }
  return v;
}

function nullableBoolean(obj: Record<string, unknown>, field: string): boolean | null {
  const v = obj[field];
  if (v === null) return null;
  if (typeof v !== "boolean") {
    throw new ProtocolError(`field "${field}" must be a boolean or null`);
  }
  return v;
}

function parseEvent(value: unknown): EventInfo {
  if (!isRecord(value)) throw new ProtocolError("event must be an object");
  return {
    kind: requireString(value, "kind"),
    t_us: requireFiniteNumber(value, "t_us"),
  };
}

function parseOutcome(value: unknown): OutcomeInfo {
  if (!isRecord(value)) throw new ProtocolError("outcome must be an object");
  return {
    peak_bw: requireFiniteNumber(value, "peak_bw"),
    success: nullableBoolean(value, "success"),
    pulse: requireBoolean(value, "pulse"),
  };
}

function parseOutcomeRecord(value: unknown): OutcomeRecord {
  if (!isRecord(value)) throw new ProtocolError("outcome record must be an object");
  return {
    t_us: requireFiniteNumber(value, "t_us"),
    peak_bw: requireFiniteNumber(value, "peak_bw"),
    success: nullableBoolean(value, "success"),
    pulse: requireBoolean(value, "pulse"),
  };
}

export function parseTelemetry(obj: Record<string, unknown>): TelemetryMessage {
  const type = requireString(obj, "type");
  if (type === "sample") {
    const msg: SampleMessage = {
      type: "sample",
      t_us: requireFiniteNumber(obj, "t_us"),
      agrf_bw: requireFiniteNumber(obj, "agrf_bw"),
      warmed: requireBoolean(obj, "warmed"),
      stage: requireString(obj, "stage"),
      schedule_active: nullableBoolean(obj, "schedule_active"),
      threshold_bw: nullableNumber(obj, "threshold_bw"),
    };
    if (obj.event !== undefined) msg.event = parseEvent(obj.event);
    if (obj.outcome !== undefined) msg.outcome = parseOutcome(obj.outcome);
    return msg;
  }
  if (type === "trigger") {
    return {
      type: "trigger",
      t_us: requireFiniteNumber(obj, "t_us"),
      seq: requireFiniteNumber(obj, "seq"),
    };
  }
  throw new ProtocolError(`unknown telemetry type "${type}"`);
}

export function parseAck(obj: Record<string, unknown>): EngineAck {
  const ack: EngineAck = {
    ok: requireBoolean(obj, "ok"),
    stage: requireString(obj, "stage"),
    elapsed_s: requireFiniteNumber(obj, "elapsed_s"),
    paused: requireBoolean(obj, "paused"),
    aborted: requireBoolean(obj, "aborted"),
    threshold_bw: nullableNumber(obj, "threshold_bw"),
  };
  if (obj.error !== undefined) ack.error = requireString(obj, "error");
  if (obj.detail !== undefined) ack.detail = requireString(obj, "detail");
  if (obj.note !== undefined) ack.note = requireString(obj, "note");
  if (obj.multiplier !== undefined) ack.multiplier = requireFiniteNumber(obj, "multiplier");
  if (obj.minute !== undefined) ack.minute = requireFiniteNumber(obj, "minute");
  if (obj.meters !== undefined) ack.meters = requireFiniteNumber(obj, "meters");
  if (obj.last_outcomes !== undefined) {
    const raw = obj.last_outcomes;
    if (!Array.isArray(raw)) throw new ProtocolError("last_outcomes must be an array");
    ack.last_outcomes = raw.map(parseOutcomeRecord);
  }
  return ack;
}

/**
 * Parse one inbound text line. Acks carry an `ok` key; telemetry carries a
 * `type` key. Anything else — binary data, invalid JSON, unknown shapes —
 * raises ProtocolError.
 */
export function parseInbound(raw: string): InboundMessage {
  let value: unknown;
  try {
    value = JSON.parse(raw);
  } catch {
    throw new ProtocolError("message is not valid JSON");
  }
  if (!isRecord(value)) {
    throw new ProtocolError("message must be a JSON object");
  }
  if ("ok" in value) {
    return { kind: "ack", ack: parseAck(value) };
  }
  if ("type" in value) {
    return { kind: "telemetry", message: parseTelemetry(value) };
  }
  throw new ProtocolError("message has neither an ack nor a telemetry shape");
}

// ---------------------------------------------------------------------------
// Protocol stage table (engine-documented; used only for labels and
// action enablement, never for time arithmetic on telemetry).
// ---------------------------------------------------------------------------

export interface StageInfo {
  /** Operator-facing label. */
  label: string;
  /** Nominal duration in seconds; null when open-ended or terminal. */
  nominalS: number | null;
  /** Whether frames during this stage are walking data. */
  walking: boolean;
  /** Whether the `advance` command may skip out of this stage. */
  skippable: boolean;
}

export const STAGES: Readonly<Record<string, StageInfo>> = {
  baseline_control: { label: "Baseline walk", nominalS: 120, walking: true, skippable: false },
  don_device: { label: "Don device", nominalS: 60, walking: false, skippable: true },
  rest_1: { label: "Rest 1", nominalS: 120, walking: false, skippable: true },
  bout_1: { label: "Feedback bout 1", nominalS: 180, walking: true, skippable: false },
  rest_2: { label: "Rest 2", nominalS: 120, walking: false, skippable: true },
  bout_2: { label: "Feedback bout 2", nominalS: 180, walking: true, skippable: false },
  rest_3: { label: "Rest 3", nominalS: 120, walking: false, skippable: true },
  bout_3: { label: "Feedback bout 3", nominalS: 180, walking: true, skippable: false },
  rest_4: { label: "Rest 4", nominalS: 120, walking: false, skippable: true },
  bout_4: { label: "Feedback bout 4", nominalS: 180, walking: true, skippable: false },
  post_control: { label: "Post walk", nominalS: 120, walking: true, skippable: false },
  long_rest: { label: "Long rest", nominalS: 600, walking: false, skippable: true },
  retention_control: { label: "Retention walk", nominalS: 120, walking: true, skippable: false },
  complete: { label: "Complete", nominalS: null, walking: false, skippable: false },
};

export function stageInfo(stage: string): StageInfo {
  return (
    STAGES[stage] ?? { label: stage, nominalS: null, walking: false, skippable: false }
  );
}
