/**
 * Console state: a reducer over inbound engine messages.
 *
 * Thin-client rule: every displayed quantity is copied from an engine
 * message field; the console never derives forces, peaks, thresholds,
 * stage timing, or success flags on its own. To make that auditable,
 * `viewModel()` returns each displayed number wrapped with the name of the
 * message field it came from, and tests verify the values match the raw
 * messages bit-for-bit.
 *
 * Stage and control state are engine-acknowledged only: sending a command
 * changes nothing locally until the engine's ack (or subsequent telemetry)
 * reports the new state.
 */

import {
  ControlAction,
  ControlVerb,
  EngineAck,
  InboundMessage,
  OutcomeRecord,
  SampleMessage,
  stageInfo,
  TriggerMessage,
} from "./protocol.js";
import { RollingTrace } from "./trace.js";

export type ConnectionStatus = "connecting" | "open" | "stale" | "closed";

/**
 * Render-flush policy: messages the operator must see immediately —
 * triggers, command acks, stance outcomes, stage changes — force a repaint
 * instead of waiting for the next scheduled frame. A fixed-rate loop alone
 * would add up to one frame period of display latency.
 */
export function needsImmediateRender(
  inbound: InboundMessage,
  stageChanged: boolean,
): boolean {
  if (inbound.kind === "ack") return true;
  if (inbound.message.type === "trigger") return true;
  if (inbound.message.outcome !== undefined) return true;
  return stageChanged;
}

/** A displayed number plus the engine message field it was copied from. */
export interface Sourced<T> {
  value: T;
  /** e.g. "sample.agrf_bw", "ack.elapsed_s", "sample.outcome.peak_bw". */
  source: string;
}

export interface OutcomeRow {
  tUs: Sourced<number>;
  peakBw: Sourced<number>;
  success: Sourced<boolean | null>;
  pulse: Sourced<boolean>;
}

export interface DistanceEntry {
  minute: Sourced<number>;
  meters: Sourced<number>;
  stage: Sourced<string>;
}

export interface PendingAction {
  action: ControlAction;
  sentAtMs: number;
}

export interface RejectionNotice {
  error: string;
  detail: string;
  /** The action whose ack carried the refusal, when known. */
  action: ControlAction | null;
  atMs: number;
}

const MAX_OUTCOME_ROWS = 5;

export interface ViewModel {
  connection: ConnectionStatus;
  /** True when no message has arrived within the staleness horizon. */
  stale: boolean;
  /** Engine stage (engine-acknowledged), or null before any message. */
  stage: Sourced<string> | null;
  stageLabel: string | null;
  /** Nominal stage length from the documented protocol table (label only). */
  stageNominalS: number | null;
  /** Seconds elapsed in stage, exactly as the engine last reported. */
  elapsedS: Sourced<number> | null;
  paused: Sourced<boolean> | null;
  aborted: Sourced<boolean> | null;
  started: boolean;
  /** Faded-schedule banner state: engine's schedule_active verbatim. */
  scheduleActive: Sourced<boolean | null> | null;
  thresholdBw: Sourced<number | null> | null;
  /** Latest force sample. */
  agrfBw: Sourced<number> | null;
  sampleTUs: Sourced<number> | null;
  warmed: Sourced<boolean> | null;
  multiplier: Sourced<number> | null;
  lastOutcomes: OutcomeRow[];
  distanceEntries: DistanceEntry[];
  triggerCount: number;
  lastTrigger: { tUs: Sourced<number>; seq: Sourced<number> } | null;
  rejection: RejectionNotice | null;
  startNote: Sourced<string> | null;
  pendingCount: number;
}

export class ConsoleStore {
  readonly trace: RollingTrace;

  private connection: ConnectionStatus = "connecting";
  private lastMessageAtMs: number | null = null;
  private staleAfterMs: number;

  private lastSample: SampleMessage | null = null;
  private lastAck: EngineAck | null = null;
  private startNote: string | null = null;
  private multiplier: number | null = null;
  private outcomes: OutcomeRow[] = [];
  private distances: DistanceEntry[] = [];
  private triggerCount = 0;
  private lastTrigger: TriggerMessage | null = null;
  private rejection: RejectionNotice | null = null;
  private pending: PendingAction[] = [];
  private startAcknowledged = false;

  constructor(trace: RollingTrace = new RollingTrace(), staleAfterMs = 1000) {
    this.trace = trace;
    this.staleAfterMs = staleAfterMs;
  }

  // -- connection lifecycle ---------------------------------------------------------------

  setConnection(status: ConnectionStatus): void {
    this.connection = status;
    if (status === "closed" || status === "connecting") {
      // Unacknowledged sends die with the socket; the engine state they
      // targeted must be re-learned after reconnecting.
      this.pending = [];
    }
  }

  connectionStatus(): ConnectionStatus {
    return this.connection;
  }

  /** True when the link is up but silent past the staleness horizon. */
  isStale(nowMs: number): boolean {
    if (this.connection === "stale") return true;
    if (this.connection !== "open") return false;
    if (this.lastMessageAtMs === null) return false;
    return nowMs - this.lastMessageAtMs >= this.staleAfterMs;
  }

  lastMessageAt(): number | null {
    return this.lastMessageAtMs;
  }

  // -- outbound tracking ------------------------------------------------------------------

  recordSent(action: ControlAction, atMs: number): void {
    this.pending.push({ action, sentAtMs: atMs });
  }

  pendingActions(): readonly PendingAction[] {
    return this.pending;
  }

  // -- reducer ----------------------------------------------------------------------------

  apply(message: InboundMessage, receivedAtMs: number): void {
    this.lastMessageAtMs = receivedAtMs;
    if (message.kind === "ack") {
      this.applyAck(message.ack, receivedAtMs);
    } else if (message.message.type === "sample") {
      this.applySample(message.message, receivedAtMs);
    } else {
      this.applyTrigger(message.message, receivedAtMs);
    }
  }

  private applySample(sample: SampleMessage, receivedAtMs: number): void {
    this.lastSample = sample;
    this.startAcknowledged = true; // telemetry only flows once ingest started
    this.trace.addSample(sample.t_us, sample.agrf_bw, sample.warmed);
    if (sample.outcome !== undefined) {
      this.outcomes.push({
        tUs: { value: sample.t_us, source: "sample.t_us" },
        peakBw: { value: sample.outcome.peak_bw, source: "sample.outcome.peak_bw" },
        success: { value: sample.outcome.success, source: "sample.outcome.success" },
        pulse: { value: sample.outcome.pulse, source: "sample.outcome.pulse" },
      });
      if (this.outcomes.length > MAX_OUTCOME_ROWS) {
        this.outcomes = this.outcomes.slice(this.outcomes.length - MAX_OUTCOME_ROWS);
      }
    }
    void receivedAtMs;
  }

  private applyTrigger(trigger: TriggerMessage, receivedAtMs: number): void {
    this.triggerCount += 1;
    this.lastTrigger = trigger;
    this.trace.addTrigger(trigger.t_us, trigger.seq, receivedAtMs);
  }

  private applyAck(ack: EngineAck, receivedAtMs: number): void {
    const matched = this.pending.shift() ?? null;
    this.lastAck = ack;
    if (!ack.ok) {
      this.rejection = {
        error: ack.error ?? "Refused",
        detail: ack.detail ?? "",
        action: matched?.action ?? null,
        atMs: receivedAtMs,
      };
      return;
    }
    this.rejection = null;
    if (ack.note !== undefined) {
      this.startNote = ack.note;
      this.startAcknowledged = true;
    }
    if (ack.multiplier !== undefined) {
      this.multiplier = ack.multiplier;
    }
    if (ack.minute !== undefined && ack.meters !== undefined) {
      this.distances.push({
        minute: { value: ack.minute, source: "ack.minute" },
        meters: { value: ack.meters, source: "ack.meters" },
        stage: { value: ack.stage, source: "ack.stage" },
      });
    }
    if (ack.last_outcomes !== undefined) {
      this.outcomes = ack.last_outcomes.map((row: OutcomeRecord) => ({
        tUs: { value: row.t_us, source: "ack.last_outcomes.t_us" },
        peakBw: { value: row.peak_bw, source: "ack.last_outcomes.peak_bw" },
        success: { value: row.success, source: "ack.last_outcomes.success" },
        pulse: { value: row.pulse, source: "ack.last_outcomes.pulse" },
      }));
    }
  }

  clearRejection(): void {
    this.rejection = null;
  }

  // -- action enablement --------------------------------------------------------------------

  /**
   * Whether the console should offer a control. Mirrors the engine's
   * documented rules so obviously-invalid sends are disabled up front;
   * the engine remains the authority and refusals render inline.
   */
  actionEnabled(verb: ControlVerb): boolean {
    if (this.connection !== "open" && this.connection !== "stale") return false;
    const ack = this.lastAck;
    const sample = this.lastSample;
    const stage = sample?.stage ?? ack?.stage ?? null;
    const aborted = ack?.aborted ?? false;
    const complete = stage === "complete";
    const paused = ack?.paused ?? false;
    const started = this.startAcknowledged;
    switch (verb) {
      case "start":
        return !started && !complete && !aborted;
      case "pause":
        return started && !paused && !complete && !aborted;
      case "resume":
        return started && paused && !complete && !aborted;
      case "abort":
        return started && !complete && !aborted;
      case "advance":
        return started && !complete && !aborted && stage !== null && stageInfo(stage).skippable;
      case "set_multiplier": {
        // The engine refuses multiplier changes once the threshold is
        // calibrated; before that it is legal, including pre-start.
        const threshold = sample?.threshold_bw ?? ack?.threshold_bw ?? null;
        return threshold === null && !complete && !aborted;
      }
      case "enter_distance":
        return started && !complete && stage !== null && stageInfo(stage).walking;
      case "status":
        return true;
    }
  }

  // -- view ---------------------------------------------------------------------------------

  viewModel(nowMs: number): ViewModel {
    const sample = this.lastSample;
    const ack = this.lastAck;
    // Prefer the freshest engine statement of stage: telemetry flows
    // continuously, acks only on demand.
    let stage: Sourced<string> | null = null;
    if (sample !== null) {
      stage = { value: sample.stage, source: "sample.stage" };
    } else if (ack !== null) {
      stage = { value: ack.stage, source: "ack.stage" };
    }
    const info = stage !== null ? stageInfo(stage.value) : null;
    return {
      connection: this.connection,
      stale: this.isStale(nowMs),
      stage,
      stageLabel: info?.label ?? null,
      stageNominalS: info?.nominalS ?? null,
      elapsedS: ack !== null ? { value: ack.elapsed_s, source: "ack.elapsed_s" } : null,
      paused: ack !== null ? { value: ack.paused, source: "ack.paused" } : null,
      aborted: ack !== null ? { value: ack.aborted, source: "ack.aborted" } : null,
      started: this.startAcknowledged,
      scheduleActive:
        sample !== null
          ? { value: sample.schedule_active, source: "sample.schedule_active" }
          : null,
      thresholdBw:
        sample !== null
          ? { value: sample.threshold_bw, source: "sample.threshold_bw" }
          : ack !== null
            ? { value: ack.threshold_bw, source: "ack.threshold_bw" }
            : null,
      agrfBw: sample !== null ? { value: sample.agrf_bw, source: "sample.agrf_bw" } : null,
      sampleTUs: sample !== null ? { value: sample.t_us, source: "sample.t_us" } : null,
      warmed: sample !== null ? { value: sample.warmed, source: "sample.warmed" } : null,
      multiplier:
        this.multiplier !== null
          ? { value: this.multiplier, source: "ack.multiplier" }
          : null,
      lastOutcomes: [...this.outcomes],
      distanceEntries: [...this.distances],
      triggerCount: this.triggerCount,
      lastTrigger:
        this.lastTrigger !== null
          ? {
              tUs: { value: this.lastTrigger.t_us, source: "trigger.t_us" },
              seq: { value: this.lastTrigger.seq, source: "trigger.seq" },
            }
          : null,
      rejection: this.rejection,
      startNote:
        this.startNote !== null ? { value: this.startNote, source: "ack.note" } : null,
      pendingCount: this.pending.length,
    };
  }
}
