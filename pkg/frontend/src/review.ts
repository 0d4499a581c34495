/**
 * Offline review: load a recorded session log (`.sessionl`, JSON lines) and
 * the analysis report produced by the engine's `analyze --json` command
 * (a JSON array, or the equivalent line-delimited `.report` file), and turn
 * them into view models.
 *
 * All statistics shown here — per-condition means, percent changes, effect
 * sizes, ANOVA, trigger metrics — are engine-computed numbers copied from
 * the report. The review screen lays them out; it does not recompute them.
 */

export class ReviewError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ReviewError";
  }
}

// ---------------------------------------------------------------------------
// Session log (.sessionl)
// ---------------------------------------------------------------------------

const LOG_RECORD_KINDS = new Set([
  "meta",
  "stage",
  "sample",
  "event",
  "outcome",
  "trigger",
  "threshold",
  "distance",
  "device_error",
]);

export interface StageEntry {
  stage: string;
  tUs: number;
  via: string;
  abort: boolean;
}

export interface LoggedDistance {
  stage: string;
  minute: number;
  meters: number;
  source: string;
}

export interface SessionSummary {
  participant: string;
  stages: StageEntry[];
  sampleCount: number;
  eventCount: number;
  outcomeCount: number;
  triggerCount: number;
  thresholdBw: number | null;
  distances: LoggedDistance[];
  firstTUs: number;
  lastTUs: number;
}

function asObject(value: unknown, what: string): Record<string, unknown> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new ReviewError(`${what} is not a JSON object`);
  }
  return value as Record<string, unknown>;
}

function num(obj: Record<string, unknown>, field: string, what: string): number {
  const v = obj[field];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ReviewError(`${what}: "${field}" is not a finite number`);
  }
  return v;
}

function str(obj: Record<string, unknown>, field: string, what: string): string {
  const v = obj[field];
  if (typeof v !== "string") {
    throw new ReviewError(`${what}: "${field}" is not a string`);
  }
  return v;
}

export function parseSessionLog(text: string): SessionSummary {
  const lines = text.split("\n").filter((line) => line.trim() !== "");
  if (lines.length === 0) throw new ReviewError("session log is empty");
  const records: Record<string, unknown>[] = [];
  for (let i = 0; i < lines.length; i++) {
    let value: unknown;
    try {
      value = JSON.parse(lines[i]);
    } catch {
      throw new ReviewError(`line ${i + 1} is not valid JSON`);
    }
    const record = asObject(value, `line ${i + 1}`);
    const kind = record.kind;
    if (typeof kind !== "string" || !LOG_RECORD_KINDS.has(kind)) {
      throw new ReviewError(`line ${i + 1} has unknown record kind ${JSON.stringify(kind)}`);
    }
    const n = num(record, "n", `line ${i + 1}`);
    if (n !== i) {
      throw new ReviewError(`line ${i + 1}: record counter ${n} breaks the sequence`);
    }
    num(record, "t_us", `line ${i + 1}`);
    records.push(record);
  }
  if (records[0].kind !== "meta") {
    throw new ReviewError("first record must be the session meta record");
  }
  const participant = str(records[0], "participant", "meta record");

  const stages: StageEntry[] = [];
  const distances: LoggedDistance[] = [];
  let thresholdBw: number | null = null;
  let sampleCount = 0;
  let eventCount = 0;
  let outcomeCount = 0;
  let triggerCount = 0;
  for (const record of records) {
    switch (record.kind) {
      case "stage":
        stages.push({
          stage: str(record, "stage", "stage record"),
          tUs: num(record, "t_us", "stage record"),
          via: str(record, "via", "stage record"),
          abort: record.abort === true,
        });
        break;
      case "sample":
        sampleCount += 1;
        break;
      case "event":
        eventCount += 1;
        break;
      case "outcome":
        outcomeCount += 1;
        break;
      case "trigger":
        triggerCount += 1;
        break;
      case "threshold":
        thresholdBw = num(record, "value_bw", "threshold record");
        break;
      case "distance":
        distances.push({
          stage: str(record, "stage", "distance record"),
          minute: num(record, "minute", "distance record"),
          meters: num(record, "meters", "distance record"),
          source: str(record, "source", "distance record"),
        });
        break;
      default:
        break;
    }
  }
  return {
    participant,
    stages,
    sampleCount,
    eventCount,
    outcomeCount,
    triggerCount,
    thresholdBw,
    distances,
    firstTUs: num(records[0], "t_us", "meta record"),
    lastTUs: num(records[records.length - 1], "t_us", "final record"),
  };
}

// ---------------------------------------------------------------------------
// Analysis report (analyze --json output, or a .report line-delimited file)
// ---------------------------------------------------------------------------

export const CONDITIONS = [
  "baseline",
  "during_feedback",
  "post_feedback",
  "retention",
] as const;

export const COMPARED_CONDITIONS = [
  "during_feedback",
  "post_feedback",
  "retention",
] as const;

export const METRIC_LABELS: Readonly<Record<string, string>> = {
  peak_agrf_bw: "Peak propulsive force (BW)",
  tla_deg: "Trailing limb angle (deg)",
  step_length_m: "Step length (m)",
  speed_mps: "Gait speed (m/s)",
};

export interface ConditionStats {
  mean: number;
  sd: number;
}

export interface ComparisonStats {
  meanPctChange: number;
  pctChangeOfMeans: number;
  dPooled: number | null;
  dPaired: number | null;
  ci95: [number, number] | null;
}

export interface AnovaStats {
  fValue: number;
  dfConditions: number;
  dfError: number;
  pValue: number;
}

export interface MetricSummary {
  metric: string;
  label: string;
  perCondition: Record<string, ConditionStats>;
  changesVsBaseline: Record<string, ComparisonStats>;
  anova: AnovaStats | null;
}

export interface TriggerSummary {
  participant: number;
  timeToFirstS: number | null;
  totalTriggers: number;
  maxConsecutive: number;
  cvConsecutive: number | null;
  runLengths: number[];
}

export interface ReportSummary {
  nParticipants: number;
  metrics: MetricSummary[];
  triggers: TriggerSummary[];
}

function nullableNum(
  obj: Record<string, unknown>,
  field: string,
  what: string,
): number | null {
  const v = obj[field];
  if (v === null || v === undefined) return null;
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new ReviewError(`${what}: "${field}" is not a finite number or null`);
  }
  return v;
}

function conditionMap(value: unknown, what: string): Record<string, number> {
  const obj = asObject(value, what);
  const out: Record<string, number> = {};
  for (const [key, v] of Object.entries(obj)) {
    if (typeof v !== "number" || !Number.isFinite(v)) {
      throw new ReviewError(`${what}: value for "${key}" is not a finite number`);
    }
    out[key] = v;
  }
  return out;
}

function parseMetricComparison(record: Record<string, unknown>): MetricSummary {
  const what = "metric comparison";
  const metric = str(record, "metric", what);
  const groupMean = conditionMap(record.group_mean, `${what} group_mean`);
  const groupSd = conditionMap(record.group_sd, `${what} group_sd`);
  const perCondition: Record<string, ConditionStats> = {};
  for (const cond of CONDITIONS) {
    if (!(cond in groupMean) || !(cond in groupSd)) {
      throw new ReviewError(`${what} for "${metric}" is missing condition "${cond}"`);
    }
    perCondition[cond] = { mean: groupMean[cond], sd: groupSd[cond] };
  }
  const meanPct = conditionMap(record.mean_pct_change, `${what} mean_pct_change`);
  const pctOfMeans = conditionMap(record.pct_change_of_means, `${what} pct_change_of_means`);
  const dPooled = asObject(record.d_pooled, `${what} d_pooled`);
  const dPaired = asObject(record.d_paired, `${what} d_paired`);
  const ci95 = asObject(record.ci95, `${what} ci95`);
  const changes: Record<string, ComparisonStats> = {};
  for (const cond of COMPARED_CONDITIONS) {
    if (!(cond in meanPct) || !(cond in pctOfMeans)) {
      throw new ReviewError(`${what} for "${metric}" lacks changes vs "${cond}"`);
    }
    let ci: [number, number] | null = null;
    const rawCi = ci95[cond];
    if (rawCi !== null && rawCi !== undefined) {
      if (!Array.isArray(rawCi) || rawCi.length !== 2) {
        throw new ReviewError(`${what}: ci95 for "${cond}" is not a pair`);
      }
      const [lo, hi] = rawCi;
      if (typeof lo !== "number" || typeof hi !== "number") {
        throw new ReviewError(`${what}: ci95 bounds for "${cond}" are not numbers`);
      }
      ci = [lo, hi];
    }
    changes[cond] = {
      meanPctChange: meanPct[cond],
      pctChangeOfMeans: pctOfMeans[cond],
      dPooled: nullableNum(dPooled, cond, `${what} d_pooled`),
      dPaired: nullableNum(dPaired, cond, `${what} d_paired`),
      ci95: ci,
    };
  }
  let anova: AnovaStats | null = null;
  if (record.anova !== null && record.anova !== undefined) {
    const a = asObject(record.anova, `${what} anova`);
    anova = {
      fValue: num(a, "f_value", "anova"),
      dfConditions: num(a, "df_conditions", "anova"),
      dfError: num(a, "df_error", "anova"),
      pValue: num(a, "p_value", "anova"),
    };
  }
  return {
    metric,
    label: METRIC_LABELS[metric] ?? metric,
    perCondition,
    changesVsBaseline: changes,
    anova,
  };
}

function parseTriggerMetrics(record: Record<string, unknown>): TriggerSummary {
  const what = "trigger metrics";
  const rawRuns = record.run_lengths;
  if (!Array.isArray(rawRuns) || rawRuns.some((v) => typeof v !== "number")) {
    throw new ReviewError(`${what}: run_lengths is not a number array`);
  }
  return {
    participant: num(record, "participant", what),
    timeToFirstS: nullableNum(record, "time_to_first_s", what),
    totalTriggers: num(record, "total_triggers", what),
    maxConsecutive: num(record, "max_consecutive", what),
    cvConsecutive: nullableNum(record, "cv_consecutive", what),
    runLengths: rawRuns as number[],
  };
}

export function parseReport(text: string): ReportSummary {
  const trimmed = text.trim();
  if (trimmed === "") throw new ReviewError("report is empty");
  let records: unknown[];
  if (trimmed.startsWith("[")) {
    let value: unknown;
    try {
      value = JSON.parse(trimmed);
    } catch {
      throw new ReviewError("report is not valid JSON");
    }
    if (!Array.isArray(value)) throw new ReviewError("report JSON is not an array");
    records = value;
  } else {
    records = trimmed.split("\n").map((line, i) => {
      try {
        return JSON.parse(line) as unknown;
      } catch {
        throw new ReviewError(`report line ${i + 1} is not valid JSON`);
      }
    });
  }
  let nParticipants: number | null = null;
  const metrics: MetricSummary[] = [];
  const triggers: TriggerSummary[] = [];
  for (const raw of records) {
    const record = asObject(raw, "report record");
    const kind = record.record;
    if (kind === "report_meta") {
      nParticipants = num(record, "n_participants", "report meta");
    } else if (kind === "metric_comparison") {
      metrics.push(parseMetricComparison(record));
    } else if (kind === "trigger_metrics") {
      triggers.push(parseTriggerMetrics(record));
    } else {
      throw new ReviewError(`unknown report record kind ${JSON.stringify(kind)}`);
    }
  }
  if (nParticipants === null) throw new ReviewError("report has no meta record");
  if (metrics.length === 0) throw new ReviewError("report has no metric comparisons");
  return { nParticipants, metrics, triggers };
}

// ---------------------------------------------------------------------------
// Review screen state
// ---------------------------------------------------------------------------

export type ReviewState =
  | { kind: "empty" }
  | { kind: "error"; message: string }
  | {
      kind: "ready";
      session: SessionSummary | null;
      report: ReportSummary | null;
      /** True when a log is loaded but no report: prompt to run analysis. */
      analysisNeeded: boolean;
    };

export function buildReviewState(
  logText: string | null,
  reportText: string | null,
): ReviewState {
  if (logText === null && reportText === null) return { kind: "empty" };
  let session: SessionSummary | null = null;
  let report: ReportSummary | null = null;
  try {
    if (logText !== null) session = parseSessionLog(logText);
    if (reportText !== null) report = parseReport(reportText);
  } catch (err) {
    if (err instanceof ReviewError) return { kind: "error", message: err.message };
    throw err;
  }
  return {
    kind: "ready",
    session,
    report,
    analysisNeeded: session !== null && report === null,
  };
}
