import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import {
  buildReviewState,
  parseReport,
  parseSessionLog,
  ReviewError,
} from "../src/review.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

const reportText = () =>
  readFileSync(join(FIXTURES, "responder_report.json"), "utf-8");
const logText = () =>
  readFileSync(join(FIXTURES, "short_session.sessionl"), "utf-8");

describe("analysis report parsing", () => {
  it("reads the engine's analyze --json output verbatim", () => {
    const report = parseReport(reportText());
    expect(report.nParticipants).toBe(1);
    expect(report.metrics.map((m) => m.metric)).toEqual([
      "peak_agrf_bw",
      "tla_deg",
      "step_length_m",
      "speed_mps",
    ]);

    const raw = JSON.parse(reportText()) as Record<string, unknown>[];
    const rawPeak = raw.find(
      (r) => r.record === "metric_comparison" && r.metric === "peak_agrf_bw",
    )! as never as {
      group_mean: Record<string, number>;
      mean_pct_change: Record<string, number>;
    };
    const peak = report.metrics[0];
    // Displayed numbers are the engine's, bit-for-bit.
    for (const cond of ["baseline", "during_feedback", "post_feedback", "retention"]) {
      expect(peak.perCondition[cond].mean).toBe(rawPeak.group_mean[cond]);
    }
    for (const cond of ["during_feedback", "post_feedback", "retention"]) {
      expect(peak.changesVsBaseline[cond].meanPctChange).toBe(
        rawPeak.mean_pct_change[cond],
      );
    }
    // This recording came from a responding participant: feedback raised
    // the propulsive peak and the gain persisted.
    expect(peak.changesVsBaseline.during_feedback.meanPctChange).toBeGreaterThan(0);
    expect(peak.changesVsBaseline.retention.meanPctChange).toBeGreaterThan(0);
    // Single-participant report: spread statistics are honestly absent.
    expect(peak.changesVsBaseline.retention.dPooled).toBeNull();
    expect(peak.changesVsBaseline.retention.ci95).toBeNull();
    expect(peak.anova).toBeNull();

    expect(report.triggers).toHaveLength(1);
    expect(report.triggers[0].totalTriggers).toBeGreaterThan(0);
    expect(report.triggers[0].timeToFirstS).toBeGreaterThan(0);
  });

  it("accepts the line-delimited .report form of the same records", () => {
    const records = JSON.parse(reportText()) as unknown[];
    const jsonl = records.map((r) => JSON.stringify(r)).join("\n") + "\n";
    const report = parseReport(jsonl);
    expect(report.metrics).toHaveLength(4);
    expect(report.nParticipants).toBe(1);
  });

  it("renders zero-change comparisons as zeros, not as errors", () => {
    const flat = {
      record: "metric_comparison",
      metric: "peak_agrf_bw",
      group_mean: {
        baseline: 0.09,
        during_feedback: 0.09,
        post_feedback: 0.09,
        retention: 0.09,
      },
      group_sd: { baseline: 0, during_feedback: 0, post_feedback: 0, retention: 0 },
      mean_pct_change: { during_feedback: 0, post_feedback: 0, retention: 0 },
      pct_change_of_means: { during_feedback: 0, post_feedback: 0, retention: 0 },
      d_pooled: { during_feedback: null, post_feedback: null, retention: null },
      d_paired: { during_feedback: null, post_feedback: null, retention: null },
      ci95: { during_feedback: null, post_feedback: null, retention: null },
      anova: null,
    };
    const text = JSON.stringify([
      { record: "report_meta", version: 1, n_participants: 1 },
      flat,
    ]);
    const report = parseReport(text);
    expect(report.metrics[0].changesVsBaseline.retention.meanPctChange).toBe(0);
  });

  it("rejects malformed reports with a readable error", () => {
    expect(() => parseReport("")).toThrow(ReviewError);
    expect(() => parseReport("{broken")).toThrow(ReviewError);
    expect(() => parseReport(JSON.stringify([{ record: "mystery" }]))).toThrow(
      ReviewError,
    );
    expect(() =>
      parseReport(JSON.stringify([{ record: "report_meta", n_participants: 1 }])),
    ).toThrow(/no metric comparisons/);
    // A metric record missing a condition is malformed, not zero.
    const missing = JSON.parse(reportText()) as Record<string, unknown>[];
    const metric = missing.find((r) => r.record === "metric_comparison")! as never as {
      group_mean: Record<string, number>;
    };
    delete metric.group_mean.retention;
    expect(() => parseReport(JSON.stringify(missing))).toThrow(ReviewError);
  });
});

describe("session log parsing", () => {
  it("summarizes a genuine engine log", () => {
    const summary = parseSessionLog(logText());
    expect(summary.participant).toBe("short-demo");
    expect(summary.stages.length).toBeGreaterThanOrEqual(2);
    expect(summary.stages[0].stage).toBe("baseline_control");
    const last = summary.stages[summary.stages.length - 1];
    expect(last.stage).toBe("complete");
    expect(last.abort).toBe(true);
    expect(summary.sampleCount).toBeGreaterThan(50);
    expect(summary.lastTUs).toBeGreaterThan(summary.firstTUs);
  });

  it("rejects malformed logs with the offending line", () => {
    expect(() => parseSessionLog("")).toThrow(ReviewError);
    expect(() => parseSessionLog("{not json}")).toThrow(/line 1/);
    const lines = logText().split("\n").filter((l) => l.trim() !== "");
    // Kill the first record's kind.
    const badFirst = [JSON.stringify({ kind: "sample", t_us: 0, n: 0 }), ...lines.slice(1)];
    expect(() => parseSessionLog(badFirst.join("\n"))).toThrow(
      /first record must be the session meta record/,
    );
    // Break the record counter sequence.
    const resequenced = [...lines];
    const second = JSON.parse(resequenced[1]) as Record<string, unknown>;
    second.n = 99;
    resequenced[1] = JSON.stringify(second);
    expect(() => parseSessionLog(resequenced.join("\n"))).toThrow(/breaks the sequence/);
    // Unknown record kind.
    const unknown = [...lines];
    const record = JSON.parse(unknown[2]) as Record<string, unknown>;
    record.kind = "surprise";
    unknown[2] = JSON.stringify(record);
    expect(() => parseSessionLog(unknown.join("\n"))).toThrow(/unknown record kind/);
  });
});

describe("review screen state", () => {
  it("is empty until files are chosen", () => {
    expect(buildReviewState(null, null)).toEqual({ kind: "empty" });
  });

  it("prompts for analysis when a log arrives without a report", () => {
    const state = buildReviewState(logText(), null);
    expect(state.kind).toBe("ready");
    if (state.kind !== "ready") throw new Error("unreachable");
    expect(state.session).not.toBeNull();
    expect(state.report).toBeNull();
    expect(state.analysisNeeded).toBe(true);
  });

  it("pairs a log with its report", () => {
    const state = buildReviewState(logText(), reportText());
    if (state.kind !== "ready") throw new Error(`expected ready, got ${state.kind}`);
    expect(state.analysisNeeded).toBe(false);
    expect(state.report!.metrics).toHaveLength(4);
  });

  it("turns malformed input into an error screen, not a crash", () => {
    const state = buildReviewState("junk that is not a log", null);
    expect(state.kind).toBe("error");
    if (state.kind !== "error") throw new Error("unreachable");
    expect(state.message).toMatch(/line 1/);
    const badReport = buildReviewState(logText(), "[{]");
    expect(badReport.kind).toBe("error");
  });
});
