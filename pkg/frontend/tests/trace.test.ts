import { describe, expect, it } from "vitest";
import { RollingTrace, scaleLinear } from "../src/trace.js";

describe("RollingTrace", () => {
  it("keeps only the configured time window", () => {
    const trace = new RollingTrace(10_000_000);
    for (let i = 0; i < 300; i++) {
      trace.addSample(i * 100_000, 0.05, true); // 30 s at 10 Hz
    }
    const span = trace.span();
    expect(span).not.toBeNull();
    expect(span!.endUs).toBe(299 * 100_000);
    for (const p of trace.points()) {
      expect(span!.endUs - p.tUs).toBeLessThanOrEqual(10_000_000);
    }
    expect(trace.points().length).toBeLessThanOrEqual(101);
  });

  it("prunes trigger markers with the window", () => {
    const trace = new RollingTrace(10_000_000);
    trace.addTrigger(500_000, 1, 0);
    for (let i = 0; i < 200; i++) trace.addSample(i * 100_000, 0.05, true);
    expect(trace.markers()).toHaveLength(0); // 0.5 s marker left a 20 s stream
    trace.addTrigger(19_900_000, 2, 0);
    expect(trace.markers().map((m) => m.seq)).toEqual([2]);
  });

  it("enforces a hard capacity cap even with non-advancing timestamps", () => {
    const trace = new RollingTrace(10_000_000, 64, 16);
    for (let i = 0; i < 10_000; i++) {
      trace.addSample(1_000_000, 0.05, true); // pathological: time frozen
      if (i % 100 === 0) trace.addTrigger(1_000_000, i, 0);
    }
    expect(trace.points().length).toBeLessThanOrEqual(64);
    expect(trace.markers().length).toBeLessThanOrEqual(16);
  });

  it("clear() empties both series", () => {
    const trace = new RollingTrace();
    trace.addSample(1, 0.1, true);
    trace.addTrigger(1, 0, 0);
    trace.clear();
    expect(trace.points()).toHaveLength(0);
    expect(trace.markers()).toHaveLength(0);
    expect(trace.span()).toBeNull();
  });
});

describe("scaleLinear", () => {
  it("maps domain endpoints to range endpoints", () => {
    expect(scaleLinear(0, 0, 10, 0, 100)).toBe(0);
    expect(scaleLinear(10, 0, 10, 0, 100)).toBe(100);
    expect(scaleLinear(5, 0, 10, 0, 100)).toBe(50);
  });

  it("supports inverted ranges (canvas y grows downward)", () => {
    expect(scaleLinear(0, 0, 1, 200, 0)).toBe(200);
    expect(scaleLinear(1, 0, 1, 200, 0)).toBe(0);
  });

  it("degrades to the range midpoint for a degenerate domain", () => {
    expect(scaleLinear(5, 5, 5, 0, 100)).toBe(50);
  });
});
