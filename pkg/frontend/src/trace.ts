/**
 * Bounded rolling window over the telemetry stream: the last ~10 seconds of
 * force samples plus the trigger markers that fall inside that window.
 *
 * Memory is bounded two ways: points older than the window are pruned on
 * every insert, and a hard capacity cap protects against streams whose
 * timestamps misbehave. A multi-hour replay therefore holds the same number
 * of points as a ten-second one.
 */

export interface TracePoint {
  tUs: number;
  agrfBw: number;
  warmed: boolean;
}

export interface TriggerMarker {
  tUs: number;
  seq: number;
  /** Console wall-clock receipt time (ms), used to verify display latency. */
  receivedAtMs: number;
}

const DEFAULT_WINDOW_US = 10_000_000;
// 10 s at 10 Hz is 100 samples; leave generous headroom for bursts.
const DEFAULT_MAX_POINTS = 512;
const DEFAULT_MAX_MARKERS = 256;

export class RollingTrace {
  private readonly windowUs: number;
  private readonly maxPoints: number;
  private readonly maxMarkers: number;
  private pts: TracePoint[] = [];
  private marks: TriggerMarker[] = [];

  constructor(
    windowUs: number = DEFAULT_WINDOW_US,
    maxPoints: number = DEFAULT_MAX_POINTS,
    maxMarkers: number = DEFAULT_MAX_MARKERS,
  ) {
    if (windowUs <= 0) throw new RangeError("windowUs must be positive");
    if (maxPoints <= 0) throw new RangeError("maxPoints must be positive");
    if (maxMarkers <= 0) throw new RangeError("maxMarkers must be positive");
    this.windowUs = windowUs;
    this.maxPoints = maxPoints;
    this.maxMarkers = maxMarkers;
  }

  addSample(tUs: number, agrfBw: number, warmed: boolean): void {
    this.pts.push({ tUs, agrfBw, warmed });
    this.prune(tUs);
  }

  addTrigger(tUs: number, seq: number, receivedAtMs: number): void {
    this.marks.push({ tUs, seq, receivedAtMs });
    this.prune(this.latestTUs() ?? tUs);
  }

  /** Latest sample time, or null when empty. */
  latestTUs(): number | null {
    return this.pts.length > 0 ? this.pts[this.pts.length - 1].tUs : null;
  }

  points(): readonly TracePoint[] {
    return this.pts;
  }

  markers(): readonly TriggerMarker[] {
    return this.marks;
  }

  /** Window span currently displayed: [end − windowUs, end]. */
  span(): { startUs: number; endUs: number } | null {
    const end = this.latestTUs();
    if (end === null) return null;
    return { startUs: end - this.windowUs, endUs: end };
  }

  clear(): void {
    this.pts = [];
    this.marks = [];
  }

  private prune(nowUs: number): void {
    const cutoff = nowUs - this.windowUs;
    if (this.pts.length > 0 && this.pts[0].tUs < cutoff) {
      let firstKept = 0;
      while (firstKept < this.pts.length && this.pts[firstKept].tUs < cutoff) {
        firstKept += 1;
      }
      this.pts = this.pts.slice(firstKept);
    }
    if (this.pts.length > this.maxPoints) {
      this.pts = this.pts.slice(this.pts.length - this.maxPoints);
    }
    if (this.marks.length > 0 && this.marks[0].tUs < cutoff) {
      let firstKept = 0;
      while (firstKept < this.marks.length && this.marks[firstKept].tUs < cutoff) {
        firstKept += 1;
      }
      this.marks = this.marks.slice(firstKept);
    }
    if (this.marks.length > this.maxMarkers) {
      this.marks = this.marks.slice(this.marks.length - this.maxMarkers);
    }
  }
}

/**
 * Map a value from a data range onto pixel coordinates. Pure helper shared
 * by the canvas renderer and its tests.
 */
export function scaleLinear(
  value: number,
  domainLo: number,
  domainHi: number,
  rangeLo: number,
  rangeHi: number,
): number {
  if (domainHi === domainLo) return (rangeLo + rangeHi) / 2;
  const t = (value - domainLo) / (domainHi - domainLo);
  return rangeLo + t * (rangeHi - rangeLo);
}
