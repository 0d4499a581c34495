/**
 * DOM and canvas painting. This is the only module that touches the
 * document; it draws whatever the view models from `state.ts` and
 * `review.ts` contain and adds nothing of its own.
 */

import { RollingTrace, scaleLinear } from "./trace.js";
import { ViewModel } from "./state.js";
import { ReviewState } from "./review.js";
import { CONDITIONS, COMPARED_CONDITIONS } from "./review.js";

const CONDITION_LABELS: Record<string, string> = {
  baseline: "Baseline",
  during_feedback: "During feedback",
  post_feedback: "Post feedback",
  retention: "Retention",
};

function fmt(value: number, digits: number): string {
  return value.toFixed(digits);
}

// ---------------------------------------------------------------------------
// Trace canvas
// ---------------------------------------------------------------------------

export class TraceCanvas {
  private readonly canvas: HTMLCanvasElement;
  private readonly ctx: CanvasRenderingContext2D;

  constructor(canvas: HTMLCanvasElement) {
    this.canvas = canvas;
    const ctx = canvas.getContext("2d");
    if (ctx === null) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
  }

  /** Match the backing store to CSS size × devicePixelRatio. */
  private fitToDisplay(): { w: number; h: number } {
    const dpr = window.devicePixelRatio || 1;
    const rect = this.canvas.getBoundingClientRect();
    const w = Math.max(1, Math.round(rect.width * dpr));
    const h = Math.max(1, Math.round(rect.height * dpr));
    if (this.canvas.width !== w || this.canvas.height !== h) {
      this.canvas.width = w;
      this.canvas.height = h;
    }
    return { w, h };
  }

  draw(trace: RollingTrace, thresholdBw: number | null): void {
    const { w, h } = this.fitToDisplay();
    const ctx = this.ctx;
    ctx.clearRect(0, 0, w, h);
    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, w, h);

    const span = trace.span();
    const points = trace.points();
    if (span === null || points.length === 0) {
      ctx.fillStyle = "#8899aa";
      ctx.font = `${14 * (window.devicePixelRatio || 1)}px system-ui, sans-serif`;
      ctx.fillText("waiting for telemetry…", 12, 24);
      return;
    }

    // Force axis: fixed floor so the trace does not jump scale mid-session.
    let maxBw = 0.12;
    for (const p of points) if (p.agrfBw > maxBw) maxBw = p.agrfBw;
    if (thresholdBw !== null && thresholdBw > maxBw) maxBw = thresholdBw;
    maxBw *= 1.15;
    const minBw = Math.min(0, ...points.map((p) => p.agrfBw));

    const x = (tUs: number) => scaleLinear(tUs, span.startUs, span.endUs, 0, w);
    const y = (bw: number) => scaleLinear(bw, minBw, maxBw, h - 6, 6);

    // Zero line.
    ctx.strokeStyle = "#2a3442";
    ctx.lineWidth = 1;
    ctx.beginPath();
    ctx.moveTo(0, y(0));
    ctx.lineTo(w, y(0));
    ctx.stroke();

    // Threshold line (engine-computed value, drawn verbatim).
    if (thresholdBw !== null) {
      ctx.strokeStyle = "#e0a030";
      ctx.setLineDash([6, 4]);
      ctx.beginPath();
      ctx.moveTo(0, y(thresholdBw));
      ctx.lineTo(w, y(thresholdBw));
      ctx.stroke();
      ctx.setLineDash([]);
      ctx.fillStyle = "#e0a030";
      ctx.font = `${11 * (window.devicePixelRatio || 1)}px system-ui, sans-serif`;
      ctx.fillText(`threshold ${fmt(thresholdBw, 4)} BW`, 8, y(thresholdBw) - 4);
    }

    // Force trace; unwarmed samples dimmed.
    ctx.lineWidth = Math.max(1, 1.25 * (window.devicePixelRatio || 1));
    let started = false;
    ctx.beginPath();
    ctx.strokeStyle = "#4fc3f7";
    for (const p of points) {
      const px = x(p.tUs);
      const py = y(p.agrfBw);
      if (!started) {
        ctx.moveTo(px, py);
        started = true;
      } else {
        ctx.lineTo(px, py);
      }
    }
    ctx.stroke();

    // Trigger markers: vertical ticks at the trigger's stream time.
    ctx.strokeStyle = "#ff5470";
    ctx.lineWidth = Math.max(1, 1.5 * (window.devicePixelRatio || 1));
    for (const m of trace.markers()) {
      const px = x(m.tUs);
      ctx.beginPath();
      ctx.moveTo(px, 4);
      ctx.lineTo(px, h - 4);
      ctx.stroke();
    }
  }
}

// ---------------------------------------------------------------------------
// Live console DOM
// ---------------------------------------------------------------------------

export interface ConsoleElements {
  statusBadge: HTMLElement;
  staleBanner: HTMLElement;
  stageName: HTMLElement;
  stageTiming: HTMLElement;
  scheduleBanner: HTMLElement;
  thresholdReadout: HTMLElement;
  forceReadout: HTMLElement;
  triggerReadout: HTMLElement;
  outcomesBody: HTMLElement;
  distancesBody: HTMLElement;
  rejectionBanner: HTMLElement;
  noteLine: HTMLElement;
  buttons: Record<string, HTMLButtonElement>;
}

export function renderConsole(view: ViewModel, els: ConsoleElements): void {
  els.statusBadge.textContent = view.connection;
  els.statusBadge.dataset.state = view.connection;

  els.staleBanner.hidden = !view.stale;

  els.stageName.textContent = view.stage !== null
    ? (view.stageLabel ?? view.stage.value)
    : view.connection === "open"
      ? "ready — not started"
      : "—";

  if (view.elapsedS !== null) {
    const nominal = view.stageNominalS !== null ? ` of ${view.stageNominalS} s` : "";
    const paused = view.paused?.value === true ? " (paused)" : "";
    const aborted = view.aborted?.value === true ? " (aborted)" : "";
    els.stageTiming.textContent = `elapsed ${fmt(view.elapsedS.value, 1)} s${nominal}${paused}${aborted}`;
  } else {
    els.stageTiming.textContent = "";
  }

  const active = view.scheduleActive?.value ?? null;
  els.scheduleBanner.hidden = active === null;
  if (active !== null) {
    els.scheduleBanner.textContent = active ? "FEEDBACK ACTIVE" : "feedback silent";
    els.scheduleBanner.dataset.active = String(active);
  }

  const threshold = view.thresholdBw?.value ?? null;
  els.thresholdReadout.textContent =
    threshold !== null ? `${fmt(threshold, 4)} BW` : "not calibrated";

  if (view.agrfBw !== null) {
    const warm = view.warmed?.value === true ? "" : " (warming)";
    els.forceReadout.textContent = `${fmt(view.agrfBw.value, 4)} BW${warm}`;
  } else {
    els.forceReadout.textContent = "—";
  }

  els.triggerReadout.textContent =
    view.lastTrigger !== null
      ? `${view.triggerCount} pulses (last seq ${view.lastTrigger.seq.value})`
      : "none";

  els.outcomesBody.replaceChildren(
    ...view.lastOutcomes.map((row) => {
      const tr = document.createElement("tr");
      const cells = [
        fmt(row.tUs.value / 1_000_000, 2),
        fmt(row.peakBw.value, 4),
        row.success.value === null ? "—" : row.success.value ? "above" : "below",
        row.pulse.value ? "pulse" : "",
      ];
      for (const text of cells) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.appendChild(td);
      }
      return tr;
    }),
  );

  els.distancesBody.replaceChildren(
    ...view.distanceEntries.map((entry) => {
      const tr = document.createElement("tr");
      for (const text of [
        entry.stage.value,
        String(entry.minute.value),
        fmt(entry.meters.value, 1),
      ]) {
        const td = document.createElement("td");
        td.textContent = text;
        tr.appendChild(td);
      }
      return tr;
    }),
  );

  els.rejectionBanner.hidden = view.rejection === null;
  if (view.rejection !== null) {
    const action = view.rejection.action !== null ? `${view.rejection.action.cmd}: ` : "";
    els.rejectionBanner.textContent =
      `${action}${view.rejection.error}` +
      (view.rejection.detail !== "" ? ` — ${view.rejection.detail}` : "");
  }

  els.noteLine.textContent = view.startNote?.value ?? "";
}

export function renderButtonStates(
  els: ConsoleElements,
  enabled: (verb: string) => boolean,
): void {
  for (const [verb, button] of Object.entries(els.buttons)) {
    button.disabled = !enabled(verb);
  }
}

// ---------------------------------------------------------------------------
// Review DOM
// ---------------------------------------------------------------------------

export function renderReview(state: ReviewState, root: HTMLElement): void {
  root.replaceChildren();
  if (state.kind === "empty") {
    root.appendChild(paragraph("Load a .sessionl log and its analysis report to review."));
    return;
  }
  if (state.kind === "error") {
    const p = paragraph(`Could not read the file: ${state.message}`);
    p.className = "review-error";
    root.appendChild(p);
    return;
  }
  if (state.session !== null) {
    root.appendChild(heading(`Session — participant ${state.session.participant}`));
    const info = paragraph(
      `${state.session.stages.length} stage entries, ` +
        `${state.session.sampleCount} samples, ${state.session.outcomeCount} stances, ` +
        `${state.session.triggerCount} pulses` +
        (state.session.thresholdBw !== null
          ? `, threshold ${fmt(state.session.thresholdBw, 4)} BW`
          : ""),
    );
    root.appendChild(info);
    const stageTable = table(["Stage", "Entered (s)", "Via"]);
    for (const entry of state.session.stages) {
      appendRow(stageTable, [
        entry.stage + (entry.abort ? " (abort)" : ""),
        fmt(entry.tUs / 1_000_000, 1),
        entry.via,
      ]);
    }
    root.appendChild(stageTable);
    if (state.session.distances.length > 0) {
      const distTable = table(["Stage", "Minute", "Meters", "Source"]);
      for (const d of state.session.distances) {
        appendRow(distTable, [d.stage, String(d.minute), fmt(d.meters, 1), d.source]);
      }
      root.appendChild(heading("Distance entries"));
      root.appendChild(distTable);
    }
  }
  if (state.analysisNeeded) {
    const p = paragraph(
      "No analysis report loaded. Run the engine's analyzer " +
        "(gaitfeedback analyze <log> --json) and load its output here.",
    );
    p.className = "review-prompt";
    root.appendChild(p);
    return;
  }
  if (state.report !== null) {
    root.appendChild(
      heading(`Outcome report — ${state.report.nParticipants} participant(s)`),
    );
    for (const metric of state.report.metrics) {
      root.appendChild(heading(metric.label, 3));
      const condTable = table(["Condition", "Mean", "SD"]);
      for (const cond of CONDITIONS) {
        const stats = metric.perCondition[cond];
        appendRow(condTable, [
          CONDITION_LABELS[cond] ?? cond,
          fmt(stats.mean, 4),
          fmt(stats.sd, 4),
        ]);
      }
      root.appendChild(condTable);
      const changeTable = table(["vs baseline", "Δ% (per-participant)", "Δ% (of means)", "d (pooled)", "d (paired)", "95% CI"]);
      for (const cond of COMPARED_CONDITIONS) {
        const change = metric.changesVsBaseline[cond];
        appendRow(changeTable, [
          CONDITION_LABELS[cond] ?? cond,
          fmt(change.meanPctChange, 2),
          fmt(change.pctChangeOfMeans, 2),
          change.dPooled !== null ? fmt(change.dPooled, 3) : "—",
          change.dPaired !== null ? fmt(change.dPaired, 3) : "—",
          change.ci95 !== null
            ? `[${fmt(change.ci95[0], 4)}, ${fmt(change.ci95[1], 4)}]`
            : "—",
        ]);
      }
      root.appendChild(changeTable);
      if (metric.anova !== null) {
        root.appendChild(
          paragraph(
            `RM-ANOVA F(${metric.anova.dfConditions},${metric.anova.dfError}) = ` +
              `${fmt(metric.anova.fValue, 3)}, p = ${fmt(metric.anova.pValue, 4)}`,
          ),
        );
      }
    }
    if (state.report.triggers.length > 0) {
      root.appendChild(heading("Trigger metrics", 3));
      const trigTable = table([
        "Participant",
        "First pulse (s)",
        "Total",
        "Max consecutive",
        "CV consecutive",
      ]);
      for (const trig of state.report.triggers) {
        appendRow(trigTable, [
          `P${trig.participant}`,
          trig.timeToFirstS !== null ? fmt(trig.timeToFirstS, 2) : "n/a",
          String(trig.totalTriggers),
          String(trig.maxConsecutive),
          trig.cvConsecutive !== null ? fmt(trig.cvConsecutive, 3) : "n/a",
        ]);
      }
      root.appendChild(trigTable);
    }
  }
}

function heading(text: string, level: 2 | 3 = 2): HTMLElement {
  const h = document.createElement(`h${level}`);
  h.textContent = text;
  return h;
}

function paragraph(text: string): HTMLParagraphElement {
  const p = document.createElement("p");
  p.textContent = text;
  return p;
}

function table(headers: string[]): HTMLTableElement {
  const t = document.createElement("table");
  const thead = document.createElement("thead");
  const tr = document.createElement("tr");
  for (const header of headers) {
    const th = document.createElement("th");
    th.textContent = header;
    tr.appendChild(th);
  }
  thead.appendChild(tr);
  t.appendChild(thead);
  t.appendChild(document.createElement("tbody"));
  return t;
}

function appendRow(t: HTMLTableElement, cells: string[]): void {
  const tr = document.createElement("tr");
  for (const text of cells) {
    const td = document.createElement("td");
    td.textContent = text;
    tr.appendChild(td);
  }
  t.tBodies[0].appendChild(tr);
}
