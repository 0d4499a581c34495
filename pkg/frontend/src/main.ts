/**
 * Console entry point: wires the engine link, the store, and the renderer.
 *
 * Rendering policy: a steady loop repaints at RENDER_HZ for smooth trace
 * scroll, and any message that changes what the operator must see *now* —
 * a trigger, a command ack, a stage change, an outcome — forces an
 * immediate repaint. A pure fixed-rate loop alone would leave up to a full
 * frame period between a trigger's arrival and its marker; the immediate
 * flush keeps that latency at effectively zero.
 */

import { parseInbound, ControlAction } from "./protocol.js";
import { ConsoleStore, needsImmediateRender } from "./state.js";
import { EngineLink } from "./ws.js";
import { buildReviewState } from "./review.js";
import {
  ConsoleElements,
  renderButtonStates,
  renderConsole,
  renderReview,
  TraceCanvas,
} from "./render.js";

const RENDER_HZ = 10;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node;
}

function button(id: string): HTMLButtonElement {
  return el(id) as HTMLButtonElement;
}

function engineUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const raw = params.get("engine") ?? "127.0.0.1:8765";
  if (raw.startsWith("ws://") || raw.startsWith("wss://")) return raw;
  return `ws://${raw}`;
}

function main(): void {
  const store = new ConsoleStore();
  const traceCanvas = new TraceCanvas(el("trace") as HTMLCanvasElement);

  const els: ConsoleElements = {
    statusBadge: el("status-badge"),
    staleBanner: el("stale-banner"),
    stageName: el("stage-name"),
    stageTiming: el("stage-timing"),
    scheduleBanner: el("schedule-banner"),
    thresholdReadout: el("threshold-readout"),
    forceReadout: el("force-readout"),
    triggerReadout: el("trigger-readout"),
    outcomesBody: el("outcomes-body"),
    distancesBody: el("distances-body"),
    rejectionBanner: el("rejection-banner"),
    noteLine: el("note-line"),
    buttons: {
      start: button("btn-start"),
      pause: button("btn-pause"),
      resume: button("btn-resume"),
      abort: button("btn-abort"),
      advance: button("btn-advance"),
      status: button("btn-status"),
      set_multiplier: button("btn-multiplier"),
      enter_distance: button("btn-distance"),
    },
  };

  let parseFailures = 0;

  function paint(): void {
    const view = store.viewModel(Date.now());
    renderConsole(view, els);
    renderButtonStates(els, (verb) => store.actionEnabled(verb as never));
    traceCanvas.draw(store.trace, view.thresholdBw?.value ?? null);
    const failures = el("parse-failures");
    failures.hidden = parseFailures === 0;
    failures.textContent =
      parseFailures > 0 ? `${parseFailures} malformed message(s) refused` : "";
  }

  const link = new EngineLink(engineUrl(), {
    onMessage(raw, atMs) {
      let inbound;
      try {
        inbound = parseInbound(raw);
      } catch {
        parseFailures += 1; // refused: nothing from this line is displayed
        return;
      }
      const stageBefore = store.viewModel(atMs).stage?.value ?? null;
      store.apply(inbound, atMs);
      const stageAfter = store.viewModel(atMs).stage?.value ?? null;
      if (needsImmediateRender(inbound, stageBefore !== stageAfter)) {
        paint();
      }
    },
    onStatus(status) {
      store.setConnection(status);
      paint();
    },
  });

  function send(action: ControlAction): void {
    if (link.sendAction(action)) {
      store.recordSent(action, Date.now());
    }
    paint();
  }

  els.buttons.start.addEventListener("click", () => send({ cmd: "start" }));
  els.buttons.pause.addEventListener("click", () => send({ cmd: "pause" }));
  els.buttons.resume.addEventListener("click", () => send({ cmd: "resume" }));
  els.buttons.abort.addEventListener("click", () => {
    if (window.confirm("Abort the session? This ends the protocol immediately.")) {
      send({ cmd: "abort" });
    }
  });
  els.buttons.advance.addEventListener("click", () => send({ cmd: "advance" }));
  els.buttons.status.addEventListener("click", () => send({ cmd: "status" }));
  els.buttons.set_multiplier.addEventListener("click", () => {
    const value = Number((el("multiplier-input") as HTMLInputElement).value);
    send({ cmd: "set_multiplier", value });
  });
  els.buttons.enter_distance.addEventListener("click", () => {
    const minute = Number((el("distance-minute") as HTMLInputElement).value);
    const meters = Number((el("distance-meters") as HTMLInputElement).value);
    send({ cmd: "enter_distance", minute, meters });
  });

  // Review screen: local files only, parsed offline.
  const logInput = el("review-log") as HTMLInputElement;
  const reportInput = el("review-report") as HTMLInputElement;
  let logText: string | null = null;
  let reportText: string | null = null;

  function repaintReview(): void {
    renderReview(buildReviewState(logText, reportText), el("review-root"));
  }

  logInput.addEventListener("change", () => {
    const file = logInput.files?.[0];
    if (file === undefined) return;
    void file.text().then((text) => {
      logText = text;
      repaintReview();
    });
  });
  reportInput.addEventListener("change", () => {
    const file = reportInput.files?.[0];
    if (file === undefined) return;
    void file.text().then((text) => {
      reportText = text;
      repaintReview();
    });
  });

  // Staleness must surface within a second even with no inbound traffic,
  // so the steady repaint loop doubles as the stale check.
  setInterval(paint, 1000 / RENDER_HZ);

  paint();
  repaintReview();
  link.connect();
}

main();
