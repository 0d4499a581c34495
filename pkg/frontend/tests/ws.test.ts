import { describe, expect, it } from "vitest";
import { EngineLink, LinkStatus, SocketLike } from "../src/ws.js";

/** Deterministic timer queue driven by an explicit clock. */
class ManualTimers {
  private nowMs = 0;
  private nextHandle = 1;
  private timers = new Map<number, { at: number; fn: () => void }>();

  now = (): number => this.nowMs;

  schedule = (fn: () => void, ms: number): unknown => {
    const handle = this.nextHandle++;
    this.timers.set(handle, { at: this.nowMs + ms, fn });
    return handle;
  };

  cancel = (handle: unknown): void => {
    this.timers.delete(handle as number);
  };

  advance(ms: number): void {
    const target = this.nowMs + ms;
    for (;;) {
      let dueHandle: number | null = null;
      let dueAt = Infinity;
      for (const [handle, t] of this.timers) {
        if (t.at <= target && t.at < dueAt) {
          dueAt = t.at;
          dueHandle = handle;
        }
      }
      if (dueHandle === null) break;
      const timer = this.timers.get(dueHandle)!;
      this.timers.delete(dueHandle);
      this.nowMs = timer.at;
      timer.fn();
    }
    this.nowMs = target;
  }
}

class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed = false;
  onopen: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  serverOpen(): void {
    this.onopen?.();
  }

  serverSend(data: unknown): void {
    this.onmessage?.({ data });
  }

  serverClose(): void {
    this.onclose?.();
  }
}

function harness(opts: { staleAfterMs?: number } = {}) {
  const timers = new ManualTimers();
  const sockets: FakeSocket[] = [];
  const statuses: LinkStatus[] = [];
  const messages: Array<{ raw: string; atMs: number }> = [];
  let binaryRejected = 0;
  const link = new EngineLink(
    "ws://engine.test",
    {
      onMessage: (raw, atMs) => messages.push({ raw, atMs }),
      onStatus: (status) => statuses.push(status),
      onBinaryRejected: () => {
        binaryRejected += 1;
      },
    },
    {
      factory: () => {
        const socket = new FakeSocket();
        sockets.push(socket);
        return socket;
      },
      now: timers.now,
      schedule: timers.schedule,
      cancel: timers.cancel,
      staleAfterMs: opts.staleAfterMs ?? 1000,
      backoffInitialMs: 250,
      backoffMaxMs: 2000,
    },
  );
  return {
    link,
    timers,
    sockets,
    statuses,
    messages,
    binaryRejected: () => binaryRejected,
  };
}

describe("EngineLink", () => {
  it("delivers inbound text lines with their receipt time", () => {
    const h = harness();
    h.link.connect();
    h.sockets[0].serverOpen();
    h.timers.advance(42);
    h.sockets[0].serverSend('{"type":"trigger","t_us":1,"seq":0}');
    expect(h.messages).toEqual([
      { raw: '{"type":"trigger","t_us":1,"seq":0}', atMs: 42 },
    ]);
  });

  it("refuses binary frames without surfacing them as messages", () => {
    const h = harness();
    h.link.connect();
    h.sockets[0].serverOpen();
    h.sockets[0].serverSend(new ArrayBuffer(8));
    expect(h.messages).toHaveLength(0);
    expect(h.binaryRejected()).toBe(1);
  });

  it("sends one JSON line per action and refuses to send while closed", () => {
    const h = harness();
    expect(h.link.sendAction({ cmd: "status" })).toBe(false);
    h.link.connect();
    expect(h.link.sendAction({ cmd: "status" })).toBe(false); // still connecting
    h.sockets[0].serverOpen();
    expect(h.link.sendAction({ cmd: "pause" })).toBe(true);
    expect(h.sockets[0].sent).toEqual(['{"cmd":"pause"}']);
  });

  it("marks the link stale after one silent second and recovers on traffic", () => {
    const h = harness();
    h.link.connect();
    h.sockets[0].serverOpen();
    h.sockets[0].serverSend("{}");
    expect(h.statuses).toEqual(["connecting", "open"]);
    h.timers.advance(999);
    expect(h.link.currentStatus()).toBe("open");
    h.timers.advance(1);
    expect(h.link.currentStatus()).toBe("stale");
    h.sockets[0].serverSend("{}");
    expect(h.link.currentStatus()).toBe("open");
  });

  it("reconnects with exponential backoff and resets it once open", () => {
    const h = harness();
    h.link.connect();
    h.sockets[0].serverOpen();
    expect(h.sockets).toHaveLength(1);

    h.sockets[0].serverClose();
    expect(h.link.currentStatus()).toBe("closed");
    h.timers.advance(249);
    expect(h.sockets).toHaveLength(1); // first retry waits 250 ms
    h.timers.advance(1);
    expect(h.sockets).toHaveLength(2);

    h.sockets[1].serverClose(); // never opened: next delay doubles
    h.timers.advance(499);
    expect(h.sockets).toHaveLength(2);
    h.timers.advance(1);
    expect(h.sockets).toHaveLength(3);

    h.sockets[2].serverClose();
    h.timers.advance(1000); // 250 -> 500 -> 1000
    expect(h.sockets).toHaveLength(4);

    h.sockets[3].serverOpen(); // success resets the ladder
    h.sockets[3].serverClose();
    h.timers.advance(250);
    expect(h.sockets).toHaveLength(5);
  });

  it("caps the backoff at its maximum", () => {
    const h = harness();
    h.link.connect();
    for (let i = 0; i < 6; i++) {
      h.sockets[h.sockets.length - 1].serverClose();
      h.timers.advance(2000); // >= max delay always reconnects
    }
    // 250, 500, 1000, 2000, 2000, 2000 — all within the 2000 ms cap.
    expect(h.sockets.length).toBe(7);
  });

  it("close() stops reconnection for good", () => {
    const h = harness();
    h.link.connect();
    h.sockets[0].serverOpen();
    h.link.close();
    expect(h.sockets[0].closed).toBe(true);
    h.timers.advance(60_000);
    expect(h.sockets).toHaveLength(1);
    expect(h.link.currentStatus()).toBe("closed");
  });

  it("ignores events from a superseded socket", () => {
    const h = harness();
    h.link.connect();
    const old = h.sockets[0];
    old.serverClose();
    h.timers.advance(250);
    expect(h.sockets).toHaveLength(2);
    h.sockets[1].serverOpen();
    old.serverSend("{}"); // late event from the dead socket
    expect(h.messages).toHaveLength(0);
    expect(h.link.currentStatus()).toBe("open");
  });
});
