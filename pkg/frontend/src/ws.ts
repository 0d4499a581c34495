/**
 * Websocket link to the session engine: one socket, JSON text lines both
 * directions, automatic reconnect with exponential backoff, and a staleness
 * timer that flags a silent link within one second.
 *
 * The socket constructor and timer functions are injectable so the whole
 * module is testable without a browser or a network.
 */

import { ControlAction, encodeAction } from "./protocol.js";

/** Structural subset of the DOM WebSocket used by the console. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export type LinkStatus = "connecting" | "open" | "stale" | "closed";

export interface LinkHandlers {
  /** Called with each inbound text line and its receipt time (ms). */
  onMessage(raw: string, atMs: number): void;
  onStatus(status: LinkStatus): void;
  /** Called for inbound frames that are not text (refused, never parsed). */
  onBinaryRejected?(): void;
}

export interface LinkOptions {
  factory?: SocketFactory;
  now?: () => number;
  schedule?: (fn: () => void, ms: number) => unknown;
  cancel?: (handle: unknown) => void;
  staleAfterMs?: number;
  backoffInitialMs?: number;
  backoffMaxMs?: number;
}

const defaultFactory: SocketFactory = (url) =>
  new WebSocket(url) as unknown as SocketLike;

export class EngineLink {
  private readonly url: string;
  private readonly handlers: LinkHandlers;
  private readonly factory: SocketFactory;
  private readonly now: () => number;
  private readonly schedule: (fn: () => void, ms: number) => unknown;
  private readonly cancel: (handle: unknown) => void;
  private readonly staleAfterMs: number;
  private readonly backoffInitialMs: number;
  private readonly backoffMaxMs: number;

  private socket: SocketLike | null = null;
  private status: LinkStatus = "closed";
  private backoffMs: number;
  private staleHandle: unknown = null;
  private reconnectHandle: unknown = null;
  private stopped = false;

  constructor(url: string, handlers: LinkHandlers, options: LinkOptions = {}) {
    this.url = url;
    this.handlers = handlers;
    this.factory = options.factory ?? defaultFactory;
    this.now = options.now ?? (() => Date.now());
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.cancel = options.cancel ?? ((h) => clearTimeout(h as number));
    this.staleAfterMs = options.staleAfterMs ?? 1000;
    this.backoffInitialMs = options.backoffInitialMs ?? 250;
    this.backoffMaxMs = options.backoffMaxMs ?? 5000;
    this.backoffMs = this.backoffInitialMs;
  }

  currentStatus(): LinkStatus {
    return this.status;
  }

  connect(): void {
    this.stopped = false;
    this.openSocket();
  }

  /** Close and stop reconnecting. */
  close(): void {
    this.stopped = true;
    this.clearStaleTimer();
    if (this.reconnectHandle !== null) {
      this.cancel(this.reconnectHandle);
      this.reconnectHandle = null;
    }
    if (this.socket !== null) {
      const s = this.socket;
      this.socket = null;
      s.onclose = null;
      s.close();
    }
    this.setStatus("closed");
  }

  /**
   * Send one control action as one JSON text line. Returns false (and sends
   * nothing) when the link is not open.
   */
  sendAction(action: ControlAction): boolean {
    if (this.socket === null || (this.status !== "open" && this.status !== "stale")) {
      return false;
    }
    this.socket.send(encodeAction(action));
    return true;
  }

  private openSocket(): void {
    this.setStatus("connecting");
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      if (this.socket !== socket) return;
      this.backoffMs = this.backoffInitialMs;
      this.setStatus("open");
      this.armStaleTimer();
    };
    socket.onmessage = (ev) => {
      if (this.socket !== socket) return;
      if (typeof ev.data !== "string") {
        // Binary frames are outside the contract; the engine refuses them
        // too. Never parsed, never displayed.
        this.handlers.onBinaryRejected?.();
        return;
      }
      if (this.status === "stale") this.setStatus("open");
      this.armStaleTimer();
      this.handlers.onMessage(ev.data, this.now());
    };
    socket.onclose = () => {
      if (this.socket !== socket) return;
      this.socket = null;
      this.clearStaleTimer();
      this.setStatus("closed");
      this.scheduleReconnect();
    };
    socket.onerror = () => {
      /* The paired close event drives reconnection. */
    };
  }

  private scheduleReconnect(): void {
    if (this.stopped || this.reconnectHandle !== null) return;
    const delay = this.backoffMs;
    this.backoffMs = Math.min(this.backoffMs * 2, this.backoffMaxMs);
    this.reconnectHandle = this.schedule(() => {
      this.reconnectHandle = null;
      if (!this.stopped) this.openSocket();
    }, delay);
  }

  private armStaleTimer(): void {
    this.clearStaleTimer();
    this.staleHandle = this.schedule(() => {
      this.staleHandle = null;
      if (this.status === "open") this.setStatus("stale");
    }, this.staleAfterMs);
  }

  private clearStaleTimer(): void {
    if (this.staleHandle !== null) {
      this.cancel(this.staleHandle);
      this.staleHandle = null;
    }
  }

  private setStatus(status: LinkStatus): void {
    if (this.status === status) return;
    this.status = status;
    this.handlers.onStatus(status);
  }
}
