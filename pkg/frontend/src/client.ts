/** Websocket client for the live entry service.
 *
 * The socket and the clock are injected so the protocol logic runs under
 * test without a browser.  Incoming messages are dispatched to hooks;
 * cursor samples are rate limited on the client clock, presses never are.
 */

import {
  CommitBody,
  EndBody,
  ErrorBody,
  FrameBody,
  HelloBody,
  UndoBody,
  eventEnvelope,
  helloEnvelope,
  parseMessage,
} from "./protocol.js";
import { SessionStats } from "./stats.js";

export interface SocketLike {
  send(data: string): void;
  close(code?: number, reason?: string): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: ((ev: { code: number }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientHooks {
  onHello?(h: HelloBody): void;
  onFrame?(f: FrameBody): void;
  onCommit?(b: CommitBody): void;
  onUndo?(b: UndoBody): void;
  onEnd?(b: EndBody): void;
  onServerError?(message: string): void;
  /** Sequence discontinuity: a guaranteed message went missing. */
  onGap?(expected: number, got: number): void;
  onClose?(code: number): void;
}

export interface ClientOptions {
  url: string;
  layout?: string;
  threshold?: number;
  session?: string;
  prompt?: string;
}

/** Upper bound on cursor sample rate; surplus samples are dropped. */
export const CURSOR_HZ = 60;

/** Keep-alive resample rate until hello reports the real tick rate. */
const DEFAULT_TICK_RATE = 30;

function browserSocket(url: string): SocketLike {
  return new WebSocket(url) as unknown as SocketLike;
}

export class EntryClient {
  readonly stats = new SessionStats();
  hello: HelloBody | null = null;
  private sock: SocketLike | null = null;
  private nextSeq = 0;
  private lastCursorT = -Infinity;
  private lastPos: [number, number] | null = null;
  private tickRate = DEFAULT_TICK_RATE;
  private sessionId?: string;

  constructor(
    private readonly opts: ClientOptions,
    private readonly hooks: ClientHooks = {},
    private readonly makeSocket: SocketFactory = browserSocket,
    private readonly now: () => number = () => performance.now() / 1000,
  ) {
    this.sessionId = opts.session;
  }

  connect(): void {
    const sock = this.makeSocket(this.opts.url);
    this.sock = sock;
    sock.onopen = () => {
      sock.send(helloEnvelope({
        layout: this.opts.layout,
        threshold: this.opts.threshold,
        session: this.sessionId,
        prompt: this.opts.prompt,
      }));
    };
    sock.onmessage = (ev) => this.handleRaw(ev.data);
    sock.onclose = (ev) => this.hooks.onClose?.(ev.code);
    sock.onerror = () => undefined;
  }

  /** Open a fresh connection resuming the known session id. */
  reconnect(): void {
    this.nextSeq = 0;
    this.lastCursorT = -Infinity;
    this.connect();
  }

  close(): void {
    this.sock?.close(1000);
  }

  sendCursor(x: number, y: number): void {
    this.lastPos = [x, y];
    const t = this.now();
    if (t - this.lastCursorT < 1 / CURSOR_HZ) return;
    this.lastCursorT = t;
    this.sock?.send(eventEnvelope(t, "cursor", x, y));
  }

  /** Resend the held cursor position at the engine tick rate.
   *
   * Call once per animation frame: a stationary pointer then still
   * produces one sample per tick, keeping the feature window fed.
   */
  pump(): void {
    if (!this.lastPos) return;
    const t = this.now();
    if (t - this.lastCursorT < 1 / this.tickRate) return;
    this.lastCursorT = t;
    this.sock?.send(eventEnvelope(t, "cursor", this.lastPos[0], this.lastPos[1]));
  }

  sendPress(x = 0, y = 0, actionId?: number | string): void {
    this.sock?.send(eventEnvelope(this.now(), "press", x, y, actionId));
  }

  /** Parse and dispatch one payload; off-schema input is dropped. */
  handleRaw(raw: string): void {
    const msg = parseMessage(raw);
    if (msg === null) return;
    if (msg.seq !== this.nextSeq) this.hooks.onGap?.(this.nextSeq, msg.seq);
    this.nextSeq = msg.seq + 1;
    switch (msg.kind) {
      case "hello": {
        const h = msg.body as HelloBody;
        this.hello = h;
        this.sessionId = h.session;
        this.tickRate = h.tick_rate;
        this.stats.start(msg.t_ms, h.alphabet.terminator, h.text);
        this.hooks.onHello?.(h);
        break;
      }
      case "frame":
        this.hooks.onFrame?.(msg.body as FrameBody);
        break;
      case "commit": {
        const b = msg.body as CommitBody;
        this.stats.onCommit(msg.t_ms, b.text);
        this.hooks.onCommit?.(b);
        break;
      }
      case "undo": {
        const b = msg.body as UndoBody;
        this.stats.onUndo(msg.t_ms, b.text);
        this.hooks.onUndo?.(b);
        break;
      }
      case "end":
        this.stats.finish(msg.t_ms);
        this.hooks.onEnd?.(msg.body as EndBody);
        break;
      case "error":
        this.hooks.onServerError?.((msg.body as ErrorBody).message);
        break;
    }
  }
}
