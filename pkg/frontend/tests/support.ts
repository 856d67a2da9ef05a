/** Shared test doubles: a draw-call recording surface and a scriptable
 * socket.  No DOM, no jsdom; everything runs under plain node.
 */

import { SocketLike } from "../src/client.js";
import { FrameBody, Region } from "../src/protocol.js";
import { Surface } from "../src/renderer.js";

export interface DrawOp {
  op: string;
  args: unknown[];
  fillStyle: string;
  alpha: number;
}

export class MockSurface implements Surface {
  fillStyle: string | CanvasGradient | CanvasPattern = "#000";
  strokeStyle: string | CanvasGradient | CanvasPattern = "#000";
  globalAlpha = 1;
  font = "";
  textAlign = "left";
  textBaseline = "alphabetic";
  lineWidth = 1;
  ops: DrawOp[] = [];

  private log(op: string, ...args: unknown[]): void {
    this.ops.push({
      op,
      args,
      fillStyle: String(this.fillStyle),
      alpha: this.globalAlpha,
    });
  }

  clearRect(x: number, y: number, w: number, h: number): void {
    this.log("clearRect", x, y, w, h);
  }
  fillRect(x: number, y: number, w: number, h: number): void {
    this.log("fillRect", x, y, w, h);
  }
  strokeRect(x: number, y: number, w: number, h: number): void {
    this.log("strokeRect", x, y, w, h);
  }
  beginPath(): void {
    this.log("beginPath");
  }
  moveTo(x: number, y: number): void {
    this.log("moveTo", x, y);
  }
  lineTo(x: number, y: number): void {
    this.log("lineTo", x, y);
  }
  arc(x: number, y: number, r: number, a0: number, a1: number, ccw?: boolean): void {
    this.log("arc", x, y, r, a0, a1, ccw ?? false);
  }
  closePath(): void {
    this.log("closePath");
  }
  fill(): void {
    this.log("fill");
  }
  stroke(): void {
    this.log("stroke");
  }
  fillText(text: string, x: number, y: number): void {
    this.log("fillText", text, x, y);
  }

  named(op: string): DrawOp[] {
    return this.ops.filter((o) => o.op === op);
  }
}

export class FakeSocket implements SocketLike {
  sent: string[] = [];
  closed: number[] = [];
  onopen: (() => void) | null = null;
  onmessage: ((ev: { data: string }) => void) | null = null;
  onclose: ((ev: { code: number }) => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;

  constructor(readonly url: string) {}

  send(data: string): void {
    this.sent.push(data);
  }

  close(code = 1000): void {
    this.closed.push(code);
  }

  open(): void {
    this.onopen?.();
  }

  deliver(msg: unknown): void {
    this.onmessage?.({ data: typeof msg === "string" ? msg : JSON.stringify(msg) });
  }

  sentJson(): unknown[] {
    return this.sent.map((s) => JSON.parse(s));
  }
}

export function region(partial: Partial<Region> & { geom: number[] }): Region {
  return {
    prefix: "a",
    label: "a",
    depth: 1,
    probability: 0.5,
    kind: "rect",
    ...partial,
  };
}

export function frame(partial: Partial<FrameBody> = {}): FrameBody {
  return {
    tick: 1,
    layout: "linear",
    regions: [],
    indicator: null,
    text: "",
    undo_width: 0.02,
    done: false,
    ...partial,
  };
}
