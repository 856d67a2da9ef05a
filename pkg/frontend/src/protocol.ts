/** Message envelopes and body shapes spoken over the entry websocket.
 *
 * Server to client messages arrive as `{seq, kind, t_ms, body}` with a
 * gapless `seq`; client to server messages carry no sequence number.
 * See docs/protocol.md in the repository root for the full contract.
 */

export const WIRE_VERSION = 1;

/** Region prefix that marks the deletion target in a frame. */
export const UNDO_PREFIX = "\b";

export type RegionKind = "rect" | "arc" | "node";

export interface Region {
  prefix: string;
  label: string;
  depth: number;
  probability: number;
  kind: RegionKind;
  /** rect: [x, y, w, h]; arc: [angle0, angle1, rInner]; node: [cx, cy, r]. */
  geom: number[];
}

export interface FrameBody {
  tick: number;
  layout: string;
  regions: Region[];
  /** Selection marker position in the unit square; scroll frames only. */
  indicator: [number, number] | null;
  text: string;
  undo_width: number;
  done: boolean;
}

export interface HelloBody {
  version: number;
  session: string;
  resumed: boolean;
  layout: string;
  threshold: number;
  tick_rate: number;
  alphabet: { symbols: string[]; terminator: string };
  text: string;
  estimator: unknown;
}

export interface CommitBody {
  tick: number;
  symbol: string;
  text: string;
}

export interface UndoBody {
  tick: number;
  text: string;
}

export interface EndBody {
  reason: string;
  text: string;
}

export interface ErrorBody {
  message: string;
}

export type MessageKind = "hello" | "frame" | "commit" | "undo" | "end" | "error";

export interface WireMessage {
  seq: number;
  kind: MessageKind;
  t_ms: number;
  body: unknown;
}

/** Parse a raw websocket payload; null for anything off-schema. */
export function parseMessage(raw: string): WireMessage | null {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof doc !== "object" || doc === null) return null;
  const m = doc as Record<string, unknown>;
  if (typeof m.seq !== "number") return null;
  if (typeof m.kind !== "string") return null;
  if (typeof m.t_ms !== "number") return null;
  return m as unknown as WireMessage;
}

export interface HelloRequest {
  layout?: string;
  threshold?: number;
  session?: string;
  /** Copy-task text; tags the server-side session log as training. */
  prompt?: string;
}

/** First client message: negotiate layout, threshold and session id. */
export function helloEnvelope(req: HelloRequest): string {
  const body: Record<string, unknown> = {};
  if (req.layout !== undefined) body.layout = req.layout;
  if (req.threshold !== undefined) body.threshold = req.threshold;
  if (req.session !== undefined) body.session = req.session;
  if (req.prompt !== undefined) body.prompt = req.prompt;
  return JSON.stringify({ kind: "hello", body });
}

/** Input event envelope; `t` is in client seconds, rebased server-side. */
export function eventEnvelope(
  t: number,
  etype: "cursor" | "press",
  x: number,
  y: number,
  actionId?: number | string,
): string {
  const body: Record<string, unknown> = { t, etype, x, y };
  if (actionId !== undefined) body.action_id = actionId;
  return JSON.stringify({ kind: "event", body });
}
