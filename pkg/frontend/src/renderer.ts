/** Canvas painting for layout frames.
 *
 * Pure functions against a minimal 2D surface so tests can record the
 * draw calls instead of rasterising.  Geometry arrives in unit-square
 * coordinates (y down) and is scaled to the pixel viewport here; arcs
 * live on the centred disc of radius min(w, h) / 2.
 */

import { FrameBody, Region, UNDO_PREFIX } from "./protocol.js";

export interface Surface {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  font: string;
  textAlign: string;
  textBaseline: string;
  lineWidth: number;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number, ccw?: boolean): void;
  closePath(): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export const UNDO_FILL = "#9aa0a6";
export const BADGE_FILL = "#3c4043";
export const INDICATOR_FILL = "#111827";
const BACKGROUND = "#fafafa";
const EDGE = "#ffffff";
const LABEL_FILL = "#1f2430";
const STRIP_H = 26;

/** Characters deleted by selecting this region (leading undo marks). */
export function deleteDepth(region: Region): number {
  let n = 0;
  while (n < region.prefix.length && region.prefix[n] === UNDO_PREFIX) n++;
  return n;
}

/** Deterministic fill colour per region; deletion regions are grey. */
export function regionFill(region: Region): string {
  if (deleteDepth(region) > 0) return UNDO_FILL;
  let h = 2166136261;
  for (let i = 0; i < region.prefix.length; i++) {
    h = ((h ^ region.prefix.charCodeAt(i)) * 16777619) >>> 0;
  }
  return `hsl(${h % 360}, 62%, 62%)`;
}

function regionAlpha(region: Region): number {
  return region.depth <= 1 ? 0.9 : 0.5;
}

/** Badge with the number of characters a deletion region removes. */
function drawBadge(ctx: Surface, region: Region, x: number, y: number): void {
  const n = deleteDepth(region);
  if (n === 0) return;
  ctx.fillStyle = BADGE_FILL;
  ctx.fillText(String(n), x + 9, y - 9);
}

function drawRect(ctx: Surface, w: number, h: number, region: Region): void {
  const [x, y, rw, rh] = region.geom;
  const px = x * w;
  const py = y * h;
  const pw = rw * w;
  const ph = rh * h;
  ctx.fillRect(px, py, pw, ph);
  ctx.globalAlpha = 1;
  ctx.strokeStyle = EDGE;
  ctx.strokeRect(px, py, pw, ph);
  if (pw >= 18 && ph >= 14) {
    ctx.fillStyle = LABEL_FILL;
    ctx.fillText(region.label, px + pw / 2, py + ph / 2);
    drawBadge(ctx, region, px + pw / 2, py + ph / 2);
  }
}

function drawArc(ctx: Surface, w: number, h: number, region: Region): void {
  const [a0, a1, rIn] = region.geom;
  const cx = w / 2;
  const cy = h / 2;
  const R = Math.min(w, h) / 2;
  ctx.beginPath();
  ctx.arc(cx, cy, R, a0, a1);
  ctx.arc(cx, cy, rIn * R, a1, a0, true);
  ctx.closePath();
  ctx.fill();
  ctx.globalAlpha = 1;
  ctx.strokeStyle = EDGE;
  ctx.stroke();
  if (a1 - a0 >= 0.18) {
    const mid = (a0 + a1) / 2;
    const rm = ((rIn + 1) / 2) * R;
    const lx = cx + Math.cos(mid) * rm;
    const ly = cy + Math.sin(mid) * rm;
    ctx.fillStyle = LABEL_FILL;
    ctx.fillText(region.label, lx, ly);
    drawBadge(ctx, region, lx, ly);
  }
}

function drawNode(ctx: Surface, w: number, h: number, region: Region): void {
  const [cx, cy, r] = region.geom;
  const scale = Math.min(w, h);
  ctx.beginPath();
  ctx.arc(cx * w, cy * h, r * scale, 0, 2 * Math.PI);
  ctx.closePath();
  ctx.fill();
  ctx.globalAlpha = 1;
  ctx.strokeStyle = EDGE;
  ctx.stroke();
  ctx.fillStyle = LABEL_FILL;
  ctx.fillText(region.label, cx * w, cy * h);
  drawBadge(ctx, region, cx * w, cy * h);
}

function drawIndicator(ctx: Surface, w: number, h: number, pos: [number, number]): void {
  const px = Math.min(pos[0], 1) * w;
  const py = pos[1] * h;
  ctx.globalAlpha = 1;
  ctx.fillStyle = INDICATOR_FILL;
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.lineTo(px - 12, py - 7);
  ctx.lineTo(px - 12, py + 7);
  ctx.closePath();
  ctx.fill();
}

function displayText(text: string): string {
  return text.replace(/\n/g, "⏎");
}

function drawStrip(ctx: Surface, w: number, text: string, badges: string[]): void {
  ctx.globalAlpha = 0.92;
  ctx.fillStyle = "#ffffff";
  ctx.fillRect(0, 0, w, STRIP_H);
  ctx.globalAlpha = 1;
  ctx.textAlign = "left";
  const shown = displayText(text);
  ctx.fillStyle = LABEL_FILL;
  ctx.fillText(shown, 8, STRIP_H / 2);
  // crude fixed advance keeps the strip measureText-free
  let x = 8 + shown.length * 10 + 14;
  ctx.fillStyle = UNDO_FILL;
  for (const ch of badges) {
    ctx.fillText(displayText(ch), x, STRIP_H / 2);
    x += 12;
  }
  ctx.textAlign = "center";
}

export interface RenderExtras {
  /** Recently undone symbols, shown greyed next to the text. */
  badges?: string[];
}

/** Paint one frame: regions by depth, indicator, text strip, done veil. */
export function renderFrame(
  ctx: Surface,
  w: number,
  h: number,
  frame: FrameBody,
  extras: RenderExtras = {},
): void {
  ctx.clearRect(0, 0, w, h);
  ctx.globalAlpha = 1;
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, w, h);
  ctx.font = "14px system-ui, sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.lineWidth = 1;

  const ordered = [...frame.regions].sort((a, b) => a.depth - b.depth);
  for (const region of ordered) {
    ctx.globalAlpha = regionAlpha(region);
    ctx.fillStyle = regionFill(region);
    if (region.kind === "rect") drawRect(ctx, w, h, region);
    else if (region.kind === "arc") drawArc(ctx, w, h, region);
    else if (region.kind === "node") drawNode(ctx, w, h, region);
    else console.warn(`skipping region with unknown geometry ${String(region.kind)}`);
  }

  if (frame.indicator) drawIndicator(ctx, w, h, frame.indicator);
  drawStrip(ctx, w, frame.text, extras.badges ?? []);

  if (frame.done) {
    ctx.globalAlpha = 0.55;
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, w, h);
    ctx.globalAlpha = 1;
    ctx.fillStyle = LABEL_FILL;
    ctx.font = "24px system-ui, sans-serif";
    ctx.fillText("done", w / 2, h / 2);
  }
}
