/** Page wiring: DOM events in, frames out.  Logic lives in the other
 * modules; keep this file free of anything worth testing.
 */

import { EntryClient } from "./client.js";
import { parseConfig } from "./config.js";
import { FrameBody } from "./protocol.js";
import { renderFrame } from "./renderer.js";
import { TrainingTask } from "./training.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function start(): void {
  const cfg = parseConfig(location.search, location.host);
  const canvas = el<HTMLCanvasElement>("board");
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d context unavailable");
  const statusEl = el<HTMLElement>("status");
  const statsEl = el<HTMLElement>("stats");
  const promptEl = el<HTMLElement>("prompt");

  const training = cfg.prompt ? new TrainingTask(cfg.prompt) : null;
  let frame: FrameBody | null = null;
  let dirty = false;
  let ended = false;
  let scanMode = false;

  const refreshPrompt = () => {
    if (!training) return;
    promptEl.replaceChildren(
      ...training.charStates().map(({ ch, state }) => {
        const span = document.createElement("span");
        span.textContent = ch === " " ? "·" : ch;
        span.className = `p-${state}`;
        return span;
      }),
    );
    if (training.done) {
      promptEl.append(` ✓ done, ${training.errors} wrong`);
    }
  };

  const refreshStats = () => {
    const s = client.stats.summary();
    statsEl.textContent =
      `${s.chars} chars · ${s.commits} selections · ${s.undos} undos · ` +
      `${s.seconds.toFixed(1)} s · ${s.charsPerMin.toFixed(1)} chars/min`;
  };

  const client = new EntryClient(cfg, {
    onHello: (h) => {
      scanMode = h.layout === "scan";
      statusEl.textContent =
        `session ${h.session} · ${h.layout} · threshold ${h.threshold.toFixed(3)}` +
        (h.resumed ? " · resumed" : "");
      training?.update(h.text, h.alphabet.terminator);
      refreshPrompt();
      refreshStats();
    },
    onFrame: (f) => {
      frame = f;
      dirty = true;
    },
    onCommit: (b) => {
      training?.update(b.text);
      refreshPrompt();
      refreshStats();
    },
    onUndo: (b) => {
      training?.update(b.text);
      refreshPrompt();
      refreshStats();
    },
    onEnd: (b) => {
      ended = true;
      statusEl.textContent = `finished (${b.reason})`;
      refreshStats();
      client.close();
    },
    onServerError: (m) => {
      statusEl.textContent = `server error: ${m}`;
    },
    onGap: (expected, got) => {
      console.warn(`sequence gap: expected ${expected}, got ${got}`);
    },
    onClose: (code) => {
      statusEl.textContent = `disconnected (${code})`;
      if (!ended && code !== 1000) {
        statusEl.textContent += " · reconnecting";
        setTimeout(() => client.reconnect(), 1000);
      }
    },
  });

  const toUnit = (ev: PointerEvent): [number, number] => {
    const r = canvas.getBoundingClientRect();
    return [(ev.clientX - r.left) / r.width, (ev.clientY - r.top) / r.height];
  };
  canvas.addEventListener("pointermove", (ev) => {
    const [x, y] = toUnit(ev);
    client.sendCursor(x, y);
  });
  canvas.addEventListener("pointerdown", (ev) => {
    const [x, y] = toUnit(ev);
    client.sendPress(x, y, scanMode ? 0 : undefined);
  });
  window.addEventListener("keydown", (ev) => {
    if (ev.key === " " || ev.key === "Enter") {
      ev.preventDefault();
      client.sendPress(0, 0, scanMode ? 0 : undefined);
    }
  });

  const paint = () => {
    if (!ended) client.pump();
    if (dirty && frame) {
      const rect = canvas.getBoundingClientRect();
      const pw = Math.max(1, Math.round(rect.width));
      const ph = Math.max(1, Math.round(rect.height));
      if (canvas.width !== pw || canvas.height !== ph) {
        canvas.width = pw;
        canvas.height = ph;
      }
      renderFrame(ctx, canvas.width, canvas.height, frame, {
        badges: client.stats.undone.slice(-6),
      });
      dirty = false;
    }
    requestAnimationFrame(paint);
  };
  requestAnimationFrame(paint);

  statusEl.textContent = `connecting to ${cfg.url} ...`;
  client.connect();
}

start();
