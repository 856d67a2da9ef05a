"""WebSocket session service.

One socket per entry session.  The client opens with a hello naming the
layout, engine, and commit threshold; the server answers with the
negotiated settings and then streams frames at the tick rate.  Every
message carries a gapless per-connection sequence number, assigned at
send time: frames may be dropped when the socket is backed up, commits
and ends never are.
"""

from __future__ import annotations

import asyncio
import json
import logging
import time
import uuid
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .actions import ActionEvent, EventQueue
from .config import EngineConfig, ScanConfig
from .engine import Engine
from .langmodel import NGramModel
from .layouts import LayoutFrame
from .session_log import SessionWriter, estimator_to_json

log = logging.getLogger(__name__)

WIRE_VERSION = 1
VALID_LAYOUTS = ("linear", "circular", "area", "tree", "scan")


def frame_to_wire(frame: LayoutFrame, text: str, undo_width: float, done: bool) -> dict:
    return {
        "tick": frame.tick,
        "layout": frame.kind,
        "regions": [
            {
                "prefix": r.prefix,
                "label": r.label,
                "depth": r.depth,
                "probability": r.probability,
                "kind": r.kind,
                "geom": [float(g) for g in r.geom],
            }
            for r in frame.regions
        ],
        "indicator": list(frame.indicator) if frame.indicator else None,
        "text": text,
        "undo_width": float(undo_width),
        "done": done,
    }


class Connection:
    """Per-socket state: engine, queues, sequence numbers, log."""

    def __init__(self, ws: WebSocket, engine: Engine,
                 writer: Optional[SessionWriter], session: str) -> None:
        self.ws = ws
        self.engine = engine
        self.writer = writer
        self.session = session
        self.queue = EventQueue()
        self.seq = 0
        self.pending_frame: Optional[dict] = None
        self.pending_other: List[dict] = []
        self.outbox = asyncio.Condition()
        self.dropped_frames = 0
        self.closed = False
        self.clock_offset: Optional[float] = None
        self.t0 = time.monotonic()

    def now_ms(self) -> float:
        return (time.monotonic() - self.t0) * 1000.0

    async def post(self, kind: str, body: dict, *, droppable: bool = False) -> None:
        msg = {"kind": kind, "t_ms": round(self.now_ms(), 3), "body": body}
        async with self.outbox:
            if droppable:
                if self.pending_frame is not None:
                    self.dropped_frames += 1
                self.pending_frame = msg
            else:
                self.pending_other.append(msg)
            self.outbox.notify()

    async def sender(self) -> None:
        """Assign sequence numbers at send time so the stream stays gapless."""
        try:
            while True:
                async with self.outbox:
                    while not self.pending_other and self.pending_frame is None:
                        if self.closed:
                            return
                        await self.outbox.wait()
                    if self.pending_other:
                        msg = self.pending_other.pop(0)
                    else:
                        msg, self.pending_frame = self.pending_frame, None
                msg["seq"] = self.seq
                self.seq += 1
                await self.ws.send_text(json.dumps(msg))
        except (WebSocketDisconnect, RuntimeError):
            pass

    def rebase(self, t_client: float) -> float:
        """Map a client timestamp onto the connection clock (seconds)."""
        now = (time.monotonic() - self.t0)
        if self.clock_offset is None:
            self.clock_offset = now - t_client
        return t_client + self.clock_offset


def build_app(
    model: NGramModel,
    *,
    config: Optional[EngineConfig] = None,
    scan: Optional[ScanConfig] = None,
    estimator=None,
    log_dir=None,
) -> FastAPI:
    app = FastAPI(title="adaptive entry service")
    base_config = (config or EngineConfig()).validate()
    base_scan = scan or ScanConfig()
    live: Dict[str, Engine] = {}
    app.state.live_sessions = live

    @app.get("/health")
    async def health() -> dict:
        return {"ok": True, "sessions": len(live)}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        try:
            raw = await ws.receive_text()
            hello = json.loads(raw)
        except (WebSocketDisconnect, json.JSONDecodeError):
            await ws.close(code=1002)
            return
        if hello.get("kind") != "hello":
            await ws.send_text(json.dumps({
                "seq": 0, "kind": "error", "t_ms": 0.0,
                "body": {"message": "first message must be hello"},
            }))
            await ws.close(code=1002)
            return

        body = hello.get("body") or {}
        layout = body.get("layout", base_config.layout)
        threshold = float(body.get("threshold", base_config.commit_threshold))
        threshold = float(np.clip(threshold, 0.51, 0.999))
        session = body.get("session") or uuid.uuid4().hex[:12]
        prompt = body.get("prompt")
        if layout not in VALID_LAYOUTS:
            await ws.send_text(json.dumps({
                "seq": 0, "kind": "error", "t_ms": 0.0,
                "body": {"message": f"unknown layout {layout!r}"},
            }))
            await ws.close(code=1008)
            return

        cfg = replace(base_config, layout=layout, commit_threshold=threshold)
        engine = live.get(session)
        resumed = engine is not None and not engine.done
        if not resumed:
            engine = Engine(model, cfg, estimator=estimator, scan=base_scan)
            live[session] = engine

        writer = None
        if log_dir is not None and not resumed:
            path = Path(log_dir) / f"{session}.jsonl"
            cfg_doc = dict(cfg.__dict__)
            cfg_doc["scan"] = dict(base_scan.__dict__)
            extra = None
            if prompt:
                extra = {"training": True, "prompt": str(prompt)}
            writer = SessionWriter(
                path, session=session, engine="rtiac", layout=layout,
                model=model, config=cfg_doc, estimator=estimator,
                extra=extra,
            )

        conn = Connection(ws, engine, writer, session)
        await conn.post("hello", {
            "version": WIRE_VERSION,
            "session": session,
            "resumed": resumed,
            "layout": engine.config.layout,
            "threshold": engine.config.commit_threshold,
            "tick_rate": engine.config.tick_rate,
            "alphabet": {
                "symbols": list(model.alphabet.symbols),
                "terminator": model.alphabet.terminator,
            },
            "text": engine.text,
            "estimator": estimator_to_json(estimator),
        })

        send_task = asyncio.create_task(conn.sender())
        tick_task = asyncio.create_task(_tick_loop(conn))
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await conn.post("error", {"message": "unparsable message"})
                    continue
                if msg.get("kind") != "event":
                    await conn.post("error",
                                    {"message": f"unexpected kind {msg.get('kind')!r}"})
                    continue
                b = msg.get("body") or {}
                try:
                    ev = ActionEvent(
                        t=conn.rebase(float(b["t"])),
                        kind=b.get("etype", "cursor"),
                        x=float(b.get("x", 0.0)),
                        y=float(b.get("y", 0.0)),
                        action_id=b.get("action_id"),
                    )
                except (KeyError, ValueError) as exc:
                    await conn.post("error", {"message": f"bad event: {exc}"})
                    continue
                conn.queue.push(ev)
        except WebSocketDisconnect:
            pass
        finally:
            tick_task.cancel()
            async with conn.outbox:
                conn.closed = True
                conn.outbox.notify()
            for task in (tick_task, send_task):
                try:
                    await task
                except asyncio.CancelledError:
                    pass
            if writer is not None:
                if engine.done:
                    writer.write_end("finished", {"text": engine.text})
                else:
                    writer.write_end("disconnect", {"text": engine.text})
                writer.close()
            if engine.done:
                live.pop(session, None)

    return app


async def _tick_loop(conn: Connection) -> None:
    engine = conn.engine
    dt = engine.config.dt
    loop = asyncio.get_running_loop()
    next_t = loop.time() + dt
    while not engine.done:
        await asyncio.sleep(max(next_t - loop.time(), 0.0))
        next_t += dt
        events = conn.queue.drain()
        # clamp ahead-of-tick timestamps from client jitter
        now = engine.now + dt
        events = [ev if ev.t <= now else
                  ActionEvent(now, ev.kind, ev.x, ev.y, ev.action_id)
                  for ev in events]
        events.sort(key=lambda e: e.t)
        if conn.writer is not None:
            conn.writer.write_events(engine.tick_index + 1, events)
        result = engine.tick(events)
        if conn.writer is not None:
            conn.writer.write_tick(engine, result)
        for symbol in result.committed:
            if symbol == "\b":
                await conn.post("undo", {"tick": engine.tick_index,
                                         "text": engine.text})
            else:
                await conn.post("commit", {"tick": engine.tick_index,
                                           "symbol": symbol,
                                           "text": engine.text})
        await conn.post("frame",
                        frame_to_wire(result.frame, engine.text,
                                      engine.belief.undo_width, engine.done),
                        droppable=True)
    await conn.post("end", {"reason": "finished", "text": engine.text})
