"""Session logs: JSONL capture, reading, and deterministic replay.

Each log line is a self-describing record.  The first line inlines the
model, estimator, and config so a log can be replayed with no other
files on hand.  Events carry the tick at which the engine consumed
them, which makes replay exact: feeding the same events at the same
ticks through a fresh engine reproduces every commit, and per-tick
first-generation masses agree to well under 1e-9.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, List, Optional

import numpy as np

from .actions import ActionEvent
from .config import EngineConfig, ScanConfig
from .engine import Engine, TickResult
from .langmodel import NGramModel

log = logging.getLogger(__name__)

LOG_VERSION = 1


@dataclass(frozen=True)
class IdealEstimator:
    """Velocity-corrected window estimate with a fixed variance.

    The steady state a trained pointer model reaches for an unbiased
    user: intended point = window mean extrapolated half a window
    forward, variance = the residual variance of that estimate.
    """

    variance: float
    lead: float = 0.25  # seconds of velocity extrapolation

    def predict(self, features):
        center = features.mean_pos + features.mean_vel * self.lead
        # extrapolation across an aim jump can leave the display entirely
        return np.clip(center, 0.0, 1.0), self.variance

    def to_json(self) -> dict:
        return {"type": "ideal", "variance": self.variance, "lead": self.lead}


def estimator_to_json(estimator) -> Optional[dict]:
    if estimator is None:
        return None
    return estimator.to_json()


def estimator_from_json(doc: Optional[dict]):
    if doc is None:
        return None
    if doc.get("type") == "ideal":
        return IdealEstimator(variance=doc["variance"], lead=doc.get("lead", 0.25))
    from .learner import ParametricEstimator

    return ParametricEstimator.from_json(doc)


class SessionWriter:
    """Streams one session to a JSONL file."""

    def __init__(
        self,
        path,
        *,
        session: str,
        engine: str,
        layout: str,
        model: NGramModel,
        config: dict,
        seed: Optional[int] = None,
        estimator=None,
        extra: Optional[dict] = None,
    ) -> None:
        self.path = Path(path)
        self._fh: IO[str] = open(self.path, "w")
        meta = {
            "kind": "meta",
            "version": LOG_VERSION,
            "session": session,
            "engine": engine,
            "layout": layout,
            "config": config,
            "model": model.to_json(),
            "estimator": estimator_to_json(estimator),
            "seed": seed,
        }
        for key, value in (extra or {}).items():
            meta.setdefault(key, value)
        self._write(meta)

    def _write(self, doc: dict) -> None:
        self._fh.write(json.dumps(doc) + "\n")

    def write_events(self, tick: int, events: Iterable[ActionEvent]) -> None:
        for ev in events:
            self._write({
                "kind": "event", "tick": tick, "t": ev.t, "etype": ev.kind,
                "x": ev.x, "y": ev.y, "action_id": ev.action_id,
            })

    def write_tick(self, engine: Engine, result: TickResult) -> None:
        knots_x, knots_y = engine.belief.cdf_knots()
        kernel = None
        if result.kernel is not None:
            kernel = {
                "center": [float(c) for c in np.atleast_1d(result.kernel.center)],
                "variance": float(result.kernel.variance),
                "metric": result.kernel.metric,
            }
        feats = result.features
        self._write({
            "kind": "tick",
            "tick": engine.tick_index,
            "t_ms": round(engine.now * 1000.0, 3),
            "knots_x": [float(v) for v in knots_x],
            "knots_y": [float(v) for v in knots_y],
            "gen1": {k: float(v) for k, v in
                     engine.belief.first_generation_masses().items()},
            "undo_width": float(engine.belief.undo_width),
            "features": None if feats is None else
                        [float(v) for v in feats.as_vector()],
            "kernel": kernel,
        })
        for symbol in result.committed:
            self._write({
                "kind": "commit", "tick": engine.tick_index, "symbol": symbol,
                "prefix_after": engine.text,
            })

    def write_baseline_tick(self, tick: int, t_ms: float, view, cursor,
                            committed: List[str], text: str) -> None:
        self._write({
            "kind": "tick", "tick": tick, "t_ms": round(t_ms, 3),
            "view_lo": view.lo, "view_hi": view.hi,
            "cursor": [float(cursor[0]), float(cursor[1])],
        })
        for symbol in committed:
            self._write({"kind": "commit", "tick": tick, "symbol": symbol,
                         "prefix_after": text})

    def write_end(self, reason: str, metrics: Optional[dict] = None) -> None:
        self._write({"kind": "end", "reason": reason, "metrics": metrics or {}})

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "SessionWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass
class SessionLog:
    """Parsed session log; tolerant of truncation after a crash."""

    meta: dict
    ticks: List[dict] = field(default_factory=list)
    events: List[dict] = field(default_factory=list)
    commits: List[dict] = field(default_factory=list)
    end: Optional[dict] = None
    truncated: bool = False

    @property
    def name(self) -> str:
        return self.meta.get("session", "?")

    @property
    def complete(self) -> bool:
        return self.end is not None and not self.truncated

    def ticks_between(self, after: int, upto: int) -> List[dict]:
        """Tick records with after < tick <= upto."""
        return [t for t in self.ticks if after < t["tick"] <= upto]

    def events_at(self, tick: int) -> List[ActionEvent]:
        return [
            ActionEvent(t=e["t"], kind=e["etype"], x=e["x"], y=e["y"],
                        action_id=e.get("action_id"))
            for e in self.events if e["tick"] == tick
        ]

    @property
    def text(self) -> str:
        return self.commits[-1]["prefix_after"] if self.commits else ""


def read_session(path) -> SessionLog:
    """Parse a JSONL session log; a torn final line marks it truncated."""
    path = Path(path)
    meta: Optional[dict] = None
    out: Optional[SessionLog] = None
    truncated = False
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.endswith("\n"):
                truncated = True
                log.warning("%s: line %d torn mid-write; log truncated there",
                            path.name, lineno)
                break
            try:
                doc = json.loads(line)
            except json.JSONDecodeError:
                truncated = True
                log.warning("%s: line %d unparsable; log truncated there",
                            path.name, lineno)
                break
            kind = doc.get("kind")
            if kind == "meta":
                meta = doc
                out = SessionLog(meta=doc)
            elif out is None:
                raise ValueError(f"{path}: first record must be meta")
            elif kind == "tick":
                out.ticks.append(doc)
            elif kind == "event":
                out.events.append(doc)
            elif kind == "commit":
                out.commits.append(doc)
            elif kind == "end":
                out.end = doc
    if out is None:
        raise ValueError(f"{path}: empty log")
    out.truncated = truncated or out.end is None
    return out


@dataclass(frozen=True)
class ReplayReport:
    commits_match: bool
    max_mass_deviation: float
    ticks_checked: int
    text: str
    partial: bool = False

    @property
    def ok(self) -> bool:
        return self.commits_match and self.max_mass_deviation < 1e-9


def replay(log_in: SessionLog) -> ReplayReport:
    """Re-run a logged adaptive session and diff it against the record.

    Commits must match exactly; first-generation masses are compared per
    tick.  A truncated log replays as far as it goes and reports
    ``partial=True``.
    """
    meta = log_in.meta
    if meta.get("engine") != "rtiac":
        raise ValueError(f"cannot replay engine {meta.get('engine')!r}")
    model = NGramModel.from_json(meta["model"])
    cfg_doc = dict(meta.get("config") or {})
    scan_doc = cfg_doc.pop("scan", None)
    engine = Engine(
        model,
        EngineConfig(**cfg_doc),
        estimator=estimator_from_json(meta.get("estimator")),
        scan=ScanConfig(**scan_doc) if scan_doc else None,
    )

    recorded_commits = [(c["tick"], c["symbol"]) for c in log_in.commits]
    seen_commits: List[tuple] = []
    max_dev = 0.0
    checked = 0
    for rec in log_in.ticks:
        if engine.done:
            break
        result = engine.tick(log_in.events_at(rec["tick"]))
        for symbol in result.committed:
            seen_commits.append((engine.tick_index, symbol))
        got = engine.belief.first_generation_masses()
        want = rec.get("gen1")
        if want is not None:
            checked += 1
            keys = set(got) | set(want)
            dev = max(abs(got.get(k, 0.0) - want.get(k, 0.0)) for k in keys)
            max_dev = max(max_dev, dev)
    commits_match = seen_commits == recorded_commits[:len(seen_commits)] and (
        log_in.truncated or len(seen_commits) == len(recorded_commits)
    )
    return ReplayReport(
        commits_match=commits_match,
        max_mass_deviation=max_dev,
        ticks_checked=checked,
        text=engine.text,
        partial=log_in.truncated,
    )
