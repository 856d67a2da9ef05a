"""Closed-loop simulated entry sessions and comparative sweeps.

A simulated user watches the display, aims at the point where the
remaining target string lives (optionally where it lived ``delay``
seconds ago), and moves a cursor there with Gaussian display-space
noise.  The same user model drives both the adaptive engine and the
fixed-navigation baseline, so differences in the metrics come from the
interfaces, not the user.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence

import numpy as np

from .actions import ActionEvent
from .baseline import BaselineSession, baseline_tick, new_baseline_session
from .belief import transform_y
from .coder import CodeTree
from .config import EngineConfig, ScanConfig, SimConfig
from .engine import Engine
from .langmodel import NGramModel
from .layouts import region_center_position
from .session_log import IdealEstimator, SessionWriter

log = logging.getLogger(__name__)

TARGET_DESCENT_DEPTH = 6
MIN_AIM_INTERVAL = 1e-9


@dataclass(frozen=True)
class SimulatedUser:
    """Aim noise and reaction characteristics of the simulated operator."""

    sigma_u: float = 0.0       # display-space aim noise, std in display units
    delay: float = 0.0         # seconds of perceptual lag when aiming
    timing_bias: float = 0.0   # seconds a scan press lags the intended moment
    timing_jitter: float = 0.0  # std of scan press timing, seconds


@dataclass(frozen=True)
class MetricsRecord:
    engine: str
    layout: str
    sigma_u: float
    delay: float
    seed: int
    target_len: int
    completed: bool
    chars: int
    chars_per_min: float
    bits_per_char: float
    bits_per_second: float
    error_count: int
    undo_count: int
    selections: int
    bits_per_selection: float
    ticks: int
    wall_seconds: float

    @property
    def total_bits(self) -> float:
        return self.bits_per_char * self.chars


CSV_COLUMNS = [
    "engine", "layout", "sigma_u", "delay", "seed", "target_len", "completed",
    "chars", "chars_per_min", "bits_per_char", "bits_per_second",
    "error_count", "undo_count", "selections", "bits_per_selection",
    "ticks", "wall_seconds",
]


def matched_estimator(user: SimulatedUser, config: EngineConfig) -> IdealEstimator:
    """The pointer model a trained system reaches for this user.

    The window mean of n independent aim samples has variance
    sigma_u^2 / n; that residual variance, floored at the engine's
    minimum, is the honest kernel width.
    """
    n = max(int(config.window_horizon * config.tick_rate), 1)
    var = max(user.sigma_u ** 2 / n, config.sigma2_min)
    return IdealEstimator(variance=var)


def target_axis_point(tree: CodeTree, target: str) -> Optional[float]:
    """Axis coordinate the user should aim at; None when undo is needed.

    Descends the remaining target a few generations (stopping before
    float resolution runs out) and aims at the midpoint, so the aim
    carries more than one symbol of intent.
    """
    committed = tree.committed_prefix
    if not target.startswith(committed):
        return None
    rest = target[len(committed):]
    s, mid = "", 0.5
    for ch in rest[:TARGET_DESCENT_DEPTH]:
        cand = s + ch
        iv = tree.interval_of(cand)
        if iv.length < MIN_AIM_INTERVAL:
            break
        s, mid = cand, iv.mid
    return mid


def _aim_axis(engine: Engine, target: str) -> float:
    """Axis coordinate including the undo sliver shift."""
    u = engine.belief.undo_width
    tx = target_axis_point(engine.tree, target)
    if tx is None:
        return u / 2.0
    return u + (1.0 - u) * tx


def _metrics(
    *,
    engine: str,
    layout: str,
    user: SimulatedUser,
    seed: int,
    target: str,
    text: str,
    completed: bool,
    errors: int,
    undos: int,
    selections: int,
    ticks: int,
    dt: float,
    model: NGramModel,
) -> MetricsRecord:
    wall = ticks * dt
    chars = len(text)
    bits = -np.log2(model.prefix_mass(text)) if text else 0.0
    visible = len(text.rstrip(model.alphabet.terminator))
    return MetricsRecord(
        engine=engine,
        layout=layout,
        sigma_u=user.sigma_u,
        delay=user.delay,
        seed=seed,
        target_len=len(target),
        completed=completed,
        chars=chars,
        chars_per_min=visible / (wall / 60.0) if wall > 0 else 0.0,
        bits_per_char=bits / chars if chars else 0.0,
        bits_per_second=bits / wall if wall > 0 else 0.0,
        error_count=errors,
        undo_count=undos,
        selections=selections,
        bits_per_selection=bits / selections if selections else 0.0,
        ticks=ticks,
        wall_seconds=wall,
    )


def run_session(
    model: NGramModel,
    target: str,
    user: SimulatedUser,
    *,
    engine: str = "rtiac",
    layout: str = "linear",
    config: Optional[SimConfig] = None,
    seed: int = 0,
    log_path=None,
) -> MetricsRecord:
    """One closed-loop session; deterministic for a given (config, seed)."""
    config = config or SimConfig()
    if not target.endswith(model.alphabet.terminator):
        target = target + model.alphabet.terminator
    model.alphabet.validate(target)
    if engine == "iac":
        return _run_baseline(model, target, user, config, seed, log_path)
    if engine != "rtiac":
        raise ValueError(f"unknown engine {engine!r}")
    if layout == "scan":
        return _run_scan(model, target, user, config, seed, log_path)
    return _run_rtiac(model, target, user, layout, config, seed, log_path)


def _open_writer(log_path, *, session, engine, layout, model,
                 engine_config: EngineConfig, scan_config: ScanConfig,
                 seed, estimator=None) -> Optional[SessionWriter]:
    # the logged config must be the one the engine actually ran with,
    # layout override included, or replay rebuilds a different engine
    if log_path is None:
        return None
    cfg_doc = dict(engine_config.__dict__)
    cfg_doc["scan"] = dict(scan_config.__dict__)
    return SessionWriter(
        log_path, session=session, engine=engine, layout=layout, model=model,
        config=cfg_doc, seed=seed, estimator=estimator,
    )


def _run_rtiac(model, target, user, layout, config: SimConfig, seed,
               log_path) -> MetricsRecord:
    rng = np.random.default_rng(seed)
    ecfg = EngineConfig(**{**config.engine.__dict__, "layout": layout})
    estimator = matched_estimator(user, ecfg)
    eng = Engine(model, ecfg, estimator=estimator, scan=config.scan)
    writer = _open_writer(log_path, session=f"rtiac-{layout}-s{seed}",
                          engine="rtiac", layout=layout, model=model,
                          engine_config=ecfg, scan_config=config.scan,
                          seed=seed, estimator=estimator)
    delay_ticks = int(round(user.delay * ecfg.tick_rate))
    aim_history: List[np.ndarray] = []
    errors = 0
    try:
        while not eng.done and eng.tick_index < config.max_ticks:
            ax = _aim_axis(eng, target)
            # the user aims at the middle of the smallest visible region
            # that contains the intended continuation
            aim_history.append(region_center_position(eng.frame, ax))
            aim = aim_history[max(len(aim_history) - 1 - delay_ticks, 0)]
            pos = np.clip(aim + rng.normal(0.0, user.sigma_u, 2), 0.0, 1.0)
            ev = ActionEvent(t=eng.now + ecfg.dt, kind="cursor",
                             x=float(pos[0]), y=float(pos[1]))
            if writer:
                writer.write_events(eng.tick_index + 1, [ev])
            result = eng.tick([ev])
            if writer:
                writer.write_tick(eng, result)
            for sym in result.committed:
                if sym != "\b" and not target.startswith(eng.text):
                    errors += 1
        rec = _metrics(engine="rtiac", layout=layout, user=user, seed=seed,
                       target=target, text=eng.text, completed=eng.done,
                       errors=errors, undos=eng.undo_count, selections=0,
                       ticks=eng.tick_index, dt=ecfg.dt, model=model)
        if writer:
            writer.write_end("finished" if eng.done else "budget",
                             metrics=rec.__dict__)
        return rec
    finally:
        if writer:
            writer.close()


def _run_baseline(model, target, user, config: SimConfig, seed,
                  log_path) -> MetricsRecord:
    rng = np.random.default_rng(seed)
    sess: BaselineSession = new_baseline_session(CodeTree(model), config.baseline)
    writer = _open_writer(log_path, session=f"iac-s{seed}", engine="iac",
                          layout="zoom", model=model,
                          engine_config=config.engine, scan_config=config.scan,
                          seed=seed)
    dt = config.engine.dt
    ticks = errors = undos = 0
    try:
        while not sess.done and ticks < config.max_ticks:
            ticks += 1
            tp = target_axis_point(sess.tree, target)
            if tp is None:
                dx, dy = 0.0, 0.5  # zoom out until the wrong commit unwinds
            else:
                inside = sess.view.lo <= tp < sess.view.hi
                dx = 1.0 if inside else 0.0
                dy = float(np.clip((tp - sess.view.lo) / sess.view.width, 0.0, 1.0))
            dx = float(np.clip(dx + rng.normal(0.0, user.sigma_u), 0.0, 1.0))
            dy = float(np.clip(dy + rng.normal(0.0, user.sigma_u), 0.0, 1.0))
            cursor = (2.0 * dx - 1.0, 2.0 * dy - 1.0)
            committed = baseline_tick(sess, cursor, dt)
            for sym in committed:
                if sym == "\b":
                    undos += 1
                elif not target.startswith(sess.text):
                    errors += 1
            if writer:
                writer.write_baseline_tick(ticks, ticks * dt * 1000.0,
                                           sess.view, cursor, committed,
                                           sess.text)
        rec = _metrics(engine="iac", layout="zoom", user=user, seed=seed,
                       target=target, text=sess.text, completed=sess.done,
                       errors=errors, undos=undos, selections=0,
                       ticks=ticks, dt=dt, model=model)
        if writer:
            writer.write_end("finished" if sess.done else "budget",
                             metrics=rec.__dict__)
        return rec
    finally:
        if writer:
            writer.close()


def _run_scan(model, target, user, config: SimConfig, seed,
              log_path) -> MetricsRecord:
    """Timed single-action entry: press when the indicator crosses the aim."""
    rng = np.random.default_rng(seed)
    ecfg = EngineConfig(**{**config.engine.__dict__, "layout": "scan"})
    eng = Engine(model, ecfg, scan=config.scan)
    writer = _open_writer(log_path, session=f"scan-s{seed}", engine="rtiac",
                          layout="scan", model=model, engine_config=ecfg,
                          scan_config=config.scan, seed=seed)
    v = config.scan.speed
    pending: List[float] = []  # press timestamps not yet delivered
    presses = errors = 0
    try:
        while not eng.done and eng.tick_index < config.max_ticks:
            prev_pos = eng.scan_pos
            now_end = eng.now + ecfg.dt
            # intended press moment: indicator crossing the aim coordinate
            ax = _aim_axis(eng, target)
            y_t = float(transform_y(eng.belief, ax))
            gap = (y_t - prev_pos) % 1.0
            if gap < v * ecfg.dt:
                t_cross = eng.now + gap / v
                t_press = t_cross + user.timing_bias + rng.normal(0.0, user.timing_jitter)
                pending.append(max(t_press, eng.now))
            due = [t for t in pending if t <= now_end]
            pending = [t for t in pending if t > now_end]
            events = [ActionEvent(t=min(t, now_end), kind="press", x=0.0, y=0.0,
                                  action_id=0) for t in sorted(due)]
            presses += len(events)
            if writer:
                writer.write_events(eng.tick_index + 1, events)
            result = eng.tick(events)
            if writer:
                writer.write_tick(eng, result)
            for sym in result.committed:
                if sym != "\b" and not target.startswith(eng.text):
                    errors += 1
        rec = _metrics(engine="rtiac", layout="scan", user=user, seed=seed,
                       target=target, text=eng.text, completed=eng.done,
                       errors=errors, undos=eng.undo_count, selections=presses,
                       ticks=eng.tick_index, dt=ecfg.dt, model=model)
        if writer:
            writer.write_end("finished" if eng.done else "budget",
                             metrics=rec.__dict__)
        return rec
    finally:
        if writer:
            writer.close()


# -- sweeps and tuning ---------------------------------------------------


def sweep(
    model: NGramModel,
    targets: Sequence[str],
    noise_levels: Sequence[float],
    seeds: Sequence[int],
    *,
    engines: Sequence[str] = ("rtiac", "iac"),
    layout: str = "linear",
    config: Optional[SimConfig] = None,
    progress: Optional[Callable[[MetricsRecord], None]] = None,
) -> List[MetricsRecord]:
    """Full factorial over engines, noise levels, and seeds.

    Target strings rotate across seeds so no engine sees only one
    string.  Deterministic: seed k always gets the same target.
    """
    config = config or SimConfig()
    out: List[MetricsRecord] = []
    for sigma in noise_levels:
        for eng in engines:
            for seed in seeds:
                user = SimulatedUser(sigma_u=sigma)
                target = targets[seed % len(targets)]
                rec = run_session(model, target, user, engine=eng,
                                  layout=layout, config=config, seed=seed)
                out.append(rec)
                if progress:
                    progress(rec)
    return out


def records_to_csv(records: Sequence[MetricsRecord], path=None) -> str:
    """Serialize records in the documented column order."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        row = {k: r.__dict__[k] for k in CSV_COLUMNS}
        row["completed"] = int(r.completed)
        w.writerow(row)
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


@dataclass(frozen=True)
class TuneResult:
    best_speed: float
    best_objective: float          # bits per second, the tuned quantity
    bits_per_selection: float
    evaluations: tuple             # (speed, objective) pairs in eval order
    endpoint_objectives: tuple     # objectives at the scanned range ends


def tune_scan_speed(
    model: NGramModel,
    user: SimulatedUser,
    *,
    speed_range: tuple = (0.1, 1.2),
    trials: int = 5,
    iterations: int = 10,
    target: str = "hello world",
    config: Optional[SimConfig] = None,
) -> TuneResult:
    """Golden-section search for the sweep speed maximizing bits per second.

    The objective is the median information rate over ``trials`` seeded
    sessions; bits per selection at the chosen speed is reported
    alongside.  Evaluations reuse the same seeds at every speed so the
    objective is a deterministic function of speed.
    """
    config = config or SimConfig()
    evals: List[tuple] = []

    def run_at(speed: float) -> tuple:
        cfg = SimConfig(
            max_ticks=config.max_ticks,
            engine=config.engine,
            baseline=config.baseline,
            scan=ScanConfig(
                speed=speed,
                timing_bias=user.timing_bias,
                timing_jitter=max(user.timing_jitter, 1e-3),
                window_width=config.scan.window_width,
            ),
        )
        recs = [run_session(model, target, user, engine="rtiac", layout="scan",
                            config=cfg, seed=s) for s in range(trials)]
        rate = float(np.median([r.bits_per_second for r in recs]))
        per_sel = float(np.median([r.bits_per_selection for r in recs]))
        evals.append((speed, rate))
        return rate, per_sel

    lo, hi = speed_range
    f_lo, _ = run_at(lo)
    f_hi, _ = run_at(hi)
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    f_c, _ = run_at(c)
    f_d, _ = run_at(d)
    for _ in range(iterations):
        if f_c >= f_d:
            b, d, f_d = d, c, f_c
            c = b - inv_phi * (b - a)
            f_c, _ = run_at(c)
        else:
            a, c, f_c = c, d, f_d
            d = a + inv_phi * (b - a)
            f_d, _ = run_at(d)
    best = c if f_c >= f_d else d
    f_best, per_sel = run_at(best)
    # the scanned range ends are candidates too
    if f_lo > f_best:
        best, f_best = lo, f_lo
        _, per_sel = run_at(lo)
    if f_hi > f_best:
        best, f_best = hi, f_hi
        _, per_sel = run_at(hi)
    return TuneResult(
        best_speed=float(best),
        best_objective=float(f_best),
        bits_per_selection=float(per_sel),
        evaluations=tuple(evals),
        endpoint_objectives=(float(f_lo), float(f_hi)),
    )
