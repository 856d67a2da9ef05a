"""Command line front end.

Subcommands cover the full workflow: build a model from a corpus, run
single sessions or comparative sweeps, tune the scan speed, fit a
pointer model from logs, serve the live WebSocket session service, and
replay a logged session to verify determinism.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


def _add_model_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, help="model JSON file")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rtiac",
                                description="adaptive data entry toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train-model", help="fit an n-gram model from a corpus")
    t.add_argument("--corpus", required=True, help="text file, one entry per line")
    t.add_argument("--order", type=int, default=2)
    t.add_argument("--alpha", type=float, default=0.1)
    t.add_argument("--lowercase", action="store_true")
    t.add_argument("--out", required=True)

    s = sub.add_parser("simulate", help="run one simulated session")
    _add_model_arg(s)
    s.add_argument("--target", required=True)
    s.add_argument("--engine", choices=("rtiac", "iac"), default="rtiac")
    s.add_argument("--layout", default="linear")
    s.add_argument("--sigma", type=float, default=0.0, help="aim noise std")
    s.add_argument("--delay", type=float, default=0.0, help="perceptual lag, s")
    s.add_argument("--jitter", type=float, default=0.0, help="press timing std, s")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--log", help="write a session log here")

    w = sub.add_parser("sweep", help="comparative noise sweep to CSV")
    _add_model_arg(w)
    w.add_argument("--targets", required=True,
                   help="text file of target strings, one per line")
    w.add_argument("--noise", default="0,0.05,0.1,0.2",
                   help="comma-separated aim noise levels")
    w.add_argument("--seeds", type=int, default=20)
    w.add_argument("--layout", default="linear")
    w.add_argument("--out", required=True, help="CSV output path")

    u = sub.add_parser("tune-scan", help="golden-section scan speed tuning")
    _add_model_arg(u)
    u.add_argument("--jitter", type=float, default=0.1)
    u.add_argument("--bias", type=float, default=0.0)
    u.add_argument("--lo", type=float, default=0.1)
    u.add_argument("--hi", type=float, default=3.0)
    u.add_argument("--trials", type=int, default=5)
    u.add_argument("--iterations", type=int, default=10)
    u.add_argument("--target", default="hello world")

    l = sub.add_parser("learn", help="fit a pointer model from session logs")
    l.add_argument("--logs", nargs="+", required=True,
                   help="log files or directories of .jsonl logs")
    l.add_argument("--out", required=True)
    l.add_argument("--symmetry", choices=("none", "vertical", "horizontal"),
                   default="none")
    l.add_argument("--lam", type=float, default=0.0,
                   help="weight of symmetry-mirrored training data")

    v = sub.add_parser("serve", help="run the WebSocket session service")
    _add_model_arg(v)
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8787)
    v.add_argument("--layout", default="linear")
    v.add_argument("--estimator", help="pointer model JSON from `learn`")
    v.add_argument("--log-dir", default=os.environ.get("RTIAC_LOG_DIR"),
                   help="session log directory (default $RTIAC_LOG_DIR)")

    r = sub.add_parser("replay", help="re-run a logged session and verify")
    r.add_argument("--log", required=True)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return {
        "train-model": _cmd_train_model,
        "simulate": _cmd_simulate,
        "sweep": _cmd_sweep,
        "tune-scan": _cmd_tune_scan,
        "learn": _cmd_learn,
        "serve": _cmd_serve,
        "replay": _cmd_replay,
    }[args.command](args)


def _load_model(path):
    from .langmodel import NGramModel

    return NGramModel.load(path)


def _cmd_train_model(args) -> int:
    from .langmodel import ingest_corpus

    lines = Path(args.corpus).read_text().splitlines()
    model = ingest_corpus(lines, order=args.order, alpha=args.alpha,
                          lowercase=args.lowercase)
    model.save(args.out)
    rep = model.ingest_report
    print(f"model saved to {args.out}: {model.alphabet.size} symbols, "
          f"order {model.order}, {rep.lines} lines, {rep.kept_chars} chars "
          f"({rep.dropped_total} dropped)")
    return 0


def _cmd_simulate(args) -> int:
    from .sim import SimulatedUser, run_session

    model = _load_model(args.model)
    user = SimulatedUser(sigma_u=args.sigma, delay=args.delay,
                         timing_jitter=args.jitter)
    rec = run_session(model, args.target, user, engine=args.engine,
                      layout=args.layout, seed=args.seed, log_path=args.log)
    print(json.dumps(rec.__dict__, indent=2))
    return 0 if rec.completed else 1


def _cmd_sweep(args) -> int:
    from .sim import records_to_csv, sweep

    model = _load_model(args.model)
    targets = [t for t in Path(args.targets).read_text().splitlines() if t]
    noise = [float(v) for v in args.noise.split(",")]
    recs = sweep(model, targets, noise, range(args.seeds), layout=args.layout,
                 progress=lambda r: print(
                     f"  {r.engine} sigma={r.sigma_u} seed={r.seed}: "
                     f"{r.chars_per_min:.1f} cpm, {r.error_count} errors",
                     file=sys.stderr))
    records_to_csv(recs, args.out)
    print(f"{len(recs)} sessions written to {args.out}")
    return 0


def _cmd_tune_scan(args) -> int:
    from .sim import SimulatedUser, tune_scan_speed

    model = _load_model(args.model)
    user = SimulatedUser(timing_bias=args.bias, timing_jitter=args.jitter)
    res = tune_scan_speed(model, user, speed_range=(args.lo, args.hi),
                          trials=args.trials, iterations=args.iterations,
                          target=args.target)
    print(json.dumps({
        "best_speed": res.best_speed,
        "bits_per_second": res.best_objective,
        "bits_per_selection": res.bits_per_selection,
        "endpoint_objectives": list(res.endpoint_objectives),
    }, indent=2))
    return 0


def _cmd_learn(args) -> int:
    from .learner import ReflectionSymmetry, fit_parametric, record_pairs
    from .session_log import read_session

    paths = []
    for spec_path in args.logs:
        p = Path(spec_path)
        paths.extend(sorted(p.glob("*.jsonl")) if p.is_dir() else [p])
    pairs = []
    for p in paths:
        try:
            pairs.extend(record_pairs(read_session(p)))
        except ValueError as exc:
            log.warning("skipping %s: %s", p, exc)
    if not pairs:
        print("no usable training pairs found", file=sys.stderr)
        return 1
    symmetry = None if args.symmetry == "none" else ReflectionSymmetry(args.symmetry)
    est = fit_parametric(pairs, symmetry=symmetry, lam=args.lam)
    est.save(args.out)
    print(f"pointer model fit from {len(pairs)} pairs "
          f"({len(paths)} logs); residual std {est.sigma_c:.4f}; "
          f"saved to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .config import EngineConfig
    from .service import build_app
    from .session_log import estimator_from_json

    model = _load_model(args.model)
    estimator = None
    if args.estimator:
        estimator = estimator_from_json(json.loads(Path(args.estimator).read_text()))
    if args.log_dir:
        Path(args.log_dir).mkdir(parents=True, exist_ok=True)
    app = build_app(model, config=EngineConfig(layout=args.layout),
                    estimator=estimator, log_dir=args.log_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_replay(args) -> int:
    from .session_log import read_session, replay

    session = read_session(args.log)
    report = replay(session)
    status = "ok" if report.ok else "MISMATCH"
    partial = " (partial: truncated log)" if report.partial else ""
    print(f"replay {status}{partial}: text={report.text!r}, "
          f"{report.ticks_checked} ticks checked, "
          f"max mass deviation {report.max_mass_deviation:.2e}")
    return 0 if report.ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
