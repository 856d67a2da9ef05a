#!/usr/bin/env python3
"""Tune the scan sweep speed for a timed single-switch user.

Golden-section search on the information rate (bits per second) of
simulated scan sessions, for a user whose press timing has the given
bias and jitter.  Prints the evaluation trace and the tuned operating
point.

Usage: python3 scripts/tune_scan.py [--jitter 0.1] [--lo 0.1] [--hi 3.0]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rtiac.langmodel import NGramModel  # noqa: E402
from rtiac.sim import SimulatedUser, tune_scan_speed  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default=ROOT / "data" / "model.json")
    ap.add_argument("--jitter", type=float, default=0.1,
                    help="press timing std, seconds")
    ap.add_argument("--bias", type=float, default=0.0,
                    help="press timing bias, seconds")
    ap.add_argument("--lo", type=float, default=0.1)
    ap.add_argument("--hi", type=float, default=3.0)
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--iterations", type=int, default=10)
    ap.add_argument("--target", default="hello world")
    args = ap.parse_args()

    model = NGramModel.load(args.model)
    user = SimulatedUser(timing_bias=args.bias, timing_jitter=args.jitter)
    t0 = time.perf_counter()
    res = tune_scan_speed(model, user, speed_range=(args.lo, args.hi),
                          trials=args.trials, iterations=args.iterations,
                          target=args.target)
    print(f"tuned in {time.perf_counter() - t0:.0f} s "
          f"({len(res.evaluations)} speeds evaluated)\n")
    print(f"{'speed':>8} {'bits/s':>8}")
    # the search may revisit a bracket point; show each speed once
    for speed, obj in sorted(dict(res.evaluations).items()):
        marker = "  <- best" if speed == res.best_speed else ""
        print(f"{speed:>8.3f} {obj:>8.3f}{marker}")
    print(f"\nbest speed      {res.best_speed:.3f} units/s")
    print(f"information     {res.best_objective:.3f} bits/s")
    print(f"per selection   {res.bits_per_selection:.3f} bits")
    print(f"range endpoints {res.endpoint_objectives[0]:.3f} / "
          f"{res.endpoint_objectives[1]:.3f} bits/s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
