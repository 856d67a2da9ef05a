#!/usr/bin/env python3
"""Comparative noise sweep: adaptive engine vs fixed-navigation baseline.

Runs the full factorial (engine x noise level x seed) on the bundled
order-2 model, writes per-session metrics to CSV, and prints a median
summary table.  Reproduces the headline simulation comparison; with
--quick it runs a 4x smaller grid for a fast sanity pass.

Usage: python3 scripts/run_comparison.py [--out sweep.csv] [--quick]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from rtiac.langmodel import NGramModel  # noqa: E402
from rtiac.sim import records_to_csv, sweep  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default=ROOT / "data" / "model.json")
    ap.add_argument("--targets", default=ROOT / "data" / "targets.txt")
    ap.add_argument("--noise", default="0,0.05,0.1,0.2",
                    help="comma-separated aim noise levels")
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--layout", default="linear")
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--quick", action="store_true",
                    help="5 seeds and two noise levels")
    args = ap.parse_args()

    model = NGramModel.load(args.model)
    targets = [t for t in Path(args.targets).read_text().splitlines() if t]
    noise = [float(v) for v in args.noise.split(",")]
    seeds = range(args.seeds)
    if args.quick:
        noise = [0.0, 0.1]
        seeds = range(5)

    t0 = time.perf_counter()
    done = [0]

    def tick(_rec):
        done[0] += 1
        print(f"\r  {done[0]} sessions", end="", file=sys.stderr, flush=True)

    recs = sweep(model, targets, noise, seeds, layout=args.layout,
                 progress=tick)
    print(file=sys.stderr)
    records_to_csv(recs, args.out)
    print(f"{len(recs)} sessions in {time.perf_counter() - t0:.0f} s "
          f"-> {args.out}\n")

    def med(engine, sigma, field):
        vals = [getattr(r, field) for r in recs
                if r.engine == engine and r.sigma_u == sigma]
        return float(np.median(vals))

    print(f"{'sigma':>6} {'engine':>7} {'chars/min':>10} {'bits/s':>7} "
          f"{'errors':>7} {'undos':>6} {'done':>5}")
    for sigma in noise:
        for eng in ("rtiac", "iac"):
            print(f"{sigma:>6} {eng:>7} "
                  f"{med(eng, sigma, 'chars_per_min'):>10.1f} "
                  f"{med(eng, sigma, 'bits_per_second'):>7.2f} "
                  f"{med(eng, sigma, 'error_count'):>7.1f} "
                  f"{med(eng, sigma, 'undo_count'):>6.1f} "
                  f"{med(eng, sigma, 'completed'):>5.0%}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
