#!/usr/bin/env python3
"""Generate the bundled training corpus and target strings.

Deterministic: a seeded sampler draws sentences from a bank of common
English words with Zipf-like weights, lowercase a-z plus space only.
The corpus ships with the repository; this script documents exactly how
it was produced and can regenerate it at will.

Usage: python3 scripts/make_corpus.py [--out data/] [--bytes 100000]
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

WORDS = """
the of and to in is you that it he was for on are as with his they at be this
have from or had by word but not what all were we when your can said there use
an each which she do how their if will up other about out many then them these
so some her would make like him into time has look two more write go see number
way could people my than first water been call who oil its now find long down
day did get come made may part over new sound take only little work know place
year live me back give most very after thing our just name good sentence man
think say great where help through much before line right too mean old any same
tell boy follow came want show also around form three small set put end does
another well large must big even such because turn here why ask went men read
need land different home us move try kind hand picture again change off play
spell air away animal house point page letter mother answer found study still
learn should world high every near add food between own below country plant
last school father keep tree never start city earth eye light thought head
under story saw left few while along might close something seem next hard open
example begin life always those both paper together got group often run
important until children side feet car mile night walk white sea began grow
took river four carry state once book hear stop without second late miss idea
enough eat face watch far really almost let above girl sometimes mountain cut
young talk soon list song being leave family body music color stand sun
question fish area mark dog horse birds problem complete room knew since ever
piece told usually friends easy heard order red door sure become top ship
across today during short better best however low hours black products happened
whole measure remember early waves reached listen wind rock space covered fast
several hold himself toward five step morning passed vowel true hundred against
pattern numeral table north slowly money map farm pulled draw voice seen cold
cried plan notice south sing war ground fall king town unit figure certain
field travel wood fire upon size zero dozen puzzle lazy quiet quick jump
""".split()


def zipf_weights(n: int) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1)
    return w / w.sum()


def make_lines(rng: np.random.Generator, total_bytes: int) -> list[str]:
    weights = zipf_weights(len(WORDS))
    lines: list[str] = []
    size = 0
    while size < total_bytes:
        n_words = int(rng.integers(4, 13))
        idx = rng.choice(len(WORDS), size=n_words, p=weights)
        line = " ".join(WORDS[i] for i in idx)
        lines.append(line)
        size += len(line) + 1
    return lines


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    ap.add_argument("--bytes", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20240901)
    ap.add_argument("--n-targets", type=int, default=40)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(args.seed)
    corpus = make_lines(rng, args.bytes)
    (out / "corpus.txt").write_text("\n".join(corpus) + "\n")

    # held-out targets from a different stream: short phrases for sweeps
    t_rng = np.random.default_rng(args.seed + 1)
    weights = zipf_weights(len(WORDS))
    targets: list[str] = []
    while len(targets) < args.n_targets:
        n_words = int(t_rng.integers(2, 4))
        idx = t_rng.choice(len(WORDS), size=n_words, p=weights)
        phrase = " ".join(WORDS[i] for i in idx)
        if 8 <= len(phrase) <= 16:
            targets.append(phrase)
    (out / "targets.txt").write_text("\n".join(targets) + "\n")

    print(f"corpus: {sum(len(l) + 1 for l in corpus)} bytes, {len(corpus)} lines")
    print(f"targets: {len(targets)} phrases")


if __name__ == "__main__":
    main()
