"""Character-level input model.

An ordered alphabet with a distinguished end-of-entry symbol, plus
add-alpha n-gram statistics with backoff to shorter contexts.  The model
is immutable after ingestion and safe to share across threads.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MODEL_FORMAT_VERSION = 1
DEFAULT_TERMINATOR = "\n"


class ConfigurationError(ValueError):
    """Raised when a model or alphabet cannot be built as configured."""


class InvalidStringError(ValueError):
    """Raised for strings that are not valid over the alphabet."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered entry symbols plus a distinguished end-of-entry symbol.

    The end symbol sorts before every ordinary symbol, so the "stop here"
    region is always the leftmost one in any layout.
    """

    symbols: tuple[str, ...]
    terminator: str = DEFAULT_TERMINATOR

    def __post_init__(self) -> None:
        if len(self.symbols) < 2:
            raise ConfigurationError("alphabet needs at least 2 symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ConfigurationError("alphabet symbols must be distinct")
        if any(len(s) != 1 for s in self.symbols):
            raise ConfigurationError("alphabet symbols must be single characters")
        if self.terminator in self.symbols:
            raise ConfigurationError("terminator must not be an alphabet symbol")

    @classmethod
    def from_text(cls, text: Iterable[str], terminator: str = DEFAULT_TERMINATOR) -> "Alphabet":
        """Derive a sorted alphabet from the distinct printable characters seen."""
        seen = {ch for line in text for ch in line if ch.isprintable() and ch != terminator}
        if len(seen) < 2:
            raise ConfigurationError("fewer than 2 usable symbols in corpus")
        return cls(symbols=tuple(sorted(seen)), terminator=terminator)

    @property
    def ordered(self) -> tuple[str, ...]:
        """All selectable symbols, end symbol first."""
        return (self.terminator,) + self.symbols

    @property
    def size(self) -> int:
        return len(self.symbols) + 1

    def index(self, symbol: str) -> int:
        if symbol == self.terminator:
            return 0
        try:
            return 1 + self.symbols.index(symbol)
        except ValueError:
            raise InvalidStringError(f"symbol {symbol!r} not in alphabet") from None

    def validate(self, s: str, allow_final_terminator: bool = True) -> None:
        """Check that ``s`` is a valid (possibly terminated) entry string."""
        body, tail = (s[:-1], s[-1:]) if s else ("", "")
        if tail == self.terminator:
            if not allow_final_terminator:
                raise InvalidStringError("terminator not allowed here")
        else:
            body = s
        for ch in body:
            if ch == self.terminator:
                raise InvalidStringError("terminator in interior of string")
            if ch not in self.symbols:
                raise InvalidStringError(f"symbol {ch!r} not in alphabet")


@dataclass(frozen=True)
class IngestReport:
    lines: int
    kept_chars: int
    dropped: Counter = field(default_factory=Counter)

    @property
    def dropped_total(self) -> int:
        return sum(self.dropped.values())


class NGramModel:
    """Add-alpha smoothed n-gram model over an :class:`Alphabet`.

    ``counts`` maps context strings (length 0..order) to next-symbol
    counters; unseen contexts back off to the longest seen suffix, down
    to the empty context.  Every conditional distribution is strictly
    positive when ``alpha > 0``.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        order: int,
        alpha: float,
        counts: dict[str, dict[str, int]] | None = None,
        ingest_report: IngestReport | None = None,
    ):
        if order < 0:
            raise ConfigurationError("order must be >= 0")
        if not alpha > 0:
            raise ConfigurationError("alpha must be > 0")
        self.alphabet = alphabet
        self.order = int(order)
        self.alpha = float(alpha)
        self.counts = counts or {}
        self.ingest_report = ingest_report
        self._dist_cache: dict[str, np.ndarray] = {}

    # -- queries ---------------------------------------------------------

    def next_symbol_distribution(self, context: str) -> np.ndarray:
        """Conditional distribution over ``alphabet.ordered`` (end symbol first)."""
        self.alphabet.validate(context, allow_final_terminator=False)
        ctx = self._effective_context(context)
        cached = self._dist_cache.get(ctx)
        if cached is not None:
            return cached
        table = self.counts.get(ctx, {})
        vec = np.array(
            [table.get(sym, 0) + self.alpha for sym in self.alphabet.ordered],
            dtype=float,
        )
        vec /= vec.sum()
        self._dist_cache[ctx] = vec
        return vec

    def _effective_context(self, context: str) -> str:
        """Longest suffix of ``context`` (capped at ``order``) with counts."""
        ctx = context[len(context) - min(self.order, len(context)):]
        while ctx and ctx not in self.counts:
            ctx = ctx[1:]
        return ctx

    def symbol_probability(self, context: str, symbol: str) -> float:
        return float(self.next_symbol_distribution(context)[self.alphabet.index(symbol)])

    def prefix_mass(self, s: str) -> float:
        """Total probability of entries beginning with ``s`` (chain rule).

        A trailing end symbol is allowed, in which case this is the
        probability of exactly that finished entry.
        """
        self.alphabet.validate(s)
        mass = 1.0
        for i, ch in enumerate(s):
            mass *= self.symbol_probability(s[:i], ch)
        return mass

    def log2_prefix_mass(self, s: str) -> float:
        self.alphabet.validate(s)
        total = 0.0
        for i, ch in enumerate(s):
            total += np.log2(self.symbol_probability(s[:i], ch))
        return total

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "version": MODEL_FORMAT_VERSION,
            "alphabet": "".join(self.alphabet.symbols),
            "terminator": self.alphabet.terminator,
            "order": self.order,
            "alpha": self.alpha,
            "counts": self.counts,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "NGramModel":
        if doc.get("version") != MODEL_FORMAT_VERSION:
            raise ConfigurationError(f"unsupported model version {doc.get('version')!r}")
        alphabet = Alphabet(tuple(doc["alphabet"]), doc["terminator"])
        counts = {ctx: dict(table) for ctx, table in doc["counts"].items()}
        return cls(alphabet, doc["order"], doc["alpha"], counts)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh)

    @classmethod
    def load(cls, path) -> "NGramModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def ingest_corpus(
    text_lines: Sequence[str],
    order: int,
    alpha: float,
    alphabet: Alphabet | None = None,
    lowercase: bool = False,
) -> NGramModel:
    """Count n-gram events from one entry per line.

    Characters outside the alphabet are dropped (and tallied in the
    ingest report); every line contributes one end-of-entry event.
    """
    lines = [line.lower() if lowercase else line for line in text_lines]
    if alphabet is None:
        alphabet = Alphabet.from_text(lines)

    allowed = set(alphabet.symbols)
    dropped: Counter = Counter()
    counts: dict[str, dict[str, int]] = {}
    kept = 0

    def bump(ctx: str, sym: str) -> None:
        counts.setdefault(ctx, {})
        counts[ctx][sym] = counts[ctx].get(sym, 0) + 1

    for line in lines:
        filtered = []
        for ch in line:
            if ch in allowed:
                filtered.append(ch)
            elif ch != alphabet.terminator:
                dropped[ch] += 1
        kept += len(filtered)
        events = filtered + [alphabet.terminator]
        for i, sym in enumerate(events):
            for ctx_len in range(min(i, order) + 1):
                bump("".join(filtered[i - ctx_len:i]), sym)

    report = IngestReport(lines=len(lines), kept_chars=kept, dropped=dropped)
    return NGramModel(alphabet, order, alpha, counts, ingest_report=report)
