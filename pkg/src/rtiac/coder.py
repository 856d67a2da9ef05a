"""String-to-interval map over an input model.

Every entry string owns a half-open subinterval of [0,1): the end symbol
gets the leftmost child slot, children tile their parent in symbol
order, and each interval's length equals the total probability of
entries beginning with that string.  After a symbol is committed the map
is re-expressed relative to the new prefix, so intervals never underflow
no matter how long the entry gets.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .langmodel import InvalidStringError, NGramModel


class TreeClosedError(RuntimeError):
    """Raised when operating on a tree whose entry has been finished."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    relative_to: str = ""

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise ValueError(f"bad interval [{self.lo}, {self.hi})")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x < self.hi


class CodeTree:
    """Lazy, cached expansion of the interval map relative to a committed prefix.

    One tree per session; mutating operations return a fresh tree.
    """

    def __init__(self, model: NGramModel, committed_prefix: str = "", closed: bool = False):
        self.model = model
        self.committed_prefix = committed_prefix
        self.closed = closed
        # node string -> (symbols tuple, edges list of len(symbols)+1)
        self._cache: dict[str, tuple[tuple[str, ...], list[float]]] = {}
        self._children_cache: dict[str, list[tuple[str, Interval]]] = {}

    @property
    def terminator(self) -> str:
        return self.model.alphabet.terminator

    def _check_open(self) -> None:
        if self.closed:
            raise TreeClosedError("entry already finished")

    def _is_terminated(self, s: str) -> bool:
        return s.endswith(self.terminator)

    def _expand(self, s: str) -> tuple[tuple[str, ...], list[float]]:
        """Child symbols and interior edges of node ``s`` (relative coords)."""
        cached = self._cache.get(s)
        if cached is not None:
            return cached
        parent = self.interval_of(s)
        dist = self.model.next_symbol_distribution(self.committed_prefix + s)
        edges = [parent.lo]
        acc = parent.lo
        width = parent.length
        for p in dist:
            acc += width * float(p)
            edges.append(acc)
        edges[-1] = parent.hi  # snap: children exactly tile the parent
        entry = (self.model.alphabet.ordered, edges)
        self._cache[s] = entry
        return entry

    def children(self, s: str) -> list[tuple[str, Interval]]:
        """Ordered (symbol, interval) pairs tiling the interval of ``s``."""
        self._check_open()
        if self._is_terminated(s):
            return []
        cached = self._children_cache.get(s)
        if cached is not None:
            return cached
        symbols, edges = self._expand(s)
        out = [
            (sym, Interval(edges[i], edges[i + 1], self.committed_prefix))
            for i, sym in enumerate(symbols)
        ]
        self._children_cache[s] = out
        return out

    def interval_of(self, s: str) -> Interval:
        """Interval of ``s`` relative to the committed prefix."""
        self._check_open()
        if s == "":
            return Interval(0.0, 1.0, self.committed_prefix)
        if self.terminator in s[:-1]:
            raise InvalidStringError("terminator in interior of string")
        parent = s[:-1]
        symbols, edges = self._expand(parent)
        idx = self.model.alphabet.index(s[-1])
        return Interval(edges[idx], edges[idx + 1], self.committed_prefix)

    def locate(self, x: float, depth: int) -> str:
        """String of length <= depth whose interval contains ``x``.

        Descends child intervals; stops early at an end-of-entry symbol.
        """
        self._check_open()
        if not (0.0 <= x < 1.0):
            raise ValueError("x must be in [0, 1)")
        s = ""
        for _ in range(depth):
            if self.interval_of(s).length < 1e-12:
                break  # below float resolution; stop rather than emit noise
            symbols, edges = self._expand(s)
            idx = min(bisect_right(edges, x) - 1, len(symbols) - 1)
            idx = max(idx, 0)
            s += symbols[idx]
            if symbols[idx] == self.terminator:
                break
        return s

    def rescale_after_commit(self, symbol: str) -> "CodeTree":
        """Commit a first-generation symbol; its interval becomes [0,1)."""
        self._check_open()
        if symbol not in self.model.alphabet.ordered:
            raise InvalidStringError(f"symbol {symbol!r} not in alphabet")
        return CodeTree(
            self.model,
            self.committed_prefix + symbol,
            closed=(symbol == self.terminator),
        )

    def undo_last(self) -> "CodeTree":
        """Drop the most recently committed symbol."""
        if not self.committed_prefix:
            raise InvalidStringError("nothing committed yet")
        return CodeTree(self.model, self.committed_prefix[:-1], closed=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CodeTree):
            return NotImplemented
        return (
            self.model is other.model
            and self.committed_prefix == other.committed_prefix
            and self.closed == other.closed
        )

    def __hash__(self) -> int:
        return hash((id(self.model), self.committed_prefix, self.closed))
