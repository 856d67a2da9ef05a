"""Fixed-navigation zooming interface over the code line.

The comparison system: a cursor steers a view window over [0, 1).
Horizontal deflection zooms, vertical deflection scrolls, letter
boundaries come straight from the language model, and nothing adapts.
A commit fires when one first-generation interval fills the view;
zooming back out past a committed region reverses that commit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .coder import CodeTree, Interval
from .config import BaselineConfig

VIEW_MIN_WIDTH = 1e-12
MAX_CASCADE = 8


@dataclass(frozen=True)
class ViewState:
    """Current window [lo, hi) over the active code line.

    The window may extend outside [0, 1): zooming out past previously
    committed regions is how the user un-commits.
    """

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"empty view [{self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def point_at(self, cy: float) -> float:
        """Code-line point under normalized vertical deflection cy in [-1, 1]."""
        return self.lo + 0.5 * (cy + 1.0) * self.width


def initial_view() -> ViewState:
    return ViewState(0.0, 1.0)


def dasher_step(
    view: ViewState,
    cursor: Tuple[float, float],
    config: BaselineConfig,
    dt: float,
) -> ViewState:
    """Advance the view one tick under cursor deflection (cx, cy) in [-1, 1]^2.

    cx > 0 zooms in (width shrinks by exp(-zoom_rate * cx * dt)), cx < 0
    zooms out.  The zoom is anchored on the point under the cursor, so
    cy = 0 keeps the view center fixed.  cy scrolls the center toward
    the indicated side at a view-relative speed proportional to |cy|,
    so per-tick center displacement never exceeds scroll_rate * dt view
    widths.  A centered cursor leaves the view unchanged.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    cx = float(np.clip(cursor[0], -1.0, 1.0))
    cy = float(np.clip(cursor[1], -1.0, 1.0))
    if cx == 0.0 and cy == 0.0:
        return view

    lo, width = view.lo, view.width
    lo = lo + config.scroll_rate * cy * dt * width
    # zoom anchored on the indicated point: its relative position is preserved
    rel = 0.5 * (cy + 1.0)
    anchor = lo + rel * width
    width = max(width * float(np.exp(-config.zoom_rate * cx * dt)), VIEW_MIN_WIDTH)
    lo = anchor - rel * width
    return ViewState(lo, lo + width)


def coverage(iv: Interval, view: ViewState) -> float:
    """Fraction of the view covered by iv."""
    overlap = min(iv.hi, view.hi) - max(iv.lo, view.lo)
    return max(overlap, 0.0) / view.width


@dataclass
class BaselineSession:
    """View plus commit bookkeeping; the tree carries the committed prefix."""

    tree: CodeTree
    view: ViewState
    config: BaselineConfig

    @property
    def text(self) -> str:
        return self.tree.committed_prefix

    @property
    def done(self) -> bool:
        return self.tree.closed


def new_baseline_session(tree: CodeTree, config: Optional[BaselineConfig] = None) -> BaselineSession:
    return BaselineSession(tree=tree, view=initial_view(), config=(config or BaselineConfig()).validate())


def baseline_commit(session: BaselineSession) -> Optional[str]:
    """Settle one commit or un-commit; return its symbol, or None.

    Returns the committed symbol, or "\\b" when the view has zoomed back
    out past the last committed region.  On commit the view is remapped
    affinely into the child's coordinates, on un-commit back into the
    parent's, so the window keeps showing the same stretch of code line.
    """
    if session.done:
        return None
    view, cfg = session.view, session.config

    for symbol, iv in session.tree.children(""):
        if coverage(iv, view) >= cfg.commit_coverage:
            scale = 1.0 / iv.length
            lo = (view.lo - iv.lo) * scale
            session.view = ViewState(lo, lo + view.width * scale)
            session.tree = session.tree.rescale_after_commit(symbol)
            return symbol

    if session.text and coverage(Interval(0.0, 1.0), view) < cfg.uncommit_coverage:
        last = session.text[-1]
        session.tree = session.tree.undo_last()
        iv = session.tree.interval_of(last)
        lo = view.lo * iv.length + iv.lo
        session.view = ViewState(lo, lo + view.width * iv.length)
        return "\b"
    return None


def baseline_tick(
    session: BaselineSession,
    cursor: Tuple[float, float],
    dt: float,
) -> List[str]:
    """One closed-loop step: steer, then settle commits.

    Returns the symbols committed this tick ("\\b" marks an un-commit).
    Deep zooms can commit several generations at once; commits and
    un-commits cannot oscillate within a tick because a fresh commit
    leaves root coverage at the commit threshold or above.
    """
    session.view = dasher_step(session.view, cursor, session.config, dt)
    events: List[str] = []
    for _ in range(MAX_CASCADE):
        ev = baseline_commit(session)
        if ev is None:
            break
        events.append(ev)
        if ev == "\b":
            break
    return events
