"""Closed-loop entry engine: actions in, frames and commits out.

One tick: drain queued action events into the rolling window, turn them
into an evidence kernel, advance the belief one Euler step against the
frame the user was actually looking at, re-cell, then settle commits.
Scan mode replaces the cursor kernel with press-timing evidence applied
multiplicatively, since a press is an instantaneous observation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Iterable, List, Optional

import numpy as np

from .actions import (
    ActionEvent,
    ActionWindow,
    Features,
    PointingEstimator,
    continuous_adapter,
    timed_adapter,
    window_update,
)
from .belief import (
    UNDO,
    BeliefState,
    KernelParams,
    adapt_cells,
    apply_commit,
    apply_undo,
    bayes_update,
    commit_check,
    initial_belief,
    step,
    transform_y,
)
from .coder import CodeTree
from .config import EngineConfig, ScanConfig
from .langmodel import NGramModel
from .layouts import (
    LayoutFrame,
    display_position,
    circular_layout,
    linear_layout,
    prop_area_layout,
    scroll_window,
    tree_frame,
)

log = logging.getLogger(__name__)

MAX_COMMITS_PER_TICK = 8


@dataclass
class TickResult:
    frame: LayoutFrame
    committed: List[str]                 # symbols settled this tick; "\b" = undo
    kernel: Optional[KernelParams]
    features: Optional[Features]
    done: bool


class Engine:
    """Session state machine for one entry."""

    def __init__(
        self,
        model: NGramModel,
        config: Optional[EngineConfig] = None,
        *,
        estimator: Optional[PointingEstimator] = None,
        scan: Optional[ScanConfig] = None,
    ) -> None:
        self.config = (config or EngineConfig()).validate()
        self.scan = scan or ScanConfig()
        self.model = model
        self.estimator = estimator
        self.tree = CodeTree(model)
        self.belief = initial_belief(self.tree)
        self.belief = adapt_cells(
            self.belief, self.tree,
            expand_mass=self.config.expand_mass,
            max_depth=self.config.max_cell_depth,
        )
        self.window = ActionWindow(self.config.window_horizon)
        self.tick_index = 0
        self.scan_pos = 0.0
        self.undo_count = 0
        self._frame = self.render()

    # -- views -----------------------------------------------------------

    @property
    def text(self) -> str:
        return self.tree.committed_prefix

    @property
    def done(self) -> bool:
        return self.tree.closed

    @property
    def now(self) -> float:
        return self.tick_index * self.config.dt

    @property
    def frame(self) -> LayoutFrame:
        """The frame currently on screen (drawn after the last tick)."""
        return self._frame

    def render(self) -> LayoutFrame:
        cfg = self.config
        if cfg.layout == "linear":
            return linear_layout(self.belief, self.tree, cfg.layout_depth,
                                 min_mass=cfg.min_region_mass)
        if cfg.layout == "circular":
            return circular_layout(self.belief, self.tree, cfg.layout_depth,
                                   min_mass=cfg.min_region_mass)
        if cfg.layout == "area":
            return prop_area_layout(self.belief, None, self.tree,
                                    depth=cfg.layout_depth,
                                    min_mass=cfg.min_region_mass)
        if cfg.layout == "tree":
            return tree_frame(self.belief, self.tree, cfg.layout_depth)
        if cfg.layout == "scan":
            return scroll_window(self.belief, self.tree, self.scan.window_width,
                                 self.scan_pos, depth=cfg.layout_depth,
                                 min_mass=cfg.min_region_mass)
        raise ValueError(f"unknown layout {cfg.layout!r}")

    def position_map(self) -> Callable[[np.ndarray], np.ndarray]:
        """Axis coordinate -> display point under the on-screen frame."""
        frame = self._frame
        return lambda xs: display_position(frame, xs)

    # -- per-tick update -------------------------------------------------

    def tick(self, events: Iterable[ActionEvent] = ()) -> TickResult:
        if self.done:
            raise RuntimeError("entry already finished")
        cfg = self.config
        self.tick_index += 1
        now = self.now

        presses: List[ActionEvent] = []
        for ev in events:
            if ev.kind == "press":
                presses.append(ev)
            self.window = window_update(self.window, ev, now)
        self.window = window_update(self.window, None, now)

        kernel: Optional[KernelParams] = None
        if cfg.layout == "scan":
            prev_pos = self.scan_pos
            self.scan_pos = (self.scan_pos + self.scan.speed * cfg.dt) % 1.0
            for press in presses:
                kernel = self._apply_press(press, prev_pos, now)
        else:
            kernel = continuous_adapter(
                self.window, self.estimator,
                var_bounds=(cfg.sigma2_min, cfg.sigma2_max),
            )
            if kernel is not None:
                self.belief = step(self.belief, kernel, self.position_map(),
                                   cfg.dt, dt_max=cfg.dt)
            else:
                self.belief = replace(self.belief, tick=self.belief.tick + 1)

        self.belief = adapt_cells(self.belief, self.tree,
                                  expand_mass=cfg.expand_mass,
                                  max_depth=cfg.max_cell_depth)

        committed = self._settle_commits()
        features = self.window.features
        self._frame = self.render() if not self.done else self._frame
        return TickResult(self._frame, committed, kernel, features, self.done)

    def _apply_press(self, press: ActionEvent, prev_pos: float, now: float) -> Optional[KernelParams]:
        """Fold one press into the belief as a multiplicative likelihood."""
        v = self.scan.speed
        pos_at_press = (prev_pos - v * max(now - self.config.dt - press.t, 0.0)) % 1.0
        kernel = timed_adapter(
            press, (pos_at_press, v),
            (self.scan.timing_bias, self.scan.timing_jitter),
            var_bounds=(self.config.sigma2_min, self.config.sigma2_max),
        )
        if kernel is None:
            return None
        # likelihood per cell, evaluated at cell midpoints in sweep coordinates
        mids_y = transform_y(self.belief, self.belief.mids)
        lik = np.exp(-kernel.distance_sq(mids_y) / (2.0 * kernel.variance))
        self.belief = bayes_update(self.belief, self.belief.edges[1:-1], lik)
        return kernel

    def _settle_commits(self) -> List[str]:
        cfg = self.config
        out: List[str] = []
        for _ in range(MAX_COMMITS_PER_TICK):
            symbol = commit_check(self.belief, self.tree, cfg.commit_threshold)
            if symbol is None:
                break
            if symbol == UNDO:
                self.belief, self.tree = apply_undo(self.belief, self.tree,
                                                    eps_undo=cfg.eps_undo)
                self.undo_count += 1
                out.append(UNDO)
                self.window = ActionWindow(cfg.window_horizon)
                break  # fresh prior cannot clear the threshold again
            self.belief, self.tree = apply_commit(self.belief, self.tree, symbol,
                                                  eps_undo=cfg.eps_undo)
            out.append(symbol)
            self.window = ActionWindow(cfg.window_horizon)
            if self.done:
                break
            self.belief = adapt_cells(self.belief, self.tree,
                                      expand_mass=cfg.expand_mass,
                                      max_depth=cfg.max_cell_depth)
        return out
