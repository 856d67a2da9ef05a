"""Frozen run configurations.

Every tunable constant that affects simulation results lives here so a
(config, seed) pair pins an experiment exactly.  The baseline's rate
constants were tuned once so a noise-free simulated user enters about
one symbol per 1.5 s on a 27-symbol alphabet, then frozen.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional


@dataclass(frozen=True)
class EngineConfig:
    """Adaptive engine: belief update, commits, layout, action window."""

    layout: str = "linear"
    tick_rate: float = 30.0
    commit_threshold: float = 0.99
    eps_undo: float = 0.02
    expand_mass: float = 0.05
    max_cell_depth: int = 4
    layout_depth: int = 2
    min_region_mass: float = 0.002
    window_horizon: float = 0.5
    sigma2_default: float = 0.05
    sigma2_min: float = 1e-4
    sigma2_max: float = 1.0

    @property
    def dt(self) -> float:
        return 1.0 / self.tick_rate

    def validate(self) -> "EngineConfig":
        if self.layout not in ("linear", "circular", "area", "tree", "scan"):
            raise ValueError(f"unknown layout {self.layout!r}")
        if not 0.5 < self.commit_threshold < 1.0:
            raise ValueError("commit_threshold must be in (0.5, 1)")
        if not 0.0 <= self.eps_undo < 0.5:
            raise ValueError("eps_undo must be in [0, 0.5)")
        if not 1.0 <= self.tick_rate <= 60.0:
            raise ValueError("tick_rate must be within [1, 60] Hz")
        return self


@dataclass(frozen=True)
class ScanConfig:
    """Timed single-action entry: indicator sweep plus press timing model."""

    speed: float = 0.25          # axis units per second
    timing_bias: float = 0.0     # seconds the model assumes presses lag
    timing_jitter: float = 0.1   # seconds of press-time spread
    window_width: float = 1.0


@dataclass(frozen=True)
class BaselineConfig:
    """Fixed-navigation zooming baseline."""

    zoom_rate: float = 2.25      # width decay exponent per second at full deflection;
                                 # calibrated to ~1.5 s/symbol on a uniform 27-way model
    scroll_rate: float = 2.0     # view-relative scroll speed per second
    commit_coverage: float = 0.99
    uncommit_coverage: float = 0.5

    def validate(self) -> "BaselineConfig":
        if self.zoom_rate <= 0 or self.scroll_rate <= 0:
            raise ValueError("rates must be positive")
        if not 0.5 < self.commit_coverage <= 1.0:
            raise ValueError("commit_coverage must be in (0.5, 1]")
        if not 0.0 < self.uncommit_coverage < self.commit_coverage:
            raise ValueError("uncommit_coverage must be below commit_coverage")
        return self


@dataclass(frozen=True)
class SimConfig:
    """Closed-loop simulated sessions.

    The engine block freezes the constants used for comparative runs;
    display depth 4 lets the simulated user aim at deep region centers,
    which is what sustains multi-symbol commit cascades.
    """

    max_ticks: int = 20_000
    engine: EngineConfig = field(default_factory=lambda: EngineConfig(layout_depth=4))
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    scan: ScanConfig = field(default_factory=ScanConfig)
    log_dir: Optional[str] = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "SimConfig":
        return cls(
            max_ticks=doc.get("max_ticks", 20_000),
            engine=EngineConfig(**doc.get("engine", {})),
            baseline=BaselineConfig(**doc.get("baseline", {})),
            scan=ScanConfig(**doc.get("scan", {})),
            log_dir=doc.get("log_dir"),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)
