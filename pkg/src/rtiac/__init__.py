"""Adaptive data entry by real-time navigation of a string-interval code.

The package turns noisy, low-rate user actions into text: a language
model assigns every candidate string an interval of [0, 1), a belief
density over that line absorbs evidence from cursor motion or press
timing, and the display continuously re-draws itself so that likely
strings are big and close.  A fixed-navigation zooming baseline and a
closed-loop simulator support side-by-side evaluation.
"""

from .actions import (
    ActionEvent,
    ActionWindow,
    EventQueue,
    Features,
    continuous_adapter,
    discrete_adapter,
    timed_adapter,
)
from .baseline import BaselineSession, ViewState, baseline_tick, dasher_step, new_baseline_session
from .belief import (
    BeliefState,
    KernelParams,
    adapt_cells,
    apply_commit,
    apply_undo,
    commit_check,
    initial_belief,
    step,
    transform_y,
)
from .coder import CodeTree, Interval
from .config import BaselineConfig, EngineConfig, ScanConfig, SimConfig
from .engine import Engine, TickResult
from .langmodel import Alphabet, NGramModel, ingest_corpus
from .layouts import (
    LayoutFrame,
    Region,
    circular_layout,
    display_position,
    folded_layout,
    linear_layout,
    prop_area_layout,
    scroll_window,
    tree_frame,
)
from .learner import (
    KdeEstimator,
    ParametricEstimator,
    ReflectionSymmetry,
    RotationSymmetry,
    TrainingPair,
    fit_parametric,
    record_pairs,
)
from .session_log import IdealEstimator, SessionWriter, read_session, replay
from .sim import MetricsRecord, SimulatedUser, run_session, sweep, tune_scan_speed

__version__ = "0.1.0"

__all__ = [
    "ActionEvent", "ActionWindow", "EventQueue", "Features",
    "continuous_adapter", "discrete_adapter", "timed_adapter",
    "BaselineSession", "ViewState", "baseline_tick", "dasher_step",
    "new_baseline_session",
    "BeliefState", "KernelParams", "adapt_cells", "apply_commit",
    "apply_undo", "commit_check", "initial_belief", "step", "transform_y",
    "CodeTree", "Interval",
    "BaselineConfig", "EngineConfig", "ScanConfig", "SimConfig",
    "Engine", "TickResult",
    "Alphabet", "NGramModel", "ingest_corpus",
    "LayoutFrame", "Region", "circular_layout", "display_position",
    "folded_layout", "linear_layout", "prop_area_layout", "scroll_window",
    "tree_frame",
    "KdeEstimator", "ParametricEstimator", "ReflectionSymmetry",
    "RotationSymmetry", "TrainingPair", "fit_parametric", "record_pairs",
    "IdealEstimator", "SessionWriter", "read_session", "replay",
    "MetricsRecord", "SimulatedUser", "run_session", "sweep",
    "tune_scan_speed",
    "__version__",
]
