"""User actions and their conversion into belief-update parameters.

Raw events (cursor samples, button presses) are normalized into a
sliding window of the most recent W seconds.  Adapters then turn the
window into the quantities the belief update consumes:

* ``continuous_adapter``  cursor pointing -> Gaussian kernel in display
  space, either through a learned estimator or the identity default
* ``timed_adapter``       a press during a scanning sweep -> circular
  kernel at the indicator position, corrected for reaction-time bias
* ``discrete_adapter``    a press on one of K fixed buttons -> piecewise
  likelihood from a confusion matrix, applied as a Bayes factor

Windowing keeps the adapter inputs close to identically distributed, so
the learner can treat successive windows as samples from one pointing
model.
"""

from __future__ import annotations

import logging
import threading
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Protocol, Sequence

import numpy as np

from .belief import KernelParams
from .langmodel import ConfigurationError

log = logging.getLogger(__name__)

WINDOW_HORIZON = 0.5
SIGMA2_DEFAULT = 0.05
SIGMA2_MIN = 1e-4
SIGMA2_MAX = 1.0
#: Late events within this tolerance are re-sorted; later ones dropped.
OUT_OF_ORDER_TOL = 0.05
QUEUE_CAPACITY = 1024


@dataclass(frozen=True)
class ActionEvent:
    """One user action: a cursor sample or a button press/release."""

    t: float
    kind: str  # "cursor" | "press" | "release"
    x: Optional[float] = None
    y: Optional[float] = None
    action_id: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind == "cursor":
            if self.x is None or self.y is None:
                raise ValueError("cursor event requires x and y")
        elif self.kind in ("press", "release"):
            if self.action_id is None:
                raise ValueError(f"{self.kind} event requires action_id")
        else:
            raise ValueError(f"unknown event kind {self.kind!r}")

    @property
    def pos(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class Features:
    """Deterministic summary of a window's cursor trace."""

    mean_pos: np.ndarray
    mean_vel: np.ndarray
    last_pos: np.ndarray
    n_cursor: int
    last_press: Optional[int]

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.mean_pos, self.mean_vel, self.last_pos])

    @staticmethod
    def dim() -> int:
        return 6


@dataclass(frozen=True)
class ActionWindow:
    """Events from the most recent ``horizon`` seconds, oldest first."""

    horizon: float = WINDOW_HORIZON
    events: tuple[ActionEvent, ...] = ()

    @cached_property
    def features(self) -> Optional[Features]:
        """None until the window holds at least one cursor sample."""
        cursor = [e for e in self.events if e.kind == "cursor"]
        if not cursor:
            return None
        pts = np.array([[e.x, e.y] for e in cursor], dtype=float)
        span = cursor[-1].t - cursor[0].t
        vel = (pts[-1] - pts[0]) / span if span > 0 else np.zeros(2)
        presses = [e.action_id for e in self.events if e.kind == "press"]
        return Features(
            mean_pos=pts.mean(axis=0),
            mean_vel=vel,
            last_pos=pts[-1],
            n_cursor=len(cursor),
            last_press=presses[-1] if presses else None,
        )


def window_update(
    window: ActionWindow,
    event: Optional[ActionEvent],
    now: float,
    *,
    tolerance: float = OUT_OF_ORDER_TOL,
) -> ActionWindow:
    """Evict expired events and insert ``event`` (None = just evict).

    Events arriving more than ``tolerance`` behind the newest one are
    dropped; milder reordering is repaired by sorted insertion.
    """
    kept = [e for e in window.events if e.t > now - window.horizon]
    if event is not None:
        if event.t > now + 1e-9:
            raise ValueError(f"event at t={event.t} is ahead of now={now}")
        if kept and event.t < kept[-1].t - tolerance:
            log.warning("dropping event %.3f s out of order", kept[-1].t - event.t)
        elif event.t > now - window.horizon:
            kept.append(event)
            if len(kept) > 1 and kept[-2].t > event.t:
                kept.sort(key=lambda e: e.t)
    return ActionWindow(window.horizon, tuple(kept))


class EventQueue:
    """Thread-safe bounded event buffer; overflow drops the oldest."""

    def __init__(self, capacity: int = QUEUE_CAPACITY) -> None:
        self._dq: deque[ActionEvent] = deque()
        self._capacity = capacity
        self._lock = threading.Lock()
        self.dropped = 0

    def push(self, event: ActionEvent) -> bool:
        with self._lock:
            if len(self._dq) >= self._capacity:
                self._dq.popleft()
                self.dropped += 1
                log.warning("event queue full; oldest event dropped (%d total)",
                            self.dropped)
                self._dq.append(event)
                return False
            self._dq.append(event)
            return True

    def drain(self) -> list[ActionEvent]:
        with self._lock:
            out = list(self._dq)
            self._dq.clear()
        return out

    def __len__(self) -> int:
        with self._lock:
            return len(self._dq)


# -- adapters ------------------------------------------------------------


class PointingEstimator(Protocol):
    """Maps window features to a kernel center and variance."""

    def predict(self, features: Features) -> tuple[np.ndarray, float]: ...


def continuous_adapter(
    window: ActionWindow,
    estimator: Optional[PointingEstimator] = None,
    *,
    var_bounds: tuple[float, float] = (SIGMA2_MIN, SIGMA2_MAX),
) -> Optional[KernelParams]:
    """Kernel from the cursor trace; None while the window is empty.

    Without an estimator the cursor is trusted as-is: center at the mean
    position with the default variance.
    """
    feats = window.features
    if feats is None:
        return None
    if estimator is None:
        center, var = feats.mean_pos, SIGMA2_DEFAULT
    else:
        center, var = estimator.predict(feats)
    var = float(np.clip(var, *var_bounds))
    return KernelParams(center=np.asarray(center, dtype=float), variance=var)


def timed_adapter(
    press: ActionEvent,
    indicator: Optional[tuple[float, float]],
    timing_model: tuple[float, float],
    *,
    var_bounds: tuple[float, float] = (SIGMA2_MIN, SIGMA2_MAX),
) -> Optional[KernelParams]:
    """Kernel at the point the indicator occupied when the user meant to press.

    ``indicator`` is (position y_ind in [0,1), speed v in units/s); None
    means no scan is running and the press is ignored.  ``timing_model``
    is (bias mu, jitter sigma_t) in seconds.  The center rolls back the
    bias along the sweep; the variance is the jitter carried through the
    sweep speed.
    """
    if indicator is None:
        log.warning("press at t=%.3f outside a running scan; ignored", press.t)
        return None
    y_ind, speed = indicator
    if speed <= 0:
        raise ValueError("scan speed must be positive")
    mu, sigma_t = timing_model
    center = (y_ind - speed * mu) % 1.0
    var = float(np.clip((speed * sigma_t) ** 2, *var_bounds))
    return KernelParams(center=np.array([center]), variance=var, metric="circular")


@dataclass(frozen=True)
class PiecewiseLikelihood:
    """L(x) constant on each partition piece; feeds the Bayes update."""

    breakpoints: np.ndarray  # interior edges, ascending, within (0,1)
    values: np.ndarray       # one per piece, len(breakpoints) + 1

    def __call__(self, x) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float),
                              side="right")
        return self.values[idx]


def discrete_adapter(
    press: ActionEvent,
    partition: Sequence[float],
    confusion: np.ndarray,
) -> PiecewiseLikelihood:
    """Likelihood of the press under each partition subset.

    ``partition`` lists the subset edges 0 = b_0 < ... < b_K = 1;
    ``confusion[j][i]`` is the probability of pressing i when the target
    lies in subset j (each row a distribution over presses).  The
    likelihood of the observed press as a function of the subset is the
    press's column, so a press raises subset probabilities without ever
    zeroing the rest (for any strictly positive column).
    """
    edges = np.asarray(partition, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or edges[0] != 0.0 or edges[-1] != 1.0 \
            or np.any(np.diff(edges) <= 0):
        raise ConfigurationError("partition must be ascending edges from 0.0 to 1.0")
    conf = np.asarray(confusion, dtype=float)
    k = len(edges) - 1
    if conf.shape != (k, k):
        raise ConfigurationError(f"confusion must be {k}x{k} for {k} subsets")
    if np.any(conf < 0) or np.any(np.abs(conf.sum(axis=1) - 1.0) > 1e-12):
        raise ConfigurationError("confusion rows must be nonnegative and sum to 1")
    pressed = press.action_id
    if pressed is None or not 0 <= pressed < k:
        raise ConfigurationError(f"press action_id {pressed!r} outside partition range")
    return PiecewiseLikelihood(breakpoints=edges[1:-1], values=conf[:, pressed].copy())
