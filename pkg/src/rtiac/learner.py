"""Learning the map from user actions to intended display points.

Training data are (y, features, display target) triples harvested from
session logs: for every tick of a segment that ended in a commit, the
committed symbol's transformed coordinate under that tick's belief is
paired with the action-window features.  Working in the transformed
coordinate makes the pairs near-stationary, so data from any stage of a
session can be pooled.

Two estimators are built from the pairs:

* ``KdeEstimator``        nonparametric product-Gaussian KDE of the
  (y, features) joint, reweighted by the y-marginal so the implied
  marginal over y is flat; offline evaluator
* ``ParametricEstimator`` linear map features -> display point plus a
  log-linear variance model; this is what the live update rule consumes

Symmetries (display reflections, rotations) are imposed by weighted
mirror augmentation and can be annealed away as real data accumulates.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import digamma

from .actions import Features
from .belief import UNDO
from .coder import CodeTree
from .langmodel import NGramModel

log = logging.getLogger(__name__)

FEATURE_SPEC = "cursor6-v1"  # (mean_pos, mean_vel, last_pos)
FEATURE_DIM = 6
KDE_GRID = 256
KDE_REFRESH_EVERY = 500
RIDGE = 1e-6
#: Annealing refits only when lambda moved at least this much.
REFIT_DELTA = 0.05


@dataclass(frozen=True)
class TrainingPair:
    """One tick's evidence: where the user aimed, what they meant."""

    y_final: float
    features: np.ndarray
    display_target: np.ndarray
    tick: int = 0
    session: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", np.asarray(self.features, dtype=float))
        object.__setattr__(self, "display_target",
                          np.asarray(self.display_target, dtype=float))
        if not 0.0 <= self.y_final < 1.0:
            raise ValueError(f"y_final {self.y_final} outside [0,1)")
        if self.features.shape != (FEATURE_DIM,):
            raise ValueError(f"features must have dimension {FEATURE_DIM}")


# -- symmetries ----------------------------------------------------------


@dataclass(frozen=True)
class ReflectionSymmetry:
    """Mirror of the unit display; 'vertical' flips y, 'horizontal' flips x."""

    axis: str = "vertical"

    def __post_init__(self) -> None:
        if self.axis not in ("vertical", "horizontal"):
            raise ValueError(f"unknown reflection axis {self.axis!r}")

    def _flip(self) -> int:
        return 1 if self.axis == "vertical" else 0

    def apply_point(self, p: np.ndarray) -> np.ndarray:
        q = np.array(p, dtype=float, copy=True)
        q[..., self._flip()] = 1.0 - q[..., self._flip()]
        return q

    def apply_velocity(self, v: np.ndarray) -> np.ndarray:
        q = np.array(v, dtype=float, copy=True)
        q[..., self._flip()] *= -1.0
        return q

    def variants(self, feats: np.ndarray, targets: np.ndarray
                 ) -> list[tuple[np.ndarray, np.ndarray]]:
        f = np.array(feats, copy=True)
        f[..., 0:2] = self.apply_point(f[..., 0:2])
        f[..., 2:4] = self.apply_velocity(f[..., 2:4])
        f[..., 4:6] = self.apply_point(f[..., 4:6])
        return [(f, self.apply_point(targets))]

    def to_json(self) -> dict:
        return {"kind": "reflection", "axis": self.axis}


@dataclass(frozen=True)
class RotationSymmetry:
    """n-fold rotational symmetry about the display center."""

    n_fold: int = 8
    center: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self) -> None:
        if self.n_fold < 2:
            raise ValueError("n_fold must be >= 2")

    def _rotate(self, p: np.ndarray, k: int, about_center: bool) -> np.ndarray:
        ang = 2.0 * math.pi * k / self.n_fold
        rot = np.array([[math.cos(ang), -math.sin(ang)],
                        [math.sin(ang), math.cos(ang)]])
        q = np.asarray(p, dtype=float)
        if about_center:
            return (q - self.center) @ rot.T + self.center
        return q @ rot.T

    def variants(self, feats: np.ndarray, targets: np.ndarray
                 ) -> list[tuple[np.ndarray, np.ndarray]]:
        out = []
        for k in range(1, self.n_fold):
            f = np.array(feats, copy=True)
            f[..., 0:2] = self._rotate(f[..., 0:2], k, True)
            f[..., 2:4] = self._rotate(f[..., 2:4], k, False)
            f[..., 4:6] = self._rotate(f[..., 4:6], k, True)
            out.append((f, self._rotate(targets, k, True)))
        return out

    def to_json(self) -> dict:
        return {"kind": "rotation", "n_fold": self.n_fold, "center": list(self.center)}


Symmetry = Union[ReflectionSymmetry, RotationSymmetry]


def symmetry_from_json(doc: Optional[dict]) -> Optional[Symmetry]:
    if doc is None:
        return None
    if doc["kind"] == "reflection":
        return ReflectionSymmetry(axis=doc["axis"])
    if doc["kind"] == "rotation":
        return RotationSymmetry(n_fold=doc["n_fold"],
                                center=tuple(doc.get("center", (0.5, 0.5))))
    raise ValueError(f"unknown symmetry kind {doc['kind']!r}")


# -- parametric estimator ------------------------------------------------


@dataclass(frozen=True)
class ParametricEstimator:
    """Linear pointing model: center = A f + b, variance = exp(w f + c)."""

    A: np.ndarray
    b: np.ndarray
    sigma_w: np.ndarray
    sigma_c: float
    symmetry: Optional[Symmetry] = None
    lam: float = 0.0
    pairs: tuple[TrainingPair, ...] = field(default=(), repr=False, compare=False)

    def predict(self, features: Features) -> tuple[np.ndarray, float]:
        f = features.as_vector()
        return self.A @ f + self.b, float(np.exp(self.sigma_w @ f + self.sigma_c))

    def predict_vector(self, f: np.ndarray) -> np.ndarray:
        return np.asarray(f) @ self.A.T + self.b

    def variance_vector(self, f: np.ndarray) -> np.ndarray:
        return np.exp(np.asarray(f) @ self.sigma_w + self.sigma_c)

    def to_json(self) -> dict:
        return {
            "version": 1,
            "feature_spec": FEATURE_SPEC,
            "A": self.A.tolist(),
            "b": self.b.tolist(),
            "sigma_weights": self.sigma_w.tolist(),
            "sigma_intercept": self.sigma_c,
            "symmetry": self.symmetry.to_json() if self.symmetry else None,
            "lambda": self.lam,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ParametricEstimator":
        if doc.get("feature_spec") != FEATURE_SPEC:
            raise ValueError(f"unsupported feature spec {doc.get('feature_spec')!r}")
        return cls(
            A=np.asarray(doc["A"], dtype=float),
            b=np.asarray(doc["b"], dtype=float),
            sigma_w=np.asarray(doc["sigma_weights"], dtype=float),
            sigma_c=float(doc["sigma_intercept"]),
            symmetry=symmetry_from_json(doc.get("symmetry")),
            lam=float(doc.get("lambda", 0.0)),
        )

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ParametricEstimator":
        return cls.from_json(json.loads(Path(path).read_text()))


def fit_parametric(
    pairs: Sequence[TrainingPair],
    symmetry: Optional[Symmetry] = None,
    lam: float = 0.0,
) -> ParametricEstimator:
    """Least-squares pointing model with weighted symmetry augmentation.

    Each pair contributes its mirrored images at weight ``lam``; at
    lam=1 the fit commutes with the symmetry exactly, at lam=0 it is
    unconstrained.  The variance model regresses log squared residual
    norms on the features, with the chi-square log-mean bias removed
    from the intercept.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lam must be in [0, 1]")
    if len(pairs) < FEATURE_DIM + 1:
        raise ValueError(f"need at least {FEATURE_DIM + 1} pairs, got {len(pairs)}")
    feats = np.array([p.features for p in pairs])
    targets = np.array([p.display_target for p in pairs])
    weights = np.ones(len(pairs))
    if symmetry is not None and lam > 0.0:
        blocks_f, blocks_t, blocks_w = [feats], [targets], [weights]
        for f_m, t_m in symmetry.variants(feats, targets):
            blocks_f.append(f_m)
            blocks_t.append(t_m)
            blocks_w.append(np.full(len(pairs), lam))
        feats = np.concatenate(blocks_f)
        targets = np.concatenate(blocks_t)
        weights = np.concatenate(blocks_w)

    x = np.hstack([feats, np.ones((len(feats), 1))])
    sw = np.sqrt(weights)[:, None]
    beta = _solve_ls(x * sw, targets * sw)  # (7, 2)
    a_mat = beta[:FEATURE_DIM].T
    b_vec = beta[FEATURE_DIM]

    resid = targets - (feats @ a_mat.T + b_vec)
    s = np.maximum(np.sum(resid * resid, axis=1), 1e-300)
    gamma = _solve_ls(x * sw, (np.log(s) * np.sqrt(weights))[:, None])[:, 0]
    # E[log chi^2_2] = digamma(1) + log 2; remove it so exp() estimates
    # the per-coordinate variance, not the mean log squared norm
    sigma_w = gamma[:FEATURE_DIM]
    sigma_c = float(gamma[FEATURE_DIM] - (digamma(1.0) + math.log(2.0)))

    return ParametricEstimator(A=a_mat, b=b_vec, sigma_w=sigma_w, sigma_c=sigma_c,
                               symmetry=symmetry, lam=lam, pairs=tuple(pairs))


def _solve_ls(x: np.ndarray, t: np.ndarray) -> np.ndarray:
    beta, _, rank, _ = np.linalg.lstsq(x, t, rcond=None)
    if rank < x.shape[1]:
        log.warning("rank-deficient design (%d/%d); ridge fallback", rank, x.shape[1])
        beta = np.linalg.solve(x.T @ x + RIDGE * np.eye(x.shape[1]), x.T @ t)
    return beta


def anneal(
    estimator: ParametricEstimator,
    schedule: Callable[[int], float],
    tick: int,
) -> ParametricEstimator:
    """Move the symmetry weight along the schedule; refit when it matters.

    Small moves just record the new weight; moves beyond REFIT_DELTA
    rerun the fit with the stored pairs.  A deserialized estimator has
    no pairs and can only record the weight.
    """
    lam_new = float(np.clip(schedule(tick), 0.0, 1.0))
    if abs(lam_new - estimator.lam) <= REFIT_DELTA or not estimator.pairs:
        if abs(lam_new - estimator.lam) > REFIT_DELTA:
            log.warning("anneal refit skipped: estimator carries no training pairs")
        return replace(estimator, lam=lam_new)
    return fit_parametric(estimator.pairs, estimator.symmetry, lam_new)


def linear_anneal_schedule(total_ticks: int) -> Callable[[int], float]:
    """Weight 1 at tick 0 falling linearly to 0 at ``total_ticks``."""
    def schedule(tick: int) -> float:
        return max(0.0, 1.0 - tick / total_ticks)
    return schedule


# -- nonparametric estimator ---------------------------------------------


class KdeEstimator:
    """Product-Gaussian KDE of the (y, features) joint, reweighted in y.

    The conditional density over y for given features divides the joint
    by the y-marginal before normalizing, which flattens the estimator's
    implied y-marginal; without it, stretches of the session where the
    belief lingered would be over-represented.
    """

    def __init__(self, refresh_every: int = KDE_REFRESH_EVERY) -> None:
        self._y: list[float] = []
        self._f: list[np.ndarray] = []
        self._refresh_every = refresh_every
        self._bandwidths: Optional[np.ndarray] = None
        self._last_refresh = 0

    @property
    def n(self) -> int:
        return len(self._y)

    def add_pairs(self, pairs: Sequence[TrainingPair]) -> None:
        for p in pairs:
            self._y.append(p.y_final)
            self._f.append(p.features)
        if self._bandwidths is None or \
                self.n - self._last_refresh >= self._refresh_every:
            self._refresh_bandwidths()

    def _refresh_bandwidths(self) -> None:
        if self.n == 0:
            return
        if self.n == 1:
            # no spread to estimate from one point; a fixed width keeps
            # the single-kernel density well defined
            self._bandwidths = np.full(1 + FEATURE_DIM, 0.1)
            self._last_refresh = self.n
            return
        data = np.column_stack([np.array(self._y), np.array(self._f)])
        d = data.shape[1]
        sd = data.std(axis=0, ddof=1)
        if np.any(sd <= 0):
            raise ValueError("degenerate bandwidth: a dimension has zero spread")
        factor = (4.0 / (d + 2.0)) ** (1.0 / (d + 4.0)) * self.n ** (-1.0 / (d + 4.0))
        self._bandwidths = factor * sd
        self._last_refresh = self.n

    @property
    def bandwidths(self) -> np.ndarray:
        if self._bandwidths is None:
            raise ValueError("estimator has no samples")
        return self._bandwidths

    def conditional(
        self,
        features: np.ndarray,
        grid_size: int = KDE_GRID,
    ) -> tuple[np.ndarray, np.ndarray]:
        """(grid midpoints, density over y) for the given feature vector."""
        if self.n < 1:
            raise ValueError("estimator has no samples")
        if self.n < 10:
            log.warning("conditional queried with only %d samples", self.n)
        h = self.bandwidths
        ys = np.array(self._y)
        fs = np.array(self._f)
        f = np.asarray(features, dtype=float)

        # per-sample feature weights, computed in log space
        z = (fs - f[None, :]) / h[1:][None, :]
        lw = -0.5 * np.sum(z * z, axis=1) - np.sum(np.log(h[1:]))
        lw -= lw.max()
        w = np.exp(lw)

        grid = (np.arange(grid_size) + 0.5) / grid_size
        g = np.exp(-0.5 * ((grid[None, :] - ys[:, None]) / h[0]) ** 2)
        if self.n == 1:
            # reweighting cancels a lone kernel exactly; the plain
            # single-kernel density is the informative answer
            density = g[0]
        else:
            joint = w @ g          # ~ p_s(y, f) up to shared constants
            marginal = g.sum(axis=0)  # ~ p_s(y)
            density = joint / np.maximum(marginal, 1e-300)
        density = density / (density.sum() / grid_size)
        return grid, density

    def marginal_y(self, grid_size: int = KDE_GRID) -> tuple[np.ndarray, np.ndarray]:
        """KDE of the raw y-marginal (diagnostic; ideally near flat)."""
        if self.n < 2:
            raise ValueError("need at least 2 samples")
        ys = np.array(self._y)
        grid = (np.arange(grid_size) + 0.5) / grid_size
        dens = np.exp(-0.5 * ((grid[None, :] - ys[:, None]) / self.bandwidths[0]) ** 2
                      ).sum(axis=0)
        dens /= dens.sum() / grid_size
        return grid, dens

    def average_conditional(
        self,
        max_queries: int = 2000,
        grid_size: int = KDE_GRID,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Conditional density averaged over the samples' own features.

        The pointwise conditional at a single query is dominated by the
        handful of nearby samples; averaging over the feature
        distribution is the stable statement of what the conditional
        looks like overall.
        """
        h = self.bandwidths
        ys = np.array(self._y)
        fs = np.array(self._f)
        grid = (np.arange(grid_size) + 0.5) / grid_size
        g = np.exp(-0.5 * ((grid[None, :] - ys[:, None]) / h[0]) ** 2)
        marginal = g.sum(axis=0)
        m = min(max_queries, self.n)
        acc = np.zeros(grid_size)
        for s in range(0, m, 500):
            fq = fs[s:s + 500]
            z = (fq[:, None, :] - fs[None, :, :]) / h[1:][None, None, :]
            w = np.exp(-0.5 * np.sum(z * z, axis=2))
            dens = (w @ g) / marginal[None, :]
            dens /= dens.sum(axis=1, keepdims=True) / grid_size
            acc += dens.sum(axis=0)
        return grid, acc / m

    def reweighted_marginal(
        self,
        n_draws: int = 4000,
        rng: Optional[np.random.Generator] = None,
        grid_size: int = KDE_GRID,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Monte Carlo feature-marginal of the reweighted joint density.

        Integrating p_s(y, f) / p_s(y) over features gives exactly 1 for
        every y; the importance-sampled estimate (features drawn from
        the KDE's own feature marginal) should be flat up to Monte Carlo
        error.
        """
        if rng is None:
            rng = np.random.default_rng(0)
        h = self.bandwidths
        ys = np.array(self._y)
        fs = np.array(self._f)
        grid = (np.arange(grid_size) + 0.5) / grid_size
        norm_y = h[0] * math.sqrt(2.0 * math.pi)
        g = np.exp(-0.5 * ((grid[None, :] - ys[:, None]) / h[0]) ** 2) / norm_y
        ps_y = g.mean(axis=0)
        idx = rng.integers(0, self.n, size=n_draws)
        draws = fs[idx] + rng.normal(size=(n_draws, FEATURE_DIM)) * h[1:][None, :]
        out = np.zeros(grid_size)
        for s in range(0, n_draws, 500):
            fq = draws[s:s + 500]
            z = (fq[:, None, :] - fs[None, :, :]) / h[1:][None, None, :]
            lw = -0.5 * np.sum(z * z, axis=2)
            w = np.exp(lw)  # feature kernels up to a shared constant
            ps_f = w.mean(axis=1)
            joint = (w @ g) / self.n
            out += np.sum(joint / (ps_y[None, :] * np.maximum(ps_f, 1e-300)[:, None]),
                          axis=0)
        return grid, out / n_draws


# -- harvesting pairs from session logs ----------------------------------


def record_pairs(session) -> list[TrainingPair]:
    """Training pairs from one logged session.

    For each commit, every tick of the segment leading to it yields a
    pair: the committed region's mid-mass coordinate under that tick's
    belief, the tick's window features, and the display point of the
    region at that tick.  Ticks without cursor data are skipped.
    ``session`` is a replayed log (see session_log.SessionLog).
    """
    model = NGramModel.from_json(session.meta["model"])
    kind = session.meta.get("layout", "linear")
    pairs: list[TrainingPair] = []
    prev_tick = -1
    prefix = ""
    for commit in session.commits:
        symbol = commit["symbol"]
        tree = CodeTree(model, committed_prefix=prefix)
        for tick_rec in session.ticks_between(prev_tick, commit["tick"]):
            pair = _pair_from_tick(tick_rec, tree, symbol, kind, session.name)
            if pair is not None:
                pairs.append(pair)
        prev_tick = commit["tick"]
        prefix = commit["prefix_after"]
    return pairs


def _pair_from_tick(
    tick_rec: dict,
    tree: CodeTree,
    symbol: str,
    kind: str,
    session_name: str,
) -> Optional[TrainingPair]:
    feats = tick_rec.get("features")
    if feats is None:
        return None
    undo_w = tick_rec.get("undo_width", 0.0)
    if symbol == UNDO:
        lo, hi = 0.0, undo_w
        if hi <= lo:
            return None
    else:
        iv = tree.interval_of(symbol)
        lo = undo_w + (1.0 - undo_w) * iv.lo
        hi = undo_w + (1.0 - undo_w) * iv.hi
    edges = np.asarray(tick_rec["knots_x"])
    cum = np.asarray(tick_rec["knots_y"])
    y0, y1 = np.interp([lo, hi], edges, cum)
    y_sel = float((y0 + y1) / 2.0)
    q = float(tick_rec["gen1"].get(symbol, y1 - y0))
    return TrainingPair(
        y_final=min(y_sel, np.nextafter(1.0, 0.0)),
        features=np.asarray(feats, dtype=float),
        display_target=_target_point(kind, y_sel, q),
        tick=tick_rec["tick"],
        session=session_name,
    )


def _target_point(kind: str, y_sel: float, q: float) -> np.ndarray:
    """Display point of the selected region, mirroring layouts' position rule."""
    if kind == "circular":
        from .layouts import DISC_CENTER, DISC_RADIUS, radius_curve
        ang = 2.0 * math.pi * y_sel
        rho = 1.0 - float(radius_curve(q)) / 2.0
        return np.array([DISC_CENTER[0] + DISC_RADIUS * rho * math.cos(ang),
                         DISC_CENTER[1] + DISC_RADIUS * rho * math.sin(ang)])
    return np.array([1.0 - q / 2.0, y_sel])
