"""Evolving belief over the unit interval.

The belief is a piecewise-constant density whose cells follow the
interval map's nodes, refined adaptively where probability concentrates.
Each tick the density moves by an explicit Euler step of

    d/dt p(x) = K(x) / integral(K) - 1,
    K(x) = exp(-dist(r(x), center)^2 / (2 sigma^2)),

evaluated by midpoint quadrature on the cells, then floored and
renormalized.  The same quadrature defines the normalizer, so the raw
increment conserves mass to machine precision.

When at least one symbol has been committed, a sliver at the left edge
of the axis represents "the last commit was wrong"; selecting it deletes
the last symbol.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .coder import CodeTree

log = logging.getLogger(__name__)

#: Pseudo-symbol labelling the delete-last-symbol branch.
UNDO = "\b"

EPS_FLOOR = 1e-6
#: Nodes narrower than this are never subdivided (float-resolution guard).
MIN_CELL_WIDTH = 1e-9


@dataclass(frozen=True)
class KernelParams:
    """Center and spread of the update kernel in display space.

    ``center`` is a point of the display space (2-vector for planar
    layouts, scalar for the circular selection axis); ``metric`` picks
    the distance: straight-line, or wraparound on the unit circle.
    """

    center: np.ndarray
    variance: float
    metric: str = "euclidean"  # "euclidean" | "circular"

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", np.atleast_1d(np.asarray(self.center, dtype=float)))
        if not (np.isfinite(self.variance) and self.variance > 0):
            raise ValueError("variance must be positive and finite")

    def distance_sq(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.metric == "circular":
            d = np.abs(pts.reshape(-1) - self.center[0]) % 1.0
            d = np.minimum(d, 1.0 - d)
            return d * d
        if pts.ndim == 1:
            pts = pts[:, None]
        diff = pts - self.center[None, :]
        return np.sum(diff * diff, axis=1)


@dataclass(frozen=True)
class BeliefState:
    """Piecewise-constant density on [0,1); cells tagged with map nodes.

    ``edges`` has one more entry than ``density``; cell i covers
    [edges[i], edges[i+1]).  ``prefixes[i]`` names the interval-map node
    the cell belongs to (relative to the committed prefix), or ``UNDO``
    for the delete branch.  ``undo_width`` is the axis width of the
    delete sliver (0 when nothing can be deleted); the rest of the axis
    is the map's [0,1) squeezed affinely into [undo_width, 1).
    """

    edges: np.ndarray
    density: np.ndarray
    prefixes: tuple[str, ...]
    tick: int = 0
    undo_width: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=float))
        object.__setattr__(self, "density", np.asarray(self.density, dtype=float))

    @property
    def n_cells(self) -> int:
        return len(self.density)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def masses(self) -> np.ndarray:
        return self.widths * self.density

    @property
    def mids(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def total_mass(self) -> float:
        return float(np.sum(self.masses))

    def cdf_knots(self) -> tuple[np.ndarray, np.ndarray]:
        """(x, y) knots of the piecewise-linear belief CDF."""
        cum = np.concatenate(([0.0], np.cumsum(self.masses)))
        return self.edges, cum

    # -- axis <-> map coordinates ---------------------------------------

    def to_axis(self, tree_x):
        return self.undo_width + (1.0 - self.undo_width) * np.asarray(tree_x, dtype=float)

    def to_tree(self, axis_x):
        return (np.asarray(axis_x, dtype=float) - self.undo_width) / (1.0 - self.undo_width)

    # -- aggregates ------------------------------------------------------

    def mass_between(self, lo: float, hi: float) -> float:
        edges, cum = self.cdf_knots()
        return float(np.interp(hi, edges, cum) - np.interp(lo, edges, cum))

    def first_generation_masses(self) -> dict[str, float]:
        """Belief mass per first-generation symbol (and the delete branch)."""
        out: dict[str, float] = {}
        for mass, prefix in zip(self.masses, self.prefixes):
            key = UNDO if prefix == UNDO else (prefix[0] if prefix else "")
            out[key] = out.get(key, 0.0) + float(mass)
        return out


def initial_belief(tree: CodeTree) -> BeliefState:
    """Prior belief: uniform density, cells at the first generation."""
    kids = tree.children("")
    edges = np.array([iv.lo for _, iv in kids] + [kids[-1][1].hi])
    return BeliefState(
        edges=edges,
        density=np.ones(len(kids)),
        prefixes=tuple(sym for sym, _ in kids),
    )


# -- kernel update ------------------------------------------------------


def euler_increment(
    belief: BeliefState,
    kernel: KernelParams,
    position_map: Callable[[np.ndarray], np.ndarray],
) -> Optional[np.ndarray]:
    """Per-cell rate of change of the density; None if the kernel is unusable.

    The normalizer uses the same midpoint quadrature as the caller, so
    ``sum(widths * increment)`` vanishes analytically.
    """
    positions = np.asarray(position_map(belief.mids), dtype=float)
    k = np.exp(-kernel.distance_sq(positions) / (2.0 * kernel.variance))
    if not np.all(np.isfinite(k)):
        log.warning("non-finite kernel values at tick %d; update skipped", belief.tick)
        return None
    if k.max() == k.min():
        return np.zeros_like(k)  # flat kernel: rate is identically zero
    z = float(np.sum(belief.widths * k))
    if z <= 0.0:
        return np.zeros_like(k)  # kernel underflowed everywhere: no evidence
    return k / z - 1.0


def step(
    belief: BeliefState,
    kernel: KernelParams,
    position_map: Callable[[np.ndarray], np.ndarray],
    dt: float,
    *,
    dt_max: float = 1.0 / 30.0,
    floor: float = EPS_FLOOR,
) -> BeliefState:
    """One Euler step of the kernel rule, floored and renormalized."""
    if not 0.0 < dt <= dt_max + 1e-12:
        raise ValueError(f"dt={dt} outside (0, {dt_max}]")
    rate = euler_increment(belief, kernel, position_map)
    if rate is None or not rate.any():
        return replace(belief, tick=belief.tick + 1)
    density = np.maximum(belief.density + dt * rate, floor)
    density = density / np.sum(belief.widths * density)
    return replace(belief, density=density, tick=belief.tick + 1)


# -- transformed coordinate ---------------------------------------------


def transform_y(belief: BeliefState, x):
    """Belief CDF: the coordinate in which the current belief is uniform."""
    edges, cum = belief.cdf_knots()
    return np.interp(x, edges, cum)


def inverse_transform_y(belief: BeliefState, y):
    """Inverse of :func:`transform_y` (exists because density > 0)."""
    edges, cum = belief.cdf_knots()
    return np.interp(y, cum, edges)


# -- discrete-action likelihood update ----------------------------------


def bayes_update(
    belief: BeliefState,
    breakpoints: np.ndarray,
    likelihood: np.ndarray,
    *,
    floor: float = EPS_FLOOR,
) -> BeliefState:
    """Multiply by a piecewise-constant likelihood and renormalize.

    ``breakpoints`` are the interior edges of the likelihood pieces on
    [0,1); cells are split there so the product is exact.
    """
    breakpoints = np.asarray(breakpoints, dtype=float)
    cut = np.unique(np.concatenate((belief.edges, breakpoints)))
    cut = cut[(cut >= belief.edges[0]) & (cut <= belief.edges[-1])]
    # carry density and prefixes onto the refined grid
    src = np.searchsorted(belief.edges, cut[:-1], side="right") - 1
    src = np.clip(src, 0, belief.n_cells - 1)
    density = belief.density[src]
    prefixes = tuple(belief.prefixes[i] for i in src)
    piece = np.clip(np.searchsorted(np.concatenate(([0.0], breakpoints, [1.0])),
                                    0.5 * (cut[:-1] + cut[1:]), side="right") - 1,
                    0, len(likelihood) - 1)
    density = np.maximum(density * np.asarray(likelihood, dtype=float)[piece], floor)
    widths = np.diff(cut)
    density = density / np.sum(widths * density)
    return BeliefState(cut, density, prefixes, belief.tick, belief.undo_width)


# -- commits -------------------------------------------------------------


def commit_check(belief: BeliefState, tree: CodeTree, threshold: float) -> Optional[str]:
    """First-generation symbol (or UNDO) holding at least ``threshold`` mass."""
    if not 0.5 < threshold < 1.0:
        raise ValueError("threshold must be in (0.5, 1)")
    for key, mass in belief.first_generation_masses().items():
        if key and mass >= threshold:
            return key
    return None


def apply_commit(
    belief: BeliefState,
    tree: CodeTree,
    symbol: str,
    *,
    eps_undo: float = 0.02,
    floor: float = EPS_FLOOR,
) -> tuple[BeliefState, CodeTree]:
    """Commit ``symbol``: rescale the map and condition the belief on it.

    The conditioned belief keeps its shape inside the committed subtree;
    a fraction ``eps_undo`` of mass is moved to the delete sliver at the
    left edge (width equal to its mass, so it starts at density 1).
    """
    new_tree = tree.rescale_after_commit(symbol)
    if new_tree.closed:
        return initial_belief(tree), new_tree  # belief is moot once finished

    keep = [i for i, p in enumerate(belief.prefixes) if p != UNDO and p.startswith(symbol)]
    if not keep:
        raise ValueError(f"no belief cells under committed symbol {symbol!r}")
    lo = belief.edges[keep[0]]
    hi = belief.edges[keep[-1] + 1]
    sub_edges = belief.edges[keep[0]:keep[-1] + 2]
    sub_mass = belief.masses[keep]
    total = float(np.sum(sub_mass))

    undo_w = eps_undo if eps_undo > 0 else 0.0
    new_edges = undo_w + (1.0 - undo_w) * (sub_edges - lo) / (hi - lo)
    widths = np.diff(new_edges)
    density = (sub_mass / total) * (1.0 - undo_w) / widths
    prefixes = tuple(belief.prefixes[i][1:] for i in keep)

    if undo_w > 0:
        new_edges = np.concatenate(([0.0], new_edges))
        density = np.concatenate(([1.0], density))
        prefixes = (UNDO,) + prefixes
    new_edges[0] = 0.0
    new_edges[-1] = 1.0

    out = BeliefState(new_edges, np.maximum(density, floor), prefixes,
                      belief.tick, undo_w)
    return _renormalized(out), new_tree


def apply_undo(
    belief: BeliefState,
    tree: CodeTree,
    *,
    eps_undo: float = 0.02,
) -> tuple[BeliefState, CodeTree]:
    """Delete the last committed symbol and reset to the prior belief."""
    new_tree = tree.undo_last()
    fresh = initial_belief(new_tree)
    if new_tree.committed_prefix and eps_undo > 0:
        fresh = _with_undo_sliver(fresh, eps_undo)
    return replace(fresh, tick=belief.tick), new_tree


def _with_undo_sliver(belief: BeliefState, eps_undo: float) -> BeliefState:
    edges = eps_undo + (1.0 - eps_undo) * belief.edges
    edges = np.concatenate(([0.0], edges))
    edges[1] = eps_undo
    edges[-1] = 1.0
    density = np.concatenate(([1.0], belief.density))
    return BeliefState(edges, density, (UNDO,) + belief.prefixes,
                       belief.tick, eps_undo)


def _renormalized(belief: BeliefState) -> BeliefState:
    total = belief.total_mass()
    if abs(total - 1.0) < 1e-15:
        return belief
    return replace(belief, density=belief.density / total)


# -- adaptive cell structure ---------------------------------------------


def adapt_cells(
    belief: BeliefState,
    tree: CodeTree,
    *,
    expand_mass: float = 0.05,
    max_depth: int = 4,
    floor: float = EPS_FLOOR,
) -> BeliefState:
    """Re-cell the belief: subdivide nodes holding mass, merge the rest.

    A node is split one generation deeper while its mass exceeds
    ``expand_mass``, down to ``max_depth`` generations; masses are
    carried over exactly (the old density is integrated over the new
    cells).
    """
    edges_old, cum = belief.cdf_knots()
    w = belief.undo_width

    leaves: list[tuple[str, float, float]] = []  # (prefix, axis lo, axis hi)

    def walk(prefix: str, depth: int, lo: float, hi: float,
             length: float, mass: float) -> None:
        expandable = (
            depth < max_depth
            and not prefix.endswith(tree.terminator)
            and length > MIN_CELL_WIDTH
            and (depth == 0 or mass > expand_mass)
        )
        if not expandable:
            leaves.append((prefix, lo, hi))
            return
        kids = tree.children(prefix)
        cuts = np.empty(len(kids) + 1)
        cuts[0] = w + (1.0 - w) * kids[0][1].lo
        for i, (_, iv) in enumerate(kids):
            cuts[i + 1] = w + (1.0 - w) * iv.hi
        masses = np.diff(np.interp(cuts, edges_old, cum))
        for i, (sym, iv) in enumerate(kids):
            walk(prefix + sym, depth + 1, float(cuts[i]), float(cuts[i + 1]),
                 iv.length, float(masses[i]))

    walk("", 0, w, 1.0, 1.0, 1.0)

    new_edges = [0.0, leaves[0][1]] if w > 0 else [leaves[0][1]]
    prefixes: list[str] = [UNDO] if w > 0 else []
    for prefix, _, hi in leaves:
        prefixes.append(prefix)
        new_edges.append(hi)
    edges = np.array(new_edges)
    edges[0] = 0.0
    edges[-1] = 1.0
    cell_mass = np.diff(np.interp(edges, edges_old, cum))
    density = np.maximum(cell_mass / np.diff(edges), floor)
    out = BeliefState(edges, density, tuple(prefixes), belief.tick, w)
    return _renormalized(out)
