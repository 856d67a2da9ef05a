"""Belief-to-geometry mappings.

Every layout turns a belief plus its interval map into a frame of
labelled regions whose sizes track belief mass, and exposes
``display_position``: the point on screen where a given axis coordinate
currently sits.  That function closes the loop with the kernel update,
which measures distances between user actions and display positions.

Layouts:

* ``linear_layout``     stack of right-anchored rectangles, height and
                        width both proportional to mass (area ~ p^2)
* ``circular_layout``   annular sectors on a disc, angle 2*pi*mass,
                        depth below the rim given by ``radius_curve``
* ``prop_area_layout``  rectangles of area exactly proportional to mass,
                        either a product grid of two independent beliefs
                        or one belief folded across alternating axes
* ``tree_layout``       force-directed node-link view of the hierarchy
* ``folded_layout``     the linear frame serpentined through columns
* ``scroll_window``     the linear frame seen through a sliding window,
                        selection indicator fixed at the window center
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .belief import UNDO, BeliefState, MIN_CELL_WIDTH
from .coder import CodeTree

#: Deeper-generation regions below this mass are not emitted.
MIN_MASS = 0.002
#: Nodes below this mass are hidden in the tree layout.
TREE_HIDE_BELOW = 0.01

DISC_CENTER = (0.5, 0.5)
DISC_RADIUS = 0.5

U_COEFF = 1.0 / (4.0 * math.pi - 2.0)
RADIUS_C0 = -U_COEFF
RADIUS_C1 = U_COEFF * U_COEFF
RADIUS_C2 = 4.0 * math.pi * U_COEFF

#: Force-model constants (frozen after hand tuning on small hierarchies).
TREE_REPULSION = 0.002
TREE_SPRING = 5.0
TREE_DAMPING = 0.9
TREE_DT = 0.02
TREE_NODE_RADIUS = 0.1
#: Converged when no node moves more than this per iteration (display units).
TREE_POS_TOL = 2e-5
TREE_GAP = 0.01
#: Repulsion range; beyond it pairs ignore each other so equilibria exist.
TREE_CUTOFF = 0.35


def radius_curve(p):
    """Arc depth below the display rim for a region of mass p.

    The unique curve of the form c0 + sqrt(c1 + c2*p) with r(0)=0,
    r(1)=1 and r'(0)=2*pi.  The slope at zero makes a small region
    about as deep as its arc is long, so tiny regions stay square-ish.
    """
    return RADIUS_C0 + np.sqrt(RADIUS_C1 + RADIUS_C2 * np.asarray(p, dtype=float))


@dataclass(frozen=True)
class Region:
    """One displayed area tied to a node of the interval map.

    geom by kind: rect (x, y, w, h); arc (angle0, angle1, r_inner) on
    the unit disc; node (x, y, radius).  probability is the node's full
    belief mass even when geom is a clipped piece of the node's area.
    """

    prefix: str
    label: str
    depth: int
    probability: float
    kind: str
    geom: tuple[float, ...]


@dataclass(frozen=True)
class LayoutFrame:
    kind: str
    tick: int
    regions: tuple[Region, ...]
    indicator: Optional[tuple[float, float]] = None
    converged: bool = True
    aux: dict = field(default_factory=dict, repr=False, compare=False)


def region_label(prefix: str, terminator: str) -> str:
    if prefix == UNDO:
        return "⌫"  # erase-to-the-left sign
    s = prefix[-1] if prefix else ""
    if s == terminator:
        return "⏎"
    if s == " ":
        return "␣"
    return s


# -- shared node walk ----------------------------------------------------


@dataclass(frozen=True)
class _Band:
    prefix: str
    depth: int
    lo: float   # axis coordinates
    hi: float
    y0: float   # belief CDF of lo/hi
    y1: float
    mass: float


def _walk_bands(
    belief: BeliefState,
    tree: CodeTree,
    depth: int,
    min_mass: float,
) -> tuple[list[_Band], dict[str, list[_Band]]]:
    """Displayed nodes with their axis bands and belief masses.

    Returns the bands in parent-before-child order and a map from each
    expanded prefix to its displayed children (used to find the deepest
    region containing a point).  First-generation nodes are always
    included; deeper ones only above ``min_mass``.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    edges, cum = belief.cdf_knots()
    w = belief.undo_width

    def cdf(a: float) -> float:
        return float(np.interp(a, edges, cum))

    bands: list[_Band] = []
    children: dict[str, list[_Band]] = {"": []}

    if w > 0.0:
        undo = _Band(UNDO, 1, 0.0, w, 0.0, cdf(w), cdf(w))
        bands.append(undo)
        children[""].append(undo)

    def rec(prefix: str, gen: int) -> None:
        kids = tree.children(prefix)
        # one interpolation per expansion, not one per child edge
        cuts = np.empty(len(kids) + 1)
        cuts[0] = w + (1.0 - w) * kids[0][1].lo
        for i, (_, iv) in enumerate(kids):
            cuts[i + 1] = w + (1.0 - w) * iv.hi
        ys = np.interp(cuts, edges, cum)
        for i, (sym, iv) in enumerate(kids):
            child = prefix + sym
            y0, y1 = float(ys[i]), float(ys[i + 1])
            band = _Band(child, gen, float(cuts[i]), float(cuts[i + 1]),
                         y0, y1, y1 - y0)
            if gen > 1 and band.mass < min_mass:
                continue
            bands.append(band)
            children.setdefault(prefix, []).append(band)
            expandable = (
                gen < depth
                and band.mass >= min_mass
                and iv.length > MIN_CELL_WIDTH
                and not child.endswith(tree.terminator)
            )
            if expandable:
                rec(child, gen + 1)

    rec("", 1)
    return bands, {k: v for k, v in children.items() if v}


def _deepest_band(children: dict[str, list[_Band]], x: float) -> _Band:
    """Deepest displayed band containing axis point x."""
    current: Optional[_Band] = None
    prefix = ""
    while prefix in children:
        hit = None
        for band in children[prefix]:
            if band.lo <= x < band.hi:
                hit = band
                break
        if hit is None:
            break
        current = hit
        prefix = hit.prefix
        if prefix == UNDO:
            break
    if current is None:
        raise ValueError(f"axis point {x} not covered by any region")
    return current


def _cdf_of(frame: LayoutFrame, x) -> np.ndarray:
    edges, cum = frame.aux["knots"]
    return np.interp(x, edges, cum)


# -- linear --------------------------------------------------------------


def linear_layout(
    belief: BeliefState,
    tree: CodeTree,
    depth: int = 2,
    *,
    min_mass: float = MIN_MASS,
) -> LayoutFrame:
    """Right-anchored stack: a mass-p node gets a p-high, p-wide rectangle."""
    bands, children = _walk_bands(belief, tree, depth, min_mass)
    regions = tuple(
        Region(
            prefix=b.prefix,
            label=region_label(b.prefix, tree.terminator),
            depth=b.depth,
            probability=b.mass,
            kind="rect",
            geom=(1.0 - b.mass, b.y0, b.mass, b.y1 - b.y0),
        )
        for b in bands
    )
    return LayoutFrame(
        kind="linear",
        tick=belief.tick,
        regions=regions,
        aux={"knots": belief.cdf_knots(), "children": children},
    )


# -- circular ------------------------------------------------------------


def circular_layout(
    belief: BeliefState,
    tree: CodeTree,
    depth: int = 2,
    *,
    min_mass: float = MIN_MASS,
) -> LayoutFrame:
    """Annular sectors: angle 2*pi*mass, reaching radius_curve(mass) below the rim."""
    bands, children = _walk_bands(belief, tree, depth, min_mass)
    regions = tuple(
        Region(
            prefix=b.prefix,
            label=region_label(b.prefix, tree.terminator),
            depth=b.depth,
            probability=b.mass,
            kind="arc",
            geom=(
                2.0 * math.pi * b.y0,
                2.0 * math.pi * b.y1,
                1.0 - float(radius_curve(b.mass)),
            ),
        )
        for b in bands
    )
    return LayoutFrame(
        kind="circular",
        tick=belief.tick,
        regions=regions,
        aux={"knots": belief.cdf_knots(), "children": children},
    )


def sector_area(p) -> np.ndarray:
    """Display area of a circular region of mass p, on the unit disc."""
    r = radius_curve(p)
    return np.pi * np.asarray(p) * (2.0 * r - r * r)


# -- proportional area ---------------------------------------------------


def prop_area_layout(
    belief_x: BeliefState,
    belief_y: Optional[BeliefState],
    tree_x: CodeTree,
    tree_y: Optional[CodeTree] = None,
    *,
    depth: int = 2,
    min_mass: float = MIN_MASS,
) -> LayoutFrame:
    """Rectangles with area exactly proportional to mass.

    With two beliefs: the product grid for independent horizontal and
    vertical choices, cell (i,j) of area mass_x(i) * mass_y(j).  With
    one belief: nested conditional splits on alternating axes, so every
    node's rectangle has area equal to its mass.
    """
    if belief_y is not None:
        return _prop_area_pair(belief_x, belief_y, tree_x, tree_y or tree_x,
                               min_mass=min_mass)
    return _prop_area_fold(belief_x, tree_x, depth, min_mass)


def _prop_area_pair(
    belief_x: BeliefState,
    belief_y: BeliefState,
    tree_x: CodeTree,
    tree_y: CodeTree,
    *,
    min_mass: float,
) -> LayoutFrame:
    bx, _ = _walk_bands(belief_x, tree_x, 1, min_mass)
    by, _ = _walk_bands(belief_y, tree_y, 1, min_mass)
    regions = []
    for a in bx:
        for b in by:
            p = a.mass * b.mass
            if p < min_mass * min_mass:
                continue
            la = region_label(a.prefix, tree_x.terminator)
            lb = region_label(b.prefix, tree_y.terminator)
            regions.append(Region(
                prefix=a.prefix + "" + b.prefix,
                label=la + lb,
                depth=1,
                probability=p,
                kind="rect",
                geom=(a.y0, b.y0, a.mass, b.mass),
            ))
    return LayoutFrame(
        kind="prop_area",
        tick=belief_x.tick,
        regions=tuple(regions),
        aux={
            "pair": True,
            "knots_x": belief_x.cdf_knots(),
            "knots_y": belief_y.cdf_knots(),
        },
    )


def _prop_area_fold(
    belief: BeliefState,
    tree: CodeTree,
    depth: int,
    min_mass: float,
) -> LayoutFrame:
    bands, children = _walk_bands(belief, tree, depth, min_mass)
    rects: dict[str, tuple[float, float, float, float]] = {"": (0.0, 0.0, 1.0, 1.0)}
    regions = []
    for b in bands:
        parent = "" if b.prefix == UNDO else b.prefix[:-1]
        px, py, pw, ph = rects[parent]
        pb = _parent_band_mass(children, parent)
        t0 = (b.y0 - _parent_y0(children, parent)) / pb
        t1 = (b.y1 - _parent_y0(children, parent)) / pb
        if b.depth % 2 == 1:  # odd generations split horizontally
            geom = (px + t0 * pw, py, (t1 - t0) * pw, ph)
        else:
            geom = (px, py + t0 * ph, pw, (t1 - t0) * ph)
        rects[b.prefix] = geom
        regions.append(Region(
            prefix=b.prefix,
            label=region_label(b.prefix, tree.terminator),
            depth=b.depth,
            probability=b.mass,
            kind="rect",
            geom=geom,
        ))
    return LayoutFrame(
        kind="prop_area",
        tick=belief.tick,
        regions=tuple(regions),
        aux={
            "pair": False,
            "knots": belief.cdf_knots(),
            "children": children,
            "rects": rects,
        },
    )


def _parent_y0(children: dict[str, list[_Band]], parent: str) -> float:
    return children[parent][0].y0 if parent == "" else _band_of(children, parent).y0


def _parent_band_mass(children: dict[str, list[_Band]], parent: str) -> float:
    if parent == "":
        return 1.0
    return max(_band_of(children, parent).mass, 1e-300)


def _band_of(children: dict[str, list[_Band]], prefix: str) -> _Band:
    for band in children[prefix[:-1] if prefix != UNDO else ""]:
        if band.prefix == prefix:
            return band
    raise KeyError(prefix)


# -- tree ----------------------------------------------------------------


def tree_layout(
    hierarchy: dict[str, Sequence[str]],
    probabilities: dict[str, float],
    iterations: int = 300,
    *,
    hide_below: float = TREE_HIDE_BELOW,
    labels: Optional[dict[str, str]] = None,
    tick: int = 0,
) -> LayoutFrame:
    """Force-directed view: nodes repel by probability product, edges pull.

    The root is pinned at the display center; nodes below ``hide_below``
    are dropped (their subtrees with them, since a child never outweighs
    its parent).  After the force passes, residual disc overlaps are
    separated geometrically.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    visible = _visible_nodes(hierarchy, probabilities, hide_below)
    order = list(visible)
    index = {n: i for i, n in enumerate(order)}
    n = len(order)
    probs = np.array([probabilities[nd] for nd in order])
    radii = TREE_NODE_RADIUS * np.sqrt(probs)

    pos = _seed_positions(hierarchy, order, index)
    vel = np.zeros_like(pos)
    edges = [(index[p], index[c]) for p in order
             for c in hierarchy.get(p, ()) if c in index]
    rest = np.array([1.5 * (radii[i] + radii[j]) + 0.05 for i, j in edges])

    converged = False
    for _ in range(iterations):
        force = np.zeros_like(pos)
        diff = pos[:, None, :] - pos[None, :, :]
        d2 = np.maximum(np.sum(diff * diff, axis=2), 1e-6)
        mag = TREE_REPULSION * (probs[:, None] * probs[None, :]) / d2
        mag[d2 > TREE_CUTOFF * TREE_CUTOFF] = 0.0
        np.fill_diagonal(mag, 0.0)
        force += np.sum(mag[:, :, None] * diff / np.sqrt(d2)[:, :, None], axis=1)
        for e, (i, j) in enumerate(edges):
            dv = pos[j] - pos[i]
            d = max(float(np.hypot(*dv)), 1e-9)
            f = TREE_SPRING * (d - rest[e]) * dv / d
            force[i] += f
            force[j] -= f
        vel = (vel + TREE_DT * force) * TREE_DAMPING
        vel[0] = 0.0  # root pinned
        free = pos + TREE_DT * vel
        pos = np.clip(free, 0.05, 0.95)
        vel[pos != free] = 0.0  # wall contact absorbs the motion
        pos[0] = (0.5, 0.5)
        if np.max(np.abs(vel)) * TREE_DT < TREE_POS_TOL:
            converged = True
            break

    pos = _separate_overlaps(pos, radii)

    regions = tuple(
        Region(
            prefix=node,
            label=(labels or {}).get(node, node[-1:] or "•"),
            depth=len(node) if node != UNDO else 1,
            probability=float(probs[i]),
            kind="node",
            geom=(float(pos[i, 0]), float(pos[i, 1]), float(radii[i])),
        )
        for i, node in enumerate(order)
    )
    edge_names = [(order[i], order[j]) for i, j in edges]
    return LayoutFrame(
        kind="tree",
        tick=tick,
        regions=regions,
        converged=converged,
        aux={"edges": edge_names, "index": index},
    )


def _visible_nodes(
    hierarchy: dict[str, Sequence[str]],
    probabilities: dict[str, float],
    hide_below: float,
) -> list[str]:
    roots = set(hierarchy) - {c for kids in hierarchy.values() for c in kids}
    if len(roots) != 1:
        raise ValueError(f"hierarchy must have one root, found {sorted(roots)}")
    root = roots.pop()
    out: list[str] = []
    stack = [root]
    while stack:
        node = stack.pop(0)
        if node != root and probabilities.get(node, 0.0) < hide_below:
            continue
        out.append(node)
        stack.extend(hierarchy.get(node, ()))
    return out


def _seed_positions(
    hierarchy: dict[str, Sequence[str]],
    order: list[str],
    index: dict[str, int],
) -> np.ndarray:
    """Deterministic start: children ring their parent at even angles."""
    pos = np.zeros((len(order), 2))
    pos[0] = (0.5, 0.5)
    depth = {order[0]: 0}
    for parent in order:
        kids = [c for c in hierarchy.get(parent, ()) if c in index]
        for k, child in enumerate(kids):
            depth[child] = depth[parent] + 1
            ang = 2.0 * math.pi * k / len(kids)
            d = 0.25 / depth[child]
            pos[index[child]] = pos[index[parent]] + d * np.array(
                [math.cos(ang), math.sin(ang)])
    return pos


def _separate_overlaps(pos: np.ndarray, radii: np.ndarray, passes: int = 60) -> np.ndarray:
    pos = pos.copy()
    n = len(pos)
    for _ in range(passes):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                dv = pos[j] - pos[i]
                d = float(np.hypot(*dv))
                need = radii[i] + radii[j] + TREE_GAP
                if d >= need:
                    continue
                moved = True
                if d < 1e-9:
                    dv = np.array([1.0, 0.0])
                    d = 1.0
                push = 0.5 * (need - d) * dv / d
                if i == 0:  # root immovable
                    pos[j] += 2.0 * push
                else:
                    pos[i] -= push
                    pos[j] += push
        if not moved:
            break
    return pos


def tree_frame(
    belief: BeliefState,
    tree: CodeTree,
    depth: int = 2,
    iterations: int = 300,
    *,
    hide_below: float = TREE_HIDE_BELOW,
) -> LayoutFrame:
    """Tree layout of the current belief's displayed hierarchy."""
    bands, children = _walk_bands(belief, tree, depth, hide_below)
    hierarchy: dict[str, list[str]] = {"": []}
    probs: dict[str, float] = {"": 1.0}
    labels: dict[str, str] = {"": "•"}
    for b in bands:
        parent = "" if b.prefix == UNDO else b.prefix[:-1]
        hierarchy.setdefault(parent, [])
        if b.prefix not in hierarchy[parent]:
            hierarchy[parent].append(b.prefix)
        probs[b.prefix] = b.mass
        labels[b.prefix] = region_label(b.prefix, tree.terminator)
    frame = tree_layout(hierarchy, probs, iterations,
                        hide_below=hide_below, labels=labels, tick=belief.tick)
    frame.aux["knots"] = belief.cdf_knots()
    frame.aux["children"] = children
    return frame


# -- folded and scrolling variants of the linear frame -------------------


def folded_layout(
    belief: BeliefState,
    tree: CodeTree,
    columns: int,
    *,
    depth: int = 2,
    min_mass: float = MIN_MASS,
) -> LayoutFrame:
    """Linear frame snaked through ``columns`` vertical strips.

    Odd strips run bottom-to-top so the selection axis stays connected
    across column boundaries.  One column reproduces the linear frame.
    """
    if columns < 1:
        raise ValueError("columns must be >= 1")
    bands, children = _walk_bands(belief, tree, depth, min_mass)
    regions = []
    for b in bands:
        for col, v0, v1 in _fold_pieces(b.y0, b.y1, columns):
            x_hi = (col + 1.0) / columns
            width = b.mass / columns
            regions.append(Region(
                prefix=b.prefix,
                label=region_label(b.prefix, tree.terminator),
                depth=b.depth,
                probability=b.mass,
                kind="rect",
                geom=(x_hi - width, v0, width, v1 - v0),
            ))
    return LayoutFrame(
        kind="folded",
        tick=belief.tick,
        regions=tuple(regions),
        aux={"knots": belief.cdf_knots(), "children": children,
             "columns": columns},
    )


def _fold_pieces(y0: float, y1: float, columns: int) -> Iterable[tuple[int, float, float]]:
    """Cut CDF band [y0, y1] at column boundaries; yield per-column spans."""
    c_first = min(int(y0 * columns), columns - 1)
    c_last = min(int(np.nextafter(y1, 0.0) * columns), columns - 1) if y1 > y0 else c_first
    for col in range(c_first, c_last + 1):
        a = max(y0, col / columns)
        b = min(y1, (col + 1) / columns)
        v0 = a * columns - col
        v1 = b * columns - col
        if col % 2 == 1:
            v0, v1 = 1.0 - v1, 1.0 - v0
        yield col, v0, v1


def scroll_window(
    belief: BeliefState,
    tree: CodeTree,
    window_width: float,
    indicator_pos: float,
    *,
    depth: int = 2,
    min_mass: float = MIN_MASS,
) -> LayoutFrame:
    """Sliding window onto the linear frame, wrapped on the unit circle.

    Only regions inside the window are emitted; the window is recentred
    so the selection indicator sits at the vertical midpoint.
    """
    if not 0.0 < window_width <= 1.0:
        raise ValueError("window_width must be in (0, 1]")
    bands, children = _walk_bands(belief, tree, depth, min_mass)
    half = window_width / 2.0
    regions = []
    for b in bands:
        off = (b.y0 - indicator_pos + 0.5) % 1.0 - 0.5
        for start in (off, off - 1.0):  # second copy catches wraparound
            lo, hi = start, start + b.mass
            a, c = max(lo, -half), min(hi, half)
            if c <= a:
                continue
            regions.append(Region(
                prefix=b.prefix,
                label=region_label(b.prefix, tree.terminator),
                depth=b.depth,
                probability=b.mass,
                kind="rect",
                geom=(1.0 - b.mass, (a + half) / window_width,
                      b.mass, (c - a) / window_width),
            ))
    return LayoutFrame(
        kind="scroll",
        tick=belief.tick,
        regions=tuple(regions),
        indicator=(1.0, 0.5),
        aux={"knots": belief.cdf_knots(), "children": children,
             "window": window_width, "indicator_pos": indicator_pos},
    )


# -- display positions ---------------------------------------------------


def display_position(frame: LayoutFrame, x) -> np.ndarray:
    """Display-space point(s) of axis coordinate(s) x under the frame.

    Within the deepest displayed region containing x, the selection-axis
    coordinate interpolates by conditional belief mass and the remaining
    coordinate sits at the region's centroid.  Returns shape (2,) for a
    scalar x, else (n, 2).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xs < 0.0) | (xs > 1.0)):
        raise ValueError("axis coordinates must lie in [0, 1]")
    xs = np.minimum(xs, np.nextafter(1.0, 0.0))  # x=1 belongs to the last region
    if frame.aux.get("pair"):
        raise ValueError("pair-mode frames have no single-axis display position")
    y = np.asarray(_cdf_of(frame, xs), dtype=float)
    out = np.empty((len(xs), 2))
    for i, (xi, yi) in enumerate(zip(xs, y)):
        out[i] = _position_one(frame, float(xi), float(yi))
    return out[0] if np.isscalar(x) or np.asarray(x).ndim == 0 else out


def region_center_position(frame: LayoutFrame, x) -> np.ndarray:
    """Center of the deepest displayed region containing x.

    Like :func:`display_position` but snapped to the region's mass
    midpoint on the selection axis: where a user aims when they target
    the region as a whole rather than a point inside it.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any((xs < 0.0) | (xs > 1.0)):
        raise ValueError("axis coordinates must lie in [0, 1]")
    xs = np.minimum(xs, np.nextafter(1.0, 0.0))
    if frame.aux.get("pair"):
        raise ValueError("pair-mode frames have no single-axis display position")
    out = np.empty((len(xs), 2))
    for i, xi in enumerate(xs):
        band = _deepest_band(frame.aux["children"], float(xi))
        out[i] = _position_one(frame, float(xi), 0.5 * (band.y0 + band.y1))
    return out[0] if np.isscalar(x) or np.asarray(x).ndim == 0 else out


def _position_one(frame: LayoutFrame, x: float, y: float) -> tuple[float, float]:
    band = _deepest_band(frame.aux["children"], x)
    q = band.mass
    if frame.kind == "linear":
        return (1.0 - q / 2.0, y)
    if frame.kind == "circular":
        ang = 2.0 * math.pi * y
        rho = 1.0 - float(radius_curve(q)) / 2.0
        return (DISC_CENTER[0] + DISC_RADIUS * rho * math.cos(ang),
                DISC_CENTER[1] + DISC_RADIUS * rho * math.sin(ang))
    if frame.kind == "folded":
        cols = frame.aux["columns"]
        col = min(int(y * cols), cols - 1)
        v = y * cols - col
        if col % 2 == 1:
            v = 1.0 - v
        return ((col + 1.0 - q / 2.0) / cols, v)
    if frame.kind == "scroll":
        half = frame.aux["window"] / 2.0
        off = (y - frame.aux["indicator_pos"] + 0.5) % 1.0 - 0.5
        return (1.0 - q / 2.0, (off + half) / frame.aux["window"])
    if frame.kind == "prop_area":
        return _fold_position(frame, band, y)
    if frame.kind == "tree":
        g = next(r.geom for r in frame.regions if r.prefix == band.prefix)
        return (g[0], g[1])
    raise ValueError(f"unknown frame kind {frame.kind!r}")


def _fold_position(frame: LayoutFrame, band: _Band, y: float) -> tuple[float, float]:
    rx, ry, rw, rh = frame.aux["rects"][band.prefix]
    t = (y - band.y0) / band.mass if band.mass > 0 else 0.5
    if band.depth % 2 == 1:
        return (rx + t * rw, ry + rh / 2.0)
    return (rx + rw / 2.0, ry + t * rh)
