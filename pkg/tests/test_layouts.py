"""Geometry: layouts, radius curve, display positions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rtiac.belief import UNDO, BeliefState, initial_belief
from rtiac.coder import CodeTree
from rtiac.layouts import (
    MIN_MASS,
    circular_layout,
    display_position,
    folded_layout,
    linear_layout,
    prop_area_layout,
    radius_curve,
    region_center_position,
    region_label,
    scroll_window,
    sector_area,
    tree_frame,
    tree_layout,
)


def gen1_belief(tree: CodeTree, masses: dict[str, float]) -> BeliefState:
    """Belief with the given first-generation masses, flat inside each."""
    kids = tree.children("")
    edges = [0.0] + [iv.hi for _, iv in kids]
    dens = [masses[s] / iv.length for s, iv in kids]
    return BeliefState(np.array(edges), np.array(dens),
                       tuple(s for s, _ in kids))


# -- radius curve and sector area ----------------------------------------


def test_radius_curve_endpoints_and_slope():
    assert abs(float(radius_curve(0.0))) < 1e-12
    assert abs(float(radius_curve(1.0)) - 1.0) < 1e-12
    h = 1e-8
    slope = (float(radius_curve(h)) - float(radius_curve(0.0))) / h
    assert abs(slope - 2.0 * math.pi) < 1e-4


def test_radius_curve_monotone():
    p = np.linspace(0.0, 1.0, 1001)
    r = radius_curve(p)
    assert np.all(np.diff(r) > 0)
    assert np.all((r >= -1e-12) & (r <= 1.0 + 1e-12))


@pytest.mark.parametrize("p", [1e-4, 1e-3, 0.01, 0.1, 0.5, 0.9])
def test_sector_area_matches_polygon_oracle(p):
    # polygonal annular sector on the unit disc, shoelace area
    r_in = 1.0 - float(radius_curve(p))
    theta = np.linspace(0.0, 2.0 * math.pi * p, 4000)
    xs = np.concatenate([np.cos(theta), r_in * np.cos(theta[::-1])])
    ys = np.concatenate([np.sin(theta), r_in * np.sin(theta[::-1])])
    shoelace = 0.5 * abs(np.dot(xs, np.roll(ys, -1)) - np.dot(ys, np.roll(xs, -1)))
    assert abs(shoelace - float(sector_area(p))) < 1e-5


def test_sector_area_small_p_slope_two():
    a1, a2 = float(sector_area(1e-7)), float(sector_area(1e-6))
    slope = (math.log(a2) - math.log(a1)) / math.log(10.0)
    assert abs(slope - 2.0) < 0.01


# -- linear --------------------------------------------------------------


def test_linear_layout_hand_geometry(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    frame = linear_layout(initial_belief(tree), tree, depth=1)
    by_prefix = {r.prefix: r for r in frame.regions}
    assert set(by_prefix) == {"\n", "a", "b"}
    r = by_prefix["a"]  # interval [.5, .8), uniform belief: mass .3
    assert r.geom == pytest.approx((0.7, 0.5, 0.3, 0.3))
    assert r.probability == pytest.approx(0.3)
    assert r.label == "a"
    assert by_prefix["\n"].label == "⏎"


def test_linear_layout_gen1_tiles_unit_interval(corpus_model):
    tree = CodeTree(corpus_model)
    frame = linear_layout(initial_belief(tree), tree, depth=2)
    gen1 = [r for r in frame.regions if r.depth == 1]
    ys = sorted((r.geom[1], r.geom[1] + r.geom[3]) for r in gen1)
    assert ys[0][0] == pytest.approx(0.0)
    assert ys[-1][1] == pytest.approx(1.0)
    for (_, hi), (lo, _) in zip(ys, ys[1:]):
        assert hi == pytest.approx(lo, abs=1e-12)
    assert sum(r.probability for r in gen1) == pytest.approx(1.0)


def test_linear_area_scales_as_mass_squared(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    b = gen1_belief(tree, {"\n": 0.6, "a": 0.3, "b": 0.1})
    frame = linear_layout(b, tree, depth=1)
    for r in frame.regions:
        assert r.geom[2] * r.geom[3] == pytest.approx(r.probability ** 2)


def test_min_mass_prunes_deep_regions(corpus_model):
    tree = CodeTree(corpus_model)
    frame = linear_layout(initial_belief(tree), tree, depth=2)
    deep = [r for r in frame.regions if r.depth > 1]
    assert deep and all(r.probability >= MIN_MASS for r in deep)
    n_syms = len(tree.children(""))
    assert len(deep) < n_syms * n_syms  # some pairs really were pruned


# -- circular ------------------------------------------------------------


def test_circular_layout_angles_track_cdf(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    b = gen1_belief(tree, {"\n": 0.25, "a": 0.5, "b": 0.25})
    frame = circular_layout(b, tree, depth=1)
    by_prefix = {r.prefix: r for r in frame.regions}
    a0, a1, r_in = by_prefix["a"].geom
    assert a0 == pytest.approx(2.0 * math.pi * 0.25)
    assert a1 == pytest.approx(2.0 * math.pi * 0.75)
    assert r_in == pytest.approx(1.0 - float(radius_curve(0.5)))
    total = sum(r.geom[1] - r.geom[0] for r in frame.regions)
    assert total == pytest.approx(2.0 * math.pi)


def test_circular_display_position_on_disc(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    frame = circular_layout(initial_belief(tree), tree, depth=1)
    pt = display_position(frame, 0.0)
    # y = 0: angle 0, radius (1 - r(.5)/2)/2 from the center
    rho = 0.5 * (1.0 - float(radius_curve(0.5)) / 2.0)
    assert pt == pytest.approx((0.5 + rho, 0.5))
    for x in (0.1, 0.4, 0.77, 0.99):
        d = np.hypot(*(display_position(frame, x) - np.array([0.5, 0.5])))
        assert d <= 0.5 + 1e-12


# -- proportional area ---------------------------------------------------


def test_prop_area_fold_area_equals_mass(corpus_model):
    tree = CodeTree(corpus_model)
    frame = prop_area_layout(initial_belief(tree), None, tree, depth=2)
    assert frame.regions
    for r in frame.regions:
        if r.prefix == UNDO:
            continue
        assert r.geom[2] * r.geom[3] == pytest.approx(r.probability, rel=1e-9)


def test_prop_area_pair_grid(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    bx = gen1_belief(tree, {"\n": 0.5, "a": 0.3, "b": 0.2})
    by = gen1_belief(tree, {"\n": 0.2, "a": 0.3, "b": 0.5})
    frame = prop_area_layout(bx, by, tree, tree)
    assert len(frame.regions) == 9
    assert sum(r.probability for r in frame.regions) == pytest.approx(1.0)
    assert sum(r.geom[2] * r.geom[3] for r in frame.regions) == pytest.approx(1.0)
    got = next(r for r in frame.regions if r.label == "a⏎")
    assert got.probability == pytest.approx(0.3 * 0.2)
    with pytest.raises(ValueError):
        display_position(frame, 0.5)


# -- folded and scroll ---------------------------------------------------


def test_folded_one_column_is_linear(corpus_model):
    tree = CodeTree(corpus_model)
    b = initial_belief(tree)
    lin = linear_layout(b, tree, depth=2)
    fold = folded_layout(b, tree, 1, depth=2)
    assert [r.geom for r in fold.regions] == [
        pytest.approx(r.geom) for r in lin.regions]


def test_folded_columns_preserve_band_height(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    b = gen1_belief(tree, {"\n": 0.5, "a": 0.3, "b": 0.2})
    for columns in (2, 3, 5):
        frame = folded_layout(b, tree, columns, depth=1)
        per_prefix: dict[str, float] = {}
        for r in frame.regions:
            per_prefix[r.prefix] = per_prefix.get(r.prefix, 0.0) + r.geom[3]
        for prefix, total in per_prefix.items():
            mass = {"\n": 0.5, "a": 0.3, "b": 0.2}[prefix]
            assert total / columns == pytest.approx(mass)
        for r in frame.regions:  # all pieces inside the unit square
            assert -1e-12 <= r.geom[1] <= r.geom[1] + r.geom[3] <= 1 + 1e-12


def test_folded_serpentine_reverses_odd_columns(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    b = gen1_belief(tree, {"\n": 0.5, "a": 0.3, "b": 0.2})
    frame = folded_layout(b, tree, 2, depth=1)
    a = next(r for r in frame.regions if r.prefix == "a")
    # CDF band [.5, .8] -> column 1 span [0, .6] flipped to [.4, 1.0]
    assert a.geom[1] == pytest.approx(0.4)
    assert a.geom[1] + a.geom[3] == pytest.approx(1.0)


def test_scroll_window_centers_indicator(corpus_model):
    tree = CodeTree(corpus_model)
    b = initial_belief(tree)
    frame = scroll_window(b, tree, 0.5, indicator_pos=0.3, depth=1)
    assert frame.indicator == (1.0, 0.5)
    visible = sum(r.geom[3] for r in frame.regions)
    assert visible == pytest.approx(1.0)  # gen-1 bands fill the window
    pt = display_position(frame, 0.3)  # uniform belief: cdf(x) = x
    assert pt[1] == pytest.approx(0.5)


def test_scroll_window_wraps_around(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    b = gen1_belief(tree, {"\n": 0.5, "a": 0.3, "b": 0.2})
    frame = scroll_window(b, tree, 0.4, indicator_pos=0.98, depth=1)
    prefixes = {r.prefix for r in frame.regions}
    # window [0.78, 1.18) mod 1 shows the tail of "b" and the head of "\n"
    assert "b" in prefixes and "\n" in prefixes


def test_scroll_window_validates_width(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    b = initial_belief(tree)
    with pytest.raises(ValueError):
        scroll_window(b, tree, 0.0, 0.5)
    with pytest.raises(ValueError):
        scroll_window(b, tree, 1.5, 0.5)


# -- tree ----------------------------------------------------------------


def symmetric_pair():
    return {"": ["a", "b"]}, {"": 1.0, "a": 0.3, "b": 0.3}


def test_tree_layout_converges_and_pins_root():
    hier, probs = symmetric_pair()
    frame = tree_layout(hier, probs)
    assert frame.converged
    root = next(r for r in frame.regions if r.prefix == "")
    assert root.geom[:2] == (0.5, 0.5)


def test_tree_layout_mirror_symmetry():
    hier, probs = symmetric_pair()
    frame = tree_layout(hier, probs)
    a = next(r for r in frame.regions if r.prefix == "a")
    b = next(r for r in frame.regions if r.prefix == "b")
    assert a.geom[0] - 0.5 == pytest.approx(0.5 - b.geom[0], abs=1e-9)
    assert a.geom[1] == pytest.approx(b.geom[1], abs=1e-9)


def test_tree_layout_separates_discs(corpus_model):
    tree = CodeTree(corpus_model)
    frame = tree_frame(initial_belief(tree), tree, depth=1, iterations=400)
    nodes = [r for r in frame.regions]
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            d = math.hypot(a.geom[0] - b.geom[0], a.geom[1] - b.geom[1])
            assert d >= a.geom[2] + b.geom[2] - 1e-6


def test_tree_layout_deterministic():
    hier = {"": ["a", "b", "c"], "a": ["ax", "ay"]}
    probs = {"": 1.0, "a": 0.5, "b": 0.3, "c": 0.2, "ax": 0.3, "ay": 0.2}
    f1 = tree_layout(hier, probs)
    f2 = tree_layout(hier, probs)
    assert [r.geom for r in f1.regions] == [r.geom for r in f2.regions]


def test_tree_layout_hides_light_subtrees():
    hier = {"": ["a", "b"], "b": ["bx"]}
    probs = {"": 1.0, "a": 0.95, "b": 0.004, "bx": 0.003}
    frame = tree_layout(hier, probs)
    names = {r.prefix for r in frame.regions}
    assert names == {"", "a"}


def test_tree_layout_rejects_bad_input():
    with pytest.raises(ValueError):
        tree_layout({"a": [], "b": []}, {"a": 1.0, "b": 1.0})
    with pytest.raises(ValueError):
        tree_layout({"": ["a"]}, {"": 1.0, "a": 0.5}, iterations=0)


# -- display positions ---------------------------------------------------


def test_region_label_special_symbols():
    assert region_label(UNDO, "\n") == "⌫"
    assert region_label("ab\n", "\n") == "⏎"
    assert region_label("a ", "\n") == "␣"
    assert region_label("xyz", "\n") == "z"


def test_display_position_hand_values(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    frame = linear_layout(initial_belief(tree), tree, depth=1)
    assert display_position(frame, 0.6) == pytest.approx((0.85, 0.6))
    # snapped variant centers on the region's mass midpoint
    assert region_center_position(frame, 0.6) == pytest.approx((0.85, 0.65))


def test_region_center_uses_deepest_region(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    frame = linear_layout(initial_belief(tree), tree, depth=2)
    # x=0.6 sits in "a\n" = [.5, .65) with mass .15
    pt = region_center_position(frame, 0.6)
    assert pt == pytest.approx((1.0 - 0.15 / 2.0, 0.575))


@given(st.floats(min_value=0.0, max_value=1.0))
@settings(max_examples=80, deadline=None)
def test_display_position_inside_deepest_region(corpus_model, x):
    tree = CodeTree(corpus_model)
    frame = linear_layout(initial_belief(tree), tree, depth=2)
    px, py = display_position(frame, x)
    hit = [r for r in frame.regions
           if r.geom[0] - 1e-12 <= px <= r.geom[0] + r.geom[2] + 1e-12
           and r.geom[1] - 1e-12 <= py <= r.geom[1] + r.geom[3] + 1e-12]
    assert hit  # the point lands inside at least one displayed region


def test_display_position_rejects_out_of_range(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    frame = linear_layout(initial_belief(tree), tree, depth=1)
    for bad in (-0.01, 1.01):
        with pytest.raises(ValueError):
            display_position(frame, bad)
        with pytest.raises(ValueError):
            region_center_position(frame, bad)


def test_display_position_vectorized(flat_abc_model):
    tree = CodeTree(flat_abc_model)
    frame = linear_layout(initial_belief(tree), tree, depth=1)
    pts = display_position(frame, np.array([0.1, 0.6, 0.9]))
    assert pts.shape == (3, 2)
    assert pts[1] == pytest.approx((0.85, 0.6))
