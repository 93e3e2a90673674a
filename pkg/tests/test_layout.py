import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_tree_snapshot, random_view_step
from invariants import check_layout_invariants
from ontoplot import (
    InconsistentPlanError,
    LayoutConfig,
    ViewState,
    apply_layout_diff,
    build_legend,
    build_occurrence_tree,
    build_snapshot,
    compute_layout,
    compute_layout_diff,
    detect_collapsible,
    diff_layouts,
    diff_to_wire,
    hit_test,
    layout_for_view,
    layout_to_wire,
    mark_focus_interest,
    mark_interest,
)

CFG = LayoutConfig()


def make(snapshot, prop, view=None, focus=None):
    tree = build_occurrence_tree(snapshot)
    if focus is None:
        interest = mark_interest(snapshot, tree, prop)
    else:
        interest = mark_focus_interest(snapshot, tree, prop, focus)
    view = view or ViewState(property_id=prop, focus_class_id=focus)
    plan = detect_collapsible(tree, interest)
    overrides = view.overrides_dict()
    if overrides:
        from ontoplot import apply_overrides

        plan = apply_overrides(plan, tree, interest, overrides)
    layout = compute_layout(snapshot, tree, interest, plan, CFG, view)
    return tree, interest, plan, layout


def boxes_by_class(tree, layout):
    return {
        tree.nodes[b.owner_occ].class_id: b
        for b in layout.boxes
        if b.kind == "node"
    }


# -- fixture geometry ---------------------------------------------------------


def test_toy_a_width_composition(toy_a):
    tree, interest, plan, layout = make(toy_a, "p")
    named = boxes_by_class(tree, layout)
    assert named["A"].w == named["B"].w + named["C"].w
    assert named["B"].w == named["C"].w == 36
    check_layout_invariants(layout, tree, interest, plan, CFG)


def test_toy_a_grid_contents(toy_a):
    tree, _, plan, layout = make(toy_a, "p")
    b_occ = tree.occs_of_class["B"][0]
    grid = next(b for b in layout.boxes if b.ref_id == f"grid:{b_occ}")
    inside = [
        g
        for g in layout.glyphs
        if grid.x <= g.cx <= grid.x + grid.w and grid.y <= g.cy <= grid.y + grid.h
    ]
    kinds = sorted(g.kind for g in inside)
    assert kinds == ["circle", "square"]
    circle = next(g for g in inside if g.kind == "circle")
    square = next(g for g in inside if g.kind == "square")
    assert circle.class_id == "D"
    assert square.count_label == 1
    assert circle.cx < square.cx


def test_toy_c_grid_order_and_shape(toy_c):
    tree, _, plan, layout = make(toy_c, "r")
    p_occ = tree.occs_of_class["P"][0]
    grid = next(b for b in layout.boxes if b.ref_id == f"grid:{p_occ}")
    # three items wrap into 2 columns and 2 rows
    assert grid.w == 2 * CFG.cell_size + 2 * CFG.box_padding
    inside = sorted(
        (
            g
            for g in layout.glyphs
            if grid.x <= g.cx <= grid.x + grid.w and grid.y <= g.cy <= grid.y + grid.h
        ),
        key=lambda g: (g.cy, g.cx),
    )
    assert [g.kind for g in inside] == ["circle", "circle", "square"]
    assert [g.class_id for g in inside[:2]] == ["L1", "L4"]
    assert inside[2].count_label == 2


def test_row_heights_uniform_and_gapped(toy_a):
    tree, _, _, layout = make(toy_a, "p")
    rows = {}
    for b in layout.boxes:
        rows.setdefault(b.depth, set()).add((b.y, b.h))
    for entries in rows.values():
        assert len(entries) == 1
    ys = sorted((y, h) for d, [(y, h)] in ((d, list(v)) for d, v in rows.items()))
    for (y1, h1), (y2, _) in zip(ys, ys[1:]):
        assert y2 == y1 + h1 + CFG.level_gap


def test_every_visible_class_gets_circle(toy_a):
    tree, _, plan, layout = make(toy_a, "p")
    circles = {g.class_id for g in layout.glyphs if g.kind == "circle"}
    assert circles == {"A", "B", "C", "D", "F"}


def test_separator_styles(toy_a):
    tree, _, _, layout = make(toy_a, "p")
    seps = {s.ref_id: s for s in layout.separators}
    b_occ = tree.occs_of_class["C"][0]
    sibling = seps[f"sep:box:{b_occ}"]
    assert sibling.style == "faint_partial"
    assert sibling.y_bottom - sibling.y_top == 10  # half of the 20px row
    grid_sep = seps[f"sep:grid:{b_occ}"]
    assert grid_sep.style == "solid"
    assert grid_sep.y_bottom - grid_sep.y_top == 20


def test_parent_labels_fit_greedily():
    # k1/k2 boxes are 20px wide (one-column grid), fitting 2*7+4 = 18
    snap = build_snapshot(
        classes=["averyveryverylongclassname", "k1", "k2", "x", "y"],
        properties=["p"],
        edges=[
            ("k1", "averyveryverylongclassname"),
            ("k2", "averyveryverylongclassname"),
            ("x", "k1"),
            ("y", "k2"),
        ],
        associations=[("x", "p", "y")],
    )
    tree, _, _, layout = make(snap, "p")
    texts = {l.text for l in layout.labels if l.kind == "parent"}
    # 26 chars * 7px + 4 = 186 > root width, so the long name is omitted
    assert "averyveryverylongclassname" not in texts
    assert {"k1", "k2"} <= texts


def test_association_labels_diagonal_and_stacked(toy_c):
    tree, _, _, layout = make(toy_c, "r")
    assoc = [l for l in layout.labels if l.kind == "association"]
    assert {l.text for l in assoc} == {"L1", "L4", "Z1", "Z2"}
    assert all(l.orientation == "diagonal" for l in assoc)
    by_text = {l.text: l for l in assoc}
    # L1 and L4 share P's grid: the second stacks half a cell further
    dx = by_text["L4"].x - by_text["L1"].x
    dy = by_text["L4"].y - by_text["L1"].y
    # L4 sits one grid column right of L1 plus one stacking step
    assert (dx, dy) == (CFG.cell_size + CFG.cell_size / 2, CFG.cell_size / 2)


def test_label_offset_applies(toy_a):
    base_view = ViewState(property_id="p")
    dragged = ViewState(property_id="p", label_offsets=(("D", (10.0, -5.0)),))
    _, _, _, before = make(toy_a, "p", view=base_view)
    _, _, _, after = make(toy_a, "p", view=dragged)
    lab0 = next(l for l in before.labels if l.kind == "association" and l.text == "D")
    lab1 = next(l for l in after.labels if l.kind == "association" and l.text == "D")
    assert (lab1.x - lab0.x, lab1.y - lab0.y) == (10.0, -5.0)


def test_pinned_label(toy_a):
    view = ViewState(property_id="p", pinned_labels=("E", "A"))
    tree, _, _, layout = make(toy_a, "p", view=view)
    pins = [l for l in layout.labels if l.kind == "pinned"]
    # E is hidden inside a square merge, so only A's pin renders
    assert [l.text for l in pins] == ["A"]
    assert pins[0].orientation == "horizontal"


def test_selection_marks(toy_a):
    view = ViewState(property_id="p", selection_class_id="D")
    tree, _, _, layout = make(toy_a, "p", view=view)
    marked = next(g for g in layout.glyphs if g.class_id == "D")
    assert marked.selection is not None
    assert marked.selection.outline
    assert marked.selection.out_arrow and not marked.selection.in_arrow

    view_f = ViewState(property_id="p", selection_class_id="F")
    _, _, _, layout_f = make(toy_a, "p", view=view_f)
    marked_f = next(g for g in layout_f.glyphs if g.class_id == "F")
    assert marked_f.selection.in_arrow and not marked_f.selection.out_arrow


def test_pulsing_ring_when_selection_hidden(toy_a):
    tree = build_occurrence_tree(toy_a)
    b_occ = tree.occs_of_class["B"][0]
    view = ViewState(property_id="p", selection_class_id="D").with_override(b_occ, "collapse")
    _, _, _, layout = make(toy_a, "p", view=view)
    region_glyphs = [g for g in layout.glyphs if g.ref_id.startswith("glyph:region:user:")]
    assert len(region_glyphs) == 1
    assert region_glyphs[0].selection is not None
    assert region_glyphs[0].selection.pulsing_ring


def test_focus_mode_hides_unrelated_branches(toy_a):
    tree, interest, plan, layout = make(toy_a, "p", focus="D")
    visible_classes = {g.class_id for g in layout.glyphs if g.kind == "circle"}
    assert "D" in visible_classes and "F" in visible_classes
    assert "E" not in visible_classes and "G" not in visible_classes


def test_single_class_layout():
    snap = build_snapshot(classes=["Solo"], properties=["p"], edges=[], associations=[])
    tree, interest, plan, layout = make(snap, "p")
    assert len(layout.boxes) == 1
    assert layout.boxes[0].kind == "grid"
    assert layout.total_w == CFG.cell_size + 2 * CFG.box_padding
    circles = [g for g in layout.glyphs if g.kind == "circle"]
    assert len(circles) == 1 and circles[0].class_id == "Solo"


def test_synthetic_root_label():
    snap = build_snapshot(classes=["A1", "A2"], properties=["p"], edges=[], associations=[])
    tree, _, _, layout = make(snap, "p")
    root_circle = next(g for g in layout.glyphs if g.owner_occ == tree.root)
    assert root_circle.label == "Thing"


def test_inconsistent_plan_rejected(toy_a, toy_b):
    tree_a = build_occurrence_tree(toy_a)
    interest_a = mark_interest(toy_a, tree_a, "p")
    tree_b = build_occurrence_tree(toy_b)
    interest_b = mark_interest(toy_b, tree_b, "p")
    plan_a = detect_collapsible(tree_a, interest_a)
    small_tree = build_occurrence_tree(
        build_snapshot(classes=["A"], properties=["p"], edges=[], associations=[])
    )
    with pytest.raises(InconsistentPlanError):
        compute_layout(toy_a, small_tree, interest_a, plan_a, CFG, ViewState(property_id="p"))


# -- legend ---------------------------------------------------------------


def test_legend_single_value():
    legend = build_legend([1, 1, 1])
    assert legend.bin_bounds == ((1, 1),)
    assert legend.colors == (CFG.color_ramp[-1],)


def test_legend_two_values():
    legend = build_legend([1, 2])
    assert legend.bin_bounds == ((1, 1), (2, 2))
    assert legend.colors == (CFG.color_ramp[0], CFG.color_ramp[-1])


def test_legend_five_bins_at_25():
    legend = build_legend(range(1, 26))
    assert legend.bin_bounds == ((1, 5), (6, 10), (11, 15), (16, 20), (21, 25))
    assert legend.colors == CFG.color_ramp


def test_legend_empty():
    legend = build_legend([])
    assert legend.bin_bounds == () and legend.colors == ()
    assert legend.bin_of(1) is None


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 400), min_size=1, max_size=30))
def test_legend_monotone(counts):
    legend = build_legend(counts)
    ordered = sorted(set(counts))
    bins = [legend.bin_of(c) for c in ordered]
    assert bins == sorted(bins)
    assert bins[0] == 0 and bins[-1] == len(legend.bin_bounds) - 1
    assert len(legend.bin_bounds) <= 5


# -- hit testing ----------------------------------------------------------


def test_hit_test_priorities(toy_a):
    tree, _, _, layout = make(toy_a, "p")
    d_occ = tree.occs_of_class["D"][0]
    circle = next(g for g in layout.glyphs if g.ref_id == f"glyph:{d_occ}")
    assert hit_test(layout, circle.cx, circle.cy) == circle.ref_id
    assert hit_test(layout, -5, -5) is None
    assert hit_test(layout, layout.total_w + 1, 0) is None
    b_occ = tree.occs_of_class["B"][0]
    grid = next(b for b in layout.boxes if b.ref_id == f"grid:{b_occ}")
    # point on the padding strip between cells hits the grid box itself
    between_x = grid.x + CFG.box_padding + CFG.cell_size
    assert hit_test(layout, between_x, grid.y + 1) == grid.ref_id


# -- diffs ----------------------------------------------------------------


def test_identity_diff_is_empty(toy_a):
    tree = build_occurrence_tree(toy_a)
    interest = mark_interest(toy_a, tree, "p")
    view = ViewState(property_id="p")
    diff = compute_layout_diff(toy_a, tree, interest, CFG, view, view)
    assert diff.moved == () and diff.resized == () and diff.removed == ()
    assert diff.added.boxes == () and diff.added.glyphs == () and diff.added.labels == ()
    assert diff.changed_region == ()
    assert diff.highlight_ms == 300


def test_label_drag_diff_touches_one_label(toy_a):
    tree = build_occurrence_tree(toy_a)
    interest = mark_interest(toy_a, tree, "p")
    view = ViewState(property_id="p")
    dragged = ViewState(property_id="p", label_offsets=(("D", (8.0, 4.0)),))
    diff = compute_layout_diff(toy_a, tree, interest, CFG, view, dragged)
    assert [m.ref_id for m in diff.moved] == [
        f"label:assoc:{tree.occs_of_class['D'][0]}"
    ]
    assert diff.resized == () and diff.removed == ()
    assert diff.added.boxes == () and diff.added.glyphs == ()


def test_chain_expand_diff(toy_b):
    tree = build_occurrence_tree(toy_b)
    interest = mark_interest(toy_b, tree, "p")
    m1 = tree.occs_of_class["M1"][0]
    view = ViewState(property_id="p")
    expanded = view.with_override(m1, "expand")
    prev = layout_for_view(toy_b, tree, interest, CFG, view)
    nxt = layout_for_view(toy_b, tree, interest, CFG, expanded)
    diff = diff_layouts(prev, nxt, tree, view, expanded)
    assert f"glyph:region:chain:{m1}" in diff.removed
    assert len(diff.added.boxes) == 3
    moved_refs = {m.ref_id for m in diff.moved}
    x_occ = tree.occs_of_class["X"][0]
    assert f"glyph:{x_occ}" in moved_refs
    dx = next(m.dx for m in diff.moved if m.ref_id == f"glyph:{x_occ}")
    assert dx == 20.0
    assert diff.highlight_ms == 330
    assert apply_layout_diff(prev, diff) == nxt


def test_collapse_then_expand_round_trip(toy_a):
    tree = build_occurrence_tree(toy_a)
    interest = mark_interest(toy_a, tree, "p")
    base = ViewState(property_id="p")
    b_occ = tree.occs_of_class["B"][0]
    collapsed = base.with_override(b_occ, "collapse")
    l0 = layout_for_view(toy_a, tree, interest, CFG, base)
    l1 = layout_for_view(toy_a, tree, interest, CFG, collapsed)
    d01 = diff_layouts(l0, l1, tree, base, collapsed)
    d10 = diff_layouts(l1, l0, tree, collapsed, base)
    assert apply_layout_diff(l0, d01) == l1
    assert apply_layout_diff(l1, d10) == l0
    assert d01.highlight_ms == 300 + 10 * 3


def test_selection_change_readds_glyph(toy_a):
    tree = build_occurrence_tree(toy_a)
    interest = mark_interest(toy_a, tree, "p")
    view = ViewState(property_id="p")
    selected = ViewState(property_id="p", selection_class_id="D")
    diff = compute_layout_diff(toy_a, tree, interest, CFG, view, selected)
    d_ref = f"glyph:{tree.occs_of_class['D'][0]}"
    assert d_ref in diff.removed
    assert any(g.ref_id == d_ref and g.selection is not None for g in diff.added.glyphs)
    assert diff.moved == ()


def test_changed_region_covers_toggled_subtree(toy_a):
    tree = build_occurrence_tree(toy_a)
    interest = mark_interest(toy_a, tree, "p")
    base = ViewState(property_id="p")
    b_occ = tree.occs_of_class["B"][0]
    collapsed = base.with_override(b_occ, "collapse")
    diff = compute_layout_diff(toy_a, tree, interest, CFG, base, collapsed)
    assert f"box:{b_occ}" in diff.changed_region
    # the region key for the user collapse also lands in scope
    assert any(ref.startswith("glyph:region:user:") for ref in diff.changed_region)


def test_highlight_clamps():
    classes = ["R", "K"] + [f"z{i:03d}" for i in range(260)]
    edges = [("K", "R")] + [(f"z{i:03d}", "K") for i in range(260)]
    snap = build_snapshot(classes=classes, properties=["p"], edges=edges, associations=[("K", "p", "R")])
    tree = build_occurrence_tree(snap)
    interest = mark_interest(snap, tree, "p")
    base = ViewState(property_id="p")
    k_occ = tree.occs_of_class["K"][0]
    collapsed = base.with_override(k_occ, "collapse")
    diff = compute_layout_diff(snap, tree, interest, CFG, base, collapsed)
    assert diff.highlight_ms == 2000


# -- wire shape -----------------------------------------------------------


def test_wire_serialization_is_camel_case(toy_a):
    tree, interest, plan, layout = make(toy_a, "p")
    wire = layout_to_wire(layout)
    assert set(wire) == {"boxes", "glyphs", "separators", "labels", "legend", "totalW", "totalH"}
    assert all("refId" in b for b in wire["boxes"])
    assert isinstance(wire["totalW"], int)
    box = wire["boxes"][0]
    assert {"refId", "ownerOcc", "kind", "x", "y", "w", "h", "depth"} == set(box)
    assert wire["legend"]["bins"][0] == {"lo": 1, "hi": 1, "color": CFG.color_ramp[-1]}


def test_wire_diff_shape(toy_b):
    tree = build_occurrence_tree(toy_b)
    interest = mark_interest(toy_b, tree, "p")
    view = ViewState(property_id="p")
    m1 = tree.occs_of_class["M1"][0]
    diff = compute_layout_diff(toy_b, tree, interest, CFG, view, view.with_override(m1, "expand"))
    wire = diff_to_wire(diff)
    assert set(wire) == {"moved", "resized", "added", "removed", "changedRegion", "highlightMs"}
    assert all({"refId", "dx", "dy"} == set(m) for m in wire["moved"])
    assert all({"refId", "w", "h"} == set(r) for r in wire["resized"])


# -- randomized equivalence -------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_diff_equals_fresh_layout_on_random_sequences(seed):
    rng = random.Random(seed)
    snap = random_tree_snapshot(rng, max_occs=50)
    tree = build_occurrence_tree(snap)
    interest_cache = {}

    def interest_for(view):
        key = (view.property_id, view.focus_class_id)
        if key not in interest_cache:
            if view.focus_class_id is None:
                interest_cache[key] = mark_interest(snap, tree, view.property_id)
            else:
                interest_cache[key] = mark_focus_interest(
                    snap, tree, view.property_id, view.focus_class_id
                )
        return interest_cache[key]

    view = ViewState(property_id="p")
    layout = layout_for_view(snap, tree, interest_for(view), CFG, view)
    for _ in range(6):
        nxt_view = random_view_step(rng, view, tree, snap)
        fresh = layout_for_view(snap, tree, interest_for(nxt_view), CFG, nxt_view)
        diff = diff_layouts(layout, fresh, tree, view, nxt_view)
        replayed = apply_layout_diff(layout, diff)
        assert replayed == fresh
        view, layout = nxt_view, fresh
