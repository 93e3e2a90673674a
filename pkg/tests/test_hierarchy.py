import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from generators import random_dag_instance
from ontoplot import (
    NoCommonAncestorError,
    QueryEngine,
    SYNTHETIC_ROOT_ID,
    UnknownClassError,
    UnknownPropertyError,
    build_occurrence_tree,
    build_snapshot,
)


def engine(snapshot):
    return QueryEngine(snapshot)


# -- occurrence tree ----------------------------------------------------------


def test_toy_a_tree_shape(toy_a):
    tree = build_occurrence_tree(toy_a)
    assert len(tree) == 7
    assert not tree.synthetic_root
    depths = {tree.nodes[o].class_id: tree.nodes[o].depth for o in range(len(tree))}
    assert depths == {"A": 0, "B": 1, "C": 1, "D": 2, "E": 2, "F": 2, "G": 2}


def test_multi_parent_duplicates():
    snap = build_snapshot(
        classes=["A", "B", "C", "X"],
        properties=[],
        edges=[("B", "A"), ("C", "A"), ("X", "B"), ("X", "C")],
        associations=[],
    )
    tree = build_occurrence_tree(snap)
    assert len(tree.occs_of_class["X"]) == 2
    assert len(tree) == 5


def test_children_attach_to_primary_occurrence_only():
    snap = build_snapshot(
        classes=["A", "B", "C", "X", "Y"],
        properties=[],
        edges=[("B", "A"), ("C", "A"), ("X", "B"), ("X", "C"), ("Y", "X")],
        associations=[],
    )
    tree = build_occurrence_tree(snap)
    xs = tree.occs_of_class["X"]
    assert len(xs) == 2
    with_children = [o for o in xs if tree.nodes[o].children]
    assert len(with_children) == 1
    primary = with_children[0]
    # primary occurrence sits under the canonically first parent, B
    assert tree.nodes[tree.nodes[primary].parent_occ].class_id == "B"


def test_synthetic_root_for_forest():
    snap = build_snapshot(classes=["A1", "A2"], properties=[], edges=[], associations=[])
    tree = build_occurrence_tree(snap)
    assert tree.synthetic_root
    assert tree.nodes[tree.root].class_id == SYNTHETIC_ROOT_ID
    kids = [tree.nodes[o].class_id for o in tree.nodes[tree.root].children]
    assert kids == ["A1", "A2"]
    assert len(tree) == 3


def test_child_order_is_canonical_edge_order(toy_a):
    tree = build_occurrence_tree(toy_a)
    root_kids = [tree.nodes[o].class_id for o in tree.nodes[tree.root].children]
    assert root_kids == ["B", "C"]


def test_every_nonroot_occurrence_has_a_parent(toy_c):
    tree = build_occurrence_tree(toy_c)
    for node in tree.nodes:
        if node.occ_id == tree.root:
            assert node.parent_occ is None
        else:
            parent = tree.nodes[node.parent_occ]
            assert node.occ_id in parent.children
            assert node.depth == parent.depth + 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10_000))
def test_occurrence_count_formula(seed):
    rng = random.Random(seed)
    snap, classes, edges, _ = random_dag_instance(rng, max_classes=30, max_assocs=0)
    tree = build_occurrence_tree(snap)
    assert len(tree) == oracles.occurrence_count(classes, edges)


# -- hierarchy queries --------------------------------------------------------


def test_parents_children_siblings(toy_a):
    eng = engine(toy_a)
    assert eng.parents_of("D") == ["B"]
    assert eng.children_of("B") == ["D", "E"]
    assert eng.siblings_of("B") == ["C"]
    assert eng.siblings_of("D") == ["E"]


def test_single_class_has_no_siblings():
    snap = build_snapshot(classes=["A"], properties=[], edges=[], associations=[])
    assert engine(snap).siblings_of("A") == []


def test_root_siblings_are_other_roots():
    snap = build_snapshot(classes=["A1", "A2", "A3"], properties=[], edges=[], associations=[])
    assert engine(snap).siblings_of("A2") == ["A1", "A3"]


def test_paths_to_root(toy_a):
    assert engine(toy_a).paths_to_root("D") == [["D", "B", "A"]]
    assert engine(toy_a).paths_to_root("A") == [["A"]]


def test_paths_enumerate_all_routes():
    snap = build_snapshot(
        classes=["A", "B", "C", "X"],
        properties=[],
        edges=[("B", "A"), ("C", "A"), ("X", "B"), ("X", "C")],
        associations=[],
    )
    assert engine(snap).paths_to_root("X") == [["X", "B", "A"], ["X", "C", "A"]]


def test_paths_exclude_synthetic_root():
    snap = build_snapshot(classes=["A1", "A2"], properties=[], edges=[], associations=[])
    assert engine(snap).paths_to_root("A1") == [["A1"]]


def test_common_ancestors(toy_a):
    eng = engine(toy_a)
    assert eng.closest_common_ancestors("D", "E") == (["B"], 2)
    assert eng.closest_common_ancestors("D", "F") == (["A"], 4)
    assert eng.closest_common_ancestors("D", "B") == (["B"], 1)
    assert eng.closest_common_ancestors("D", "D") == (["D"], 0)


def test_common_ancestor_through_synthetic_root():
    snap = build_snapshot(
        classes=["A1", "A2", "B1"],
        properties=[],
        edges=[("B1", "A1")],
        associations=[],
    )
    ancestors, dist = engine(snap).closest_common_ancestors("B1", "A2")
    assert ancestors == [SYNTHETIC_ROOT_ID]
    assert dist == 3


def test_unknown_class_errors(toy_a):
    eng = engine(toy_a)
    with pytest.raises(UnknownClassError):
        eng.parents_of("missing")
    with pytest.raises(UnknownClassError):
        eng.closest_common_ancestors("A", "missing")


# -- association queries ------------------------------------------------------


def test_associated_classes_directions(toy_a):
    eng = engine(toy_a)
    assert eng.associated_classes("D", "p", "out") == ["F"]
    assert eng.associated_classes("F", "p", "in") == ["D"]
    assert eng.associated_classes("F", "p", "out") == []
    assert eng.associated_classes("D", "p") == ["F"]


def test_association_count(toy_a, toy_c):
    assert engine(toy_a).association_count("D", "p") == 1
    assert engine(toy_c).association_count("L1", "r") == 2
    assert engine(toy_c).association_count("Z1", "r", "in") == 2
    assert engine(toy_c).association_count("Z1", "r", "out") == 0


def test_max_association_classes_reports_all_ties(toy_c):
    assert engine(toy_c).max_association_classes("r") == (["L1", "Z1"], 2)


def test_max_association_classes_empty_property(toy_a):
    snap = build_snapshot(classes=["A"], properties=["p"], edges=[], associations=[])
    assert engine(snap).max_association_classes("p") == ([], 0)


def test_class_effect_direct(toy_a):
    report = engine(toy_a).class_effect("B", "p")
    assert report.covered == ("D",)
    assert report.total == 2
    assert report.ratio == 0.5
    assert not report.holds


def test_class_effect_holds():
    snap = build_snapshot(
        classes=["P", "K1", "K2", "Z"],
        properties=["r"],
        edges=[("K1", "P"), ("K2", "P")],
        associations=[("K1", "r", "Z"), ("K2", "r", "Z")],
    )
    report = engine(snap).class_effect("P", "r", target="Z")
    assert report.holds and report.ratio == 1.0


def test_class_effect_transitive_uses_leaf_descendants():
    snap = build_snapshot(
        classes=["P", "M", "K1", "K2", "Z"],
        properties=["r"],
        edges=[("M", "P"), ("K1", "M"), ("K2", "M")],
        associations=[("K1", "r", "Z"), ("K2", "r", "Z")],
    )
    direct = engine(snap).class_effect("P", "r", target="Z")
    assert not direct.holds
    trans = engine(snap).class_effect("P", "r", target="Z", transitive=True)
    assert trans.holds and trans.covered == ("K1", "K2")


def test_class_effect_childless_parent_does_not_hold(toy_a):
    report = engine(toy_a).class_effect("D", "p")
    assert report.total == 0 and not report.holds and report.ratio == 0.0


def test_most_associated_children(toy_c):
    assert engine(toy_c).most_associated_children("r", "Z1") == (["P"], 2)


def test_most_associated_children_no_hits(toy_a):
    snap = build_snapshot(
        classes=["A", "B"], properties=["p"], edges=[("B", "A")], associations=[]
    )
    assert engine(snap).most_associated_children("p", "A") == ([], 0)


def test_sibling_outliers():
    snap = build_snapshot(
        classes=["T", "P", "L1", "L2", "L3", "Z"],
        properties=["r"],
        edges=[("P", "T"), ("Z", "T"), ("L1", "P"), ("L2", "P"), ("L3", "P")],
        associations=[("L1", "r", "Z"), ("L2", "r", "Z")],
    )
    assert engine(snap).sibling_outliers("r", "Z") == ["L3"]


def test_unknown_property_errors(toy_a):
    with pytest.raises(UnknownPropertyError):
        engine(toy_a).associated_classes("D", "nope")
    with pytest.raises(UnknownPropertyError):
        engine(toy_a).max_association_classes("nope")


# -- oracle properties --------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_queries_match_brute_force(seed):
    rng = random.Random(seed)
    snap, classes, edges, assocs = random_dag_instance(rng, max_classes=25, max_assocs=40)
    eng = engine(snap)
    triples = [(a, p, t) for a, p, t in assocs]

    probe = classes[rng.randrange(len(classes))]
    expected_paths = sorted(oracles.all_up_paths(probe, edges))
    assert sorted(eng.paths_to_root(probe)) == expected_paths

    a = classes[rng.randrange(len(classes))]
    b = classes[rng.randrange(len(classes))]
    parents = oracles.parent_map(edges)
    roots = [c for c in classes if not parents.get(c)]
    extra = SYNTHETIC_ROOT_ID if len(roots) != 1 else None
    expected = oracles.common_ancestors(a, b, edges, extra_root=extra)
    if expected is None:
        with pytest.raises(NoCommonAncestorError):
            eng.closest_common_ancestors(a, b)
    else:
        assert eng.closest_common_ancestors(a, b) == expected

    got = eng.class_effect(probe, "p")
    want_cov, want_total, want_holds = oracles.class_effect(probe, "p", edges, triples)
    assert (list(got.covered), got.total, got.holds) == (want_cov, want_total, want_holds)

    target = classes[rng.randrange(len(classes))]
    want = oracles.most_associated_children("p", target, edges, triples)
    assert eng.most_associated_children("p", target) == (want[0], want[1])

    assert eng.sibling_outliers("p", target) == oracles.sibling_outliers(
        "p", target, classes, edges, triples
    )

    for direction in ("out", "in", "both"):
        assert eng.association_count(probe, "p", direction) == oracles.association_count(
            probe, "p", triples, direction
        )
