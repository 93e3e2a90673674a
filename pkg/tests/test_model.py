import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontoplot import (
    ClassRef,
    CycleError,
    EmptyOntologyError,
    FormatError,
    build_snapshot,
    local_name,
    read_native_document,
    summarize,
    write_native_document,
)


def test_toy_a_counts(toy_a):
    assert len(toy_a.classes) == 7
    assert len(toy_a.properties) == 1
    assert len(toy_a.associations) == 1
    assert len(toy_a.edges) == 6


def test_collections_are_canonically_sorted(toy_a):
    ids = [c.id for c in toy_a.classes]
    assert ids == sorted(ids)
    edges = [(e.child, e.parent) for e in toy_a.edges]
    assert edges == sorted(edges)


def test_duplicates_collapse():
    snap = build_snapshot(
        classes=["A", "B", "B"],
        properties=["p", "p"],
        edges=[("B", "A"), ("B", "A")],
        associations=[("A", "p", "B"), ("A", "p", "B")],
    )
    assert len(snap.classes) == 2
    assert len(snap.properties) == 1
    assert len(snap.edges) == 1
    assert len(snap.associations) == 1


def test_dangling_references_auto_declare_with_warning():
    snap = build_snapshot(
        classes=["A"],
        properties=[],
        edges=[("A", "Ghost")],
        associations=[("A", "q", "Other")],
    )
    assert snap.class_ids() == {"A", "Ghost", "Other"}
    assert snap.property_ids() == {"q"}
    assert any("Ghost" in w for w in snap.provenance.warnings)


def test_cycle_raises():
    with pytest.raises(CycleError):
        build_snapshot(classes=["A", "B"], properties=[], edges=[("A", "B"), ("B", "A")], associations=[])


def test_self_loop_raises():
    with pytest.raises(CycleError):
        build_snapshot(classes=["A"], properties=[], edges=[("A", "A")], associations=[])


def test_empty_raises():
    with pytest.raises(EmptyOntologyError):
        build_snapshot(classes=[], properties=[], edges=[], associations=[])


def test_label_fallback_and_storage():
    snap = build_snapshot(
        classes=["http://x.org/onto#Pain", "http://y.org/a/Leg", "bare"],
        properties=[],
        edges=[],
        associations=[],
        labels={"bare": "Named"},
    )
    assert snap.label_of("http://x.org/onto#Pain") == "Pain"
    assert snap.label_of("http://y.org/a/Leg") == "Leg"
    assert snap.label_of("bare") == "Named"
    stored = {c.id: c.label for c in snap.classes}
    assert stored["http://x.org/onto#Pain"] is None


def test_local_name_rules():
    assert local_name("http://x.org/onto#Pain") == "Pain"
    assert local_name("http://x.org/onto/Pain") == "Pain"
    assert local_name("Pain") == "Pain"


def test_summarize_toy_a(toy_a):
    stats = summarize(toy_a)
    assert stats.class_count == 7
    assert stats.property_count == 1
    assert stats.association_count == 1
    assert stats.per_property_counts == {"p": 1}
    assert stats.root_count == 1
    assert stats.max_depth == 2


def test_summarize_counts_zero_properties():
    snap = build_snapshot(classes=["A"], properties=["p"], edges=[], associations=[])
    assert summarize(snap).per_property_counts == {"p": 0}


def test_association_count_is_sum_of_per_property(toy_c):
    stats = summarize(toy_c)
    assert stats.association_count == sum(stats.per_property_counts.values())


def test_write_read_identity(toy_a):
    data = write_native_document(toy_a)
    again = read_native_document(data)
    assert again == toy_a


def test_write_is_canonical_fixed_point(toy_a):
    first = write_native_document(toy_a)
    second = write_native_document(read_native_document(first))
    assert first == second


def test_write_omits_missing_labels(toy_a):
    doc = json.loads(write_native_document(toy_a))
    assert all("label" not in c for c in doc["classes"])
    assert set(doc) == {"classes", "properties", "edges", "associations"}


def test_read_unknown_member_warns():
    doc = {
        "classes": [{"id": "A", "extra": 1}],
        "properties": [],
        "edges": [],
        "associations": [],
        "flavor": "grape",
    }
    snap = read_native_document(json.dumps(doc).encode())
    assert any("flavor" in w for w in snap.provenance.warnings)
    assert any("extra" in w for w in snap.provenance.warnings)


def test_read_missing_field_is_error():
    doc = {"classes": [{"label": "x"}], "properties": [], "edges": [], "associations": []}
    with pytest.raises(FormatError):
        read_native_document(json.dumps(doc).encode())


def test_read_bad_json_is_error():
    with pytest.raises(FormatError):
        read_native_document(b"{nope")
    with pytest.raises(FormatError):
        read_native_document(b"[1,2]")


def test_provenance_does_not_affect_equality(toy_a):
    other = build_snapshot(
        classes=list("ABCDEFG"),
        properties=["p"],
        edges=[("B", "A"), ("C", "A"), ("D", "B"), ("E", "B"), ("F", "C"), ("G", "C")],
        associations=[("D", "p", "F")],
        source="somewhere-else",
        warnings=("noise",),
    )
    assert other == toy_a


names = st.text(alphabet="abcdefgh", min_size=1, max_size=4)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_summarize_is_permutation_invariant(data):
    classes = data.draw(st.lists(names, min_size=1, max_size=8, unique=True))
    edge_pool = [
        (classes[i], classes[j]) for i in range(len(classes)) for j in range(i)
    ]
    edges = data.draw(st.lists(st.sampled_from(edge_pool), max_size=8)) if edge_pool else []
    assoc_pool = [(a, "p", b) for a in classes for b in classes if a != b]
    assocs = data.draw(st.lists(st.sampled_from(assoc_pool), max_size=8)) if assoc_pool else []

    base = build_snapshot(classes=classes, properties=["p"], edges=edges, associations=assocs)
    shuffled = build_snapshot(
        classes=list(reversed(classes)),
        properties=["p"],
        edges=list(reversed(edges)),
        associations=list(reversed(assocs)),
    )
    assert summarize(base) == summarize(shuffled)
    assert base == shuffled


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_round_trip_is_identity_on_random_snapshots(data):
    classes = data.draw(st.lists(names, min_size=1, max_size=8, unique=True))
    edge_pool = [
        (classes[i], classes[j]) for i in range(len(classes)) for j in range(i)
    ]
    edges = data.draw(st.lists(st.sampled_from(edge_pool), max_size=8)) if edge_pool else []
    labeled = data.draw(st.dictionaries(st.sampled_from(classes), names, max_size=3))
    snap = build_snapshot(classes=classes, properties=["p"], edges=edges, associations=[], labels=labeled)
    assert read_native_document(write_native_document(snap)) == snap


def test_class_ref_rejects_blank_id():
    with pytest.raises(FormatError):
        build_snapshot(classes=[""], properties=[], edges=[], associations=[])
    with pytest.raises(FormatError):
        build_snapshot(classes=[ClassRef(id="")], properties=[], edges=[], associations=[])
