"""Immutable ontology snapshots, the native JSON interchange format, and
summary statistics.

A snapshot is pure data: classes, object properties, subclass edges, and
extracted associations, each canonically sorted so that equal content always
serializes to identical bytes. Provenance (source name, warnings) rides along
but is excluded from equality.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .errors import CycleError, EmptyOntologyError, FormatError


@dataclass(frozen=True, order=True)
class ClassRef:
    id: str
    label: str | None = None


@dataclass(frozen=True, order=True)
class ObjectPropertyRef:
    id: str
    label: str | None = None


@dataclass(frozen=True, order=True)
class SubclassEdge:
    child: str
    parent: str


@dataclass(frozen=True, order=True)
class Association:
    source: str
    property: str
    target: str


@dataclass(frozen=True)
class Provenance:
    source: str = ""
    warnings: tuple[str, ...] = ()

    @property
    def warning_count(self) -> int:
        return len(self.warnings)


@dataclass(frozen=True)
class OntologySnapshot:
    classes: tuple[ClassRef, ...]
    properties: tuple[ObjectPropertyRef, ...]
    edges: tuple[SubclassEdge, ...]
    associations: tuple[Association, ...]
    provenance: Provenance = field(default=Provenance(), compare=False)

    def class_ids(self) -> set[str]:
        return {c.id for c in self.classes}

    def property_ids(self) -> set[str]:
        return {p.id for p in self.properties}

    @cached_property
    def _label_map(self) -> dict[str, str]:
        out: dict[str, str] = {}
        for p in self.properties:
            if p.label:
                out[p.id] = p.label
        for c in self.classes:
            if c.label:
                out[c.id] = c.label
        return out

    def label_of(self, entity_id: str) -> str:
        """Display label: explicit label if present, else IRI local name."""
        hit = self._label_map.get(entity_id)
        return hit if hit is not None else local_name(entity_id)


@dataclass(frozen=True)
class SummaryStats:
    class_count: int
    property_count: int
    association_count: int
    per_property_counts: Mapping[str, int]
    root_count: int
    max_depth: int


def local_name(iri: str) -> str:
    """Fragment after '#', else the last '/' segment, else the IRI itself."""
    if "#" in iri:
        tail = iri.rsplit("#", 1)[1]
        if tail:
            return tail
    if "/" in iri:
        tail = iri.rstrip("/").rsplit("/", 1)[1]
        if tail:
            return tail
    return iri


def build_snapshot(
    classes: Iterable[ClassRef | str],
    properties: Iterable[ObjectPropertyRef | str],
    edges: Iterable[SubclassEdge | tuple[str, str]],
    associations: Iterable[Association | tuple[str, str, str]],
    labels: Mapping[str, str] | None = None,
    source: str = "",
    warnings: Iterable[str] = (),
) -> OntologySnapshot:
    """Validate, deduplicate, auto-declare dangling references, and sort.

    Raises CycleError when subclass edges form a cycle and EmptyOntologyError
    when nothing remains after auto-declaration.
    """
    labels = dict(labels or {})
    warn = list(warnings)

    class_map: dict[str, str | None] = {}
    for c in classes:
        ref = c if isinstance(c, ClassRef) else ClassRef(str(c))
        _check_id(ref.id, "class")
        label = ref.label or labels.get(ref.id)
        if ref.id not in class_map or class_map[ref.id] is None:
            class_map[ref.id] = label

    prop_map: dict[str, str | None] = {}
    for p in properties:
        ref = p if isinstance(p, ObjectPropertyRef) else ObjectPropertyRef(str(p))
        _check_id(ref.id, "property")
        label = ref.label or labels.get(ref.id)
        if ref.id not in prop_map or prop_map[ref.id] is None:
            prop_map[ref.id] = label

    edge_set: set[SubclassEdge] = set()
    for e in edges:
        edge = e if isinstance(e, SubclassEdge) else SubclassEdge(*e)
        _check_id(edge.child, "edge child")
        _check_id(edge.parent, "edge parent")
        edge_set.add(edge)

    assoc_set: set[Association] = set()
    for a in associations:
        assoc = a if isinstance(a, Association) else Association(*a)
        _check_id(assoc.source, "association source")
        _check_id(assoc.property, "association property")
        _check_id(assoc.target, "association target")
        assoc_set.add(assoc)

    # Dangling references become declarations, each with a warning.
    referenced_classes: set[str] = set()
    for edge in edge_set:
        referenced_classes.add(edge.child)
        referenced_classes.add(edge.parent)
    for assoc in assoc_set:
        referenced_classes.add(assoc.source)
        referenced_classes.add(assoc.target)
    for cid in sorted(referenced_classes - set(class_map)):
        class_map[cid] = labels.get(cid)
        warn.append(f"undeclared class auto-declared: {cid}")
    for pid in sorted({a.property for a in assoc_set} - set(prop_map)):
        prop_map[pid] = labels.get(pid)
        warn.append(f"undeclared property auto-declared: {pid}")

    if not class_map:
        raise EmptyOntologyError("ontology declares no classes")

    _check_acyclic(edge_set)

    return OntologySnapshot(
        classes=tuple(ClassRef(i, l) for i, l in sorted(class_map.items())),
        properties=tuple(ObjectPropertyRef(i, l) for i, l in sorted(prop_map.items())),
        edges=tuple(sorted(edge_set)),
        associations=tuple(sorted(assoc_set)),
        provenance=Provenance(source=source, warnings=tuple(warn)),
    )


def _check_id(value: object, what: str) -> None:
    if not isinstance(value, str) or not value:
        raise FormatError(f"{what} id must be a non-empty string, got {value!r}")


def _check_acyclic(edges: set[SubclassEdge]) -> None:
    parents: dict[str, list[str]] = {}
    for e in edges:
        parents.setdefault(e.child, []).append(e.parent)
    for v in parents.values():
        v.sort()

    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    for start in sorted(parents):
        if color.get(start, WHITE) != WHITE:
            continue
        # Iterative DFS along child -> parent links, tracking the path.
        stack: list[tuple[str, int]] = [(start, 0)]
        path: list[str] = []
        while stack:
            node, idx = stack.pop()
            if idx == 0:
                color[node] = GRAY
                path.append(node)
            nxt = parents.get(node, [])
            if idx < len(nxt):
                stack.append((node, idx + 1))
                child = nxt[idx]
                state = color.get(child, WHITE)
                if state == GRAY:
                    cut = path.index(child)
                    raise CycleError(path[cut:] + [child])
                if state == WHITE:
                    stack.append((child, 0))
            else:
                color[node] = BLACK
                path.pop()


# ---------------------------------------------------------------------------
# Native JSON document
# ---------------------------------------------------------------------------

_KNOWN_MEMBERS = ("classes", "properties", "edges", "associations")


def write_native_document(snapshot: OntologySnapshot) -> bytes:
    """Canonical bytes: every section sorted, fixed key order, 2-space indent."""

    def ref(r: ClassRef | ObjectPropertyRef) -> dict:
        out: dict = {"id": r.id}
        if r.label is not None:
            out["label"] = r.label
        return out

    doc = {
        "classes": [ref(c) for c in snapshot.classes],
        "properties": [ref(p) for p in snapshot.properties],
        "edges": [{"child": e.child, "parent": e.parent} for e in snapshot.edges],
        "associations": [
            {"source": a.source, "property": a.property, "target": a.target}
            for a in snapshot.associations
        ],
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def read_native_document(data: bytes | str, source: str = "native") -> OntologySnapshot:
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"not valid UTF-8: {exc}") from exc
    else:
        text = data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise FormatError("top-level value must be an object")

    warnings = [f"unknown member ignored: {key}" for key in doc if key not in _KNOWN_MEMBERS]

    def records(member: str) -> list:
        value = doc.get(member, [])
        if not isinstance(value, list):
            raise FormatError(f"{member}: expected a list, got {type(value).__name__}")
        for i, item in enumerate(value):
            if not isinstance(item, dict):
                raise FormatError(f"{member}[{i}]: expected an object")
        return value

    def fetch(member: str, i: int, item: dict, key: str) -> str:
        if key not in item:
            raise FormatError(f"{member}[{i}]: missing '{key}'")
        value = item[key]
        if not isinstance(value, str) or not value:
            raise FormatError(f"{member}[{i}].{key}: expected a non-empty string")
        return value

    def entity_refs(member: str, factory):
        out = []
        for i, item in enumerate(records(member)):
            label = item.get("label")
            if label is not None and not isinstance(label, str):
                raise FormatError(f"{member}[{i}].label: expected a string")
            for key in item:
                if key not in ("id", "label"):
                    warnings.append(f"{member}[{i}]: unknown field ignored: {key}")
            out.append(factory(fetch(member, i, item, "id"), label))
        return out

    classes = entity_refs("classes", ClassRef)
    properties = entity_refs("properties", ObjectPropertyRef)

    edges = []
    for i, item in enumerate(records("edges")):
        for key in item:
            if key not in ("child", "parent"):
                warnings.append(f"edges[{i}]: unknown field ignored: {key}")
        edges.append(SubclassEdge(fetch("edges", i, item, "child"), fetch("edges", i, item, "parent")))

    associations = []
    for i, item in enumerate(records("associations")):
        for key in item:
            if key not in ("source", "property", "target"):
                warnings.append(f"associations[{i}]: unknown field ignored: {key}")
        associations.append(
            Association(
                fetch("associations", i, item, "source"),
                fetch("associations", i, item, "property"),
                fetch("associations", i, item, "target"),
            )
        )

    return build_snapshot(classes, properties, edges, associations, source=source, warnings=warnings)


def summarize(snapshot: OntologySnapshot) -> SummaryStats:
    from .hierarchy import build_occurrence_tree  # local import: hierarchy depends on model

    per_property = {p.id: 0 for p in snapshot.properties}
    for a in snapshot.associations:
        per_property[a.property] = per_property.get(a.property, 0) + 1

    has_parent = {e.child for e in snapshot.edges}
    roots = [c.id for c in snapshot.classes if c.id not in has_parent]

    tree = build_occurrence_tree(snapshot)
    max_depth = max(node.depth for node in tree.nodes)

    return SummaryStats(
        class_count=len(snapshot.classes),
        property_count=len(snapshot.properties),
        association_count=len(snapshot.associations),
        per_property_counts=per_property,
        root_count=len(roots),
        max_depth=max_depth,
    )
