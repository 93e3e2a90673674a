"""Occurrence-tree construction and hierarchy/association queries.

The display tree duplicates every class once per parent: exactly one
occurrence per (class, parent) pair. When a parent class itself occurs
several times, its children attach to its primary occurrence (the one under
its first canonical parent); the other occurrences are childless copies.
Parentless classes hang off a synthetic root unless there is exactly one.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import NoCommonAncestorError, UnknownClassError, UnknownPropertyError
from .model import Association, OntologySnapshot

SYNTHETIC_ROOT_ID = "owl:Thing"
SYNTHETIC_ROOT_LABEL = "Thing"


@dataclass
class OccurrenceNode:
    occ_id: int
    class_id: str
    parent_occ: int | None
    children: tuple[int, ...] = ()
    depth: int = 0


@dataclass
class OccurrenceTree:
    nodes: list[OccurrenceNode]
    root: int
    synthetic_root: bool
    occs_of_class: dict[str, list[int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, occ_id: int) -> OccurrenceNode:
        return self.nodes[occ_id]

    def subtree_occs(self, occ_id: int) -> list[int]:
        """Preorder occurrence ids of the subtree rooted at occ_id."""
        out: list[int] = []
        stack = [occ_id]
        while stack:
            o = stack.pop()
            out.append(o)
            stack.extend(reversed(self.nodes[o].children))
        return out

    def subtree_size(self, occ_id: int) -> int:
        return len(self.subtree_occs(occ_id))

    def is_path(self, occ_id: int) -> bool:
        """True when the subtree is a chain: every node has at most one child."""
        o = occ_id
        while True:
            kids = self.nodes[o].children
            if len(kids) > 1:
                return False
            if not kids:
                return True
            o = kids[0]


def build_occurrence_tree(snapshot: OntologySnapshot) -> OccurrenceTree:
    parents: dict[str, list[str]] = {}
    children: dict[str, list[str]] = {}
    for e in snapshot.edges:  # canonically sorted by (child, parent)
        parents.setdefault(e.child, []).append(e.parent)
        children.setdefault(e.parent, []).append(e.child)

    all_ids = [c.id for c in snapshot.classes]
    roots = [cid for cid in all_ids if cid not in parents]
    synthetic = len(roots) != 1

    nodes: list[OccurrenceNode] = []
    occ_of: dict[tuple[str, str | None], int] = {}
    primary: dict[str, int] = {}
    occs_of_class: dict[str, list[int]] = {}

    def new_occ(class_id: str, parent_key: str | None, parent_occ: int | None) -> int:
        occ = len(nodes)
        nodes.append(OccurrenceNode(occ, class_id, parent_occ))
        occ_of[(class_id, parent_key)] = occ
        occs_of_class.setdefault(class_id, []).append(occ)
        if class_id not in primary:
            primary[class_id] = occ
        return occ

    if synthetic:
        root = new_occ(SYNTHETIC_ROOT_ID, None, None)
    else:
        root = new_occ(roots[0], None, None)

    # Parents-first (Kahn) order keeps primary occurrences available before
    # their children are placed; the heap makes the order deterministic.
    pending = {cid: len(ps) for cid, ps in parents.items()}
    ready = [cid for cid in roots]
    heapq.heapify(ready)
    topo: list[str] = []
    while ready:
        cid = heapq.heappop(ready)
        topo.append(cid)
        for kid in children.get(cid, ()):
            pending[kid] -= 1
            if pending[kid] == 0:
                heapq.heappush(ready, kid)

    for cid in topo:
        ps = parents.get(cid)
        if ps is None:
            if not synthetic and cid == roots[0]:
                continue  # already the root occurrence
            new_occ(cid, SYNTHETIC_ROOT_ID, root)
        else:
            for p in ps:
                new_occ(cid, p, primary[p])

    # Children in subclass-edge order; only primary occurrences have children.
    for node in nodes:
        if node.occ_id != primary.get(node.class_id) and node.occ_id != root:
            continue
        if node.occ_id == root and synthetic:
            node.children = tuple(occ_of[(r, SYNTHETIC_ROOT_ID)] for r in roots)
        else:
            node.children = tuple(occ_of[(k, node.class_id)] for k in children.get(node.class_id, ()))

    order = [root]
    for o in order:
        for k in nodes[o].children:
            nodes[k].depth = nodes[o].depth + 1
            order.append(k)

    return OccurrenceTree(nodes=nodes, root=root, synthetic_root=synthetic, occs_of_class=occs_of_class)


@dataclass(frozen=True)
class ClassEffectReport:
    parent: str
    property: str
    target: str | None
    covered: tuple[str, ...]
    total: int
    ratio: float
    holds: bool


class QueryEngine:
    """Hierarchy and association queries over one immutable snapshot."""

    def __init__(self, snapshot: OntologySnapshot):
        self.snapshot = snapshot
        self._class_ids = snapshot.class_ids()
        self._property_ids = snapshot.property_ids()
        self._parents: dict[str, list[str]] = {}
        self._children: dict[str, list[str]] = {}
        for e in snapshot.edges:
            self._parents.setdefault(e.child, []).append(e.parent)
            self._children.setdefault(e.parent, []).append(e.child)
        self._by_property: dict[str, list[Association]] = {p: [] for p in self._property_ids}
        for a in snapshot.associations:
            self._by_property[a.property].append(a)
        self._roots = sorted(cid for cid in self._class_ids if cid not in self._parents)

    # -- validation helpers -------------------------------------------------

    def _need_class(self, class_id: str) -> None:
        if class_id not in self._class_ids:
            raise UnknownClassError(class_id)

    def _need_property(self, property_id: str) -> None:
        if property_id not in self._property_ids:
            raise UnknownPropertyError(property_id)

    # -- hierarchy ----------------------------------------------------------

    def parents_of(self, class_id: str) -> list[str]:
        self._need_class(class_id)
        return sorted(self._parents.get(class_id, []))

    def children_of(self, class_id: str) -> list[str]:
        self._need_class(class_id)
        return list(self._children.get(class_id, []))

    def siblings_of(self, class_id: str) -> list[str]:
        self._need_class(class_id)
        ps = self._parents.get(class_id)
        if not ps:
            sibs = set(self._roots)
        else:
            sibs = set()
            for p in ps:
                sibs.update(self._children.get(p, ()))
        sibs.discard(class_id)
        return sorted(sibs)

    def paths_to_root(self, class_id: str) -> list[list[str]]:
        """All upward paths from the class to a parentless ancestor.

        The synthetic root never appears in paths.
        """
        self._need_class(class_id)

        @lru_cache(maxsize=None)
        def suffixes(cid: str) -> tuple[tuple[str, ...], ...]:
            ps = self._parents.get(cid)
            if not ps:
                return ((cid,),)
            out = []
            for p in sorted(ps):
                for tail in suffixes(p):
                    out.append((cid,) + tail)
            return tuple(out)

        return [list(path) for path in suffixes(class_id)]

    def _updistances(self, class_id: str) -> dict[str, int]:
        """Shortest directed-path distance to every ancestor-or-self."""
        dist = {class_id: 0}
        frontier = [class_id]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for c in frontier:
                for p in self._parents.get(c, ()):
                    if p not in dist:
                        dist[p] = d
                        nxt.append(p)
            frontier = nxt
        if len(self._roots) != 1:
            reachable_roots = [r for r in self._roots if r in dist]
            if reachable_roots:
                dist[SYNTHETIC_ROOT_ID] = min(dist[r] for r in reachable_roots) + 1
        return dist

    def closest_common_ancestors(self, a: str, b: str) -> tuple[list[str], int]:
        """Common ancestors minimizing dist(c,a) + dist(c,b); all ties returned."""
        self._need_class(a)
        self._need_class(b)
        da = self._updistances(a)
        db = self._updistances(b)
        common = set(da) & set(db)
        if not common:
            raise NoCommonAncestorError(f"no common ancestor of {a} and {b}")
        best = min(da[c] + db[c] for c in common)
        return sorted(c for c in common if da[c] + db[c] == best), best

    # -- associations ---------------------------------------------------------

    def associated_classes(self, class_id: str, property_id: str, direction: str = "both") -> list[str]:
        self._need_class(class_id)
        self._need_property(property_id)
        out: set[str] = set()
        for a in self._by_property[property_id]:
            if direction in ("out", "both") and a.source == class_id:
                out.add(a.target)
            if direction in ("in", "both") and a.target == class_id:
                out.add(a.source)
        return sorted(out)

    def association_count(self, class_id: str, property_id: str, direction: str = "both") -> int:
        self._need_class(class_id)
        self._need_property(property_id)
        n = 0
        for a in self._by_property[property_id]:
            if direction == "out":
                n += a.source == class_id
            elif direction == "in":
                n += a.target == class_id
            else:  # each record counts once even when class is on both ends
                n += a.source == class_id or a.target == class_id
        return n

    def max_association_classes(self, property_id: str) -> tuple[list[str], int]:
        self._need_property(property_id)
        counts: dict[str, int] = {}
        for a in self._by_property[property_id]:
            counts[a.source] = counts.get(a.source, 0) + 1
            if a.target != a.source:
                counts[a.target] = counts.get(a.target, 0) + 1
        if not counts:
            return [], 0
        best = max(counts.values())
        return sorted(c for c, n in counts.items() if n == best), best

    def class_effect(
        self,
        parent: str,
        property_id: str,
        target: str | None = None,
        transitive: bool = False,
    ) -> ClassEffectReport:
        """Do all children of `parent` carry an association of `property`?

        Children are covered when they are the source of a matching
        association; `transitive` widens direct children to leaf descendants.
        """
        self._need_class(parent)
        self._need_property(property_id)
        if target is not None:
            self._need_class(target)

        if transitive:
            members = self._leaf_descendants(parent)
        else:
            members = list(self._children.get(parent, ()))

        sources: set[str] = set()
        for a in self._by_property[property_id]:
            if target is None or a.target == target:
                sources.add(a.source)

        covered = tuple(sorted(c for c in members if c in sources))
        total = len(members)
        ratio = (len(covered) / total) if total else 0.0
        return ClassEffectReport(
            parent=parent,
            property=property_id,
            target=target,
            covered=covered,
            total=total,
            ratio=ratio,
            holds=total > 0 and len(covered) == total,
        )

    def _leaf_descendants(self, class_id: str) -> list[str]:
        visited = set(self._children.get(class_id, ()))
        stack = list(visited)
        leaves: set[str] = set()
        while stack:
            c = stack.pop()
            kids = self._children.get(c, ())
            if not kids:
                leaves.add(c)
            for k in kids:
                if k not in visited:
                    visited.add(k)
                    stack.append(k)
        return sorted(leaves)

    def _touches(self, class_id: str, property_id: str, other: str) -> bool:
        for a in self._by_property[property_id]:
            if (a.source == class_id and a.target == other) or (a.source == other and a.target == class_id):
                return True
        return False

    def most_associated_children(self, property_id: str, target: str) -> tuple[list[str], int]:
        """Parents ranked by how many of their children touch `target`."""
        self._need_property(property_id)
        self._need_class(target)
        touching: set[str] = set()
        for a in self._by_property[property_id]:
            if a.target == target:
                touching.add(a.source)
            if a.source == target:
                touching.add(a.target)
        best_parents: list[str] = []
        best = 0
        for parent in sorted(self._children):
            n = sum(1 for kid in self._children[parent] if kid in touching)
            if n > best:
                best, best_parents = n, [parent]
            elif n == best and n > 0:
                best_parents.append(parent)
        if best == 0:
            return [], 0
        return best_parents, best

    def sibling_outliers(self, property_id: str, target: str) -> list[str]:
        """Classes whose every sibling touches `target` while they do not."""
        self._need_property(property_id)
        self._need_class(target)
        touching: set[str] = set()
        for a in self._by_property[property_id]:
            if a.target == target:
                touching.add(a.source)
            if a.source == target:
                touching.add(a.target)
        out = []
        for cid in sorted(self._class_ids):
            if cid in touching:
                continue
            sibs = self.siblings_of(cid)
            if sibs and all(s in touching for s in sibs):
                out.append(cid)
        return out
