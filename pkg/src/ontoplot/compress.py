"""Interest marking and visual compression of uninteresting subtrees.

A class is interesting when it has at least one association of the selected
property (either direction); focus mode narrows this to the focal class and
its direct association partners. Barren subtrees (zero interesting classes)
collapse into glyph regions when their parent's subtree is not itself barren:
merged squares for leaves, thin chains for paths, triangles for anything else.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RootCollapseError, UnknownClassError, UnknownOccurrenceError, UnknownPropertyError
from .hierarchy import OccurrenceTree
from .model import OntologySnapshot

EXPAND = "expand"
COLLAPSE = "collapse"

SQUARE_MERGE = "square_merge"
CHAIN = "chain"
SUBTREE = "subtree"


@dataclass(frozen=True)
class InterestModel:
    mode: str  # "property" | "focus"
    property_id: str
    focus_class_id: str | None
    interesting: frozenset[str]
    count_by_class: dict[str, int]  # nonzero association counts
    subtree_interesting: tuple[int, ...]  # per occurrence id


@dataclass(frozen=True)
class CompressedRegion:
    kind: str  # square_merge | chain | subtree
    anchor_occ: int  # the visible parent occurrence
    members: tuple[int, ...]  # square: hidden leaves; chain: the path; subtree: (root,)
    hidden_count: int
    max_assoc_inside: int = 0
    forced: bool = False

    @property
    def key(self) -> str:
        if self.forced:
            return f"user:{self.members[0]}"
        if self.kind == SQUARE_MERGE:
            return f"sq:{self.anchor_occ}"
        if self.kind == CHAIN:
            return f"chain:{self.members[0]}"
        return f"tri:{self.members[0]}"

    def hidden_occs(self, tree: OccurrenceTree) -> list[int]:
        if self.kind == SUBTREE:
            return tree.subtree_occs(self.members[0])
        return list(self.members)


@dataclass
class CompressionPlan:
    regions: tuple[CompressedRegion, ...]
    visible_occs: frozenset[int]
    visit_count: int = field(default=0, compare=False)

    def region_by_key(self, key: str) -> CompressedRegion | None:
        for r in self.regions:
            if r.key == key:
                return r
        return None


def _bfs_order(tree: OccurrenceTree) -> list[int]:
    order = [tree.root]
    for o in order:
        order.extend(tree.nodes[o].children)
    return order


def _subtree_interesting(tree: OccurrenceTree, interesting: frozenset[str]) -> tuple[int, ...]:
    st = [0] * len(tree.nodes)
    for o in reversed(_bfs_order(tree)):
        node = tree.nodes[o]
        n = 1 if node.class_id in interesting else 0
        for k in node.children:
            n += st[k]
        st[o] = n
    return tuple(st)


def mark_interest(snapshot: OntologySnapshot, tree: OccurrenceTree, property_id: str) -> InterestModel:
    """Property mode: count every association of the property per class,
    each record once even when a class sits on both ends."""
    if property_id not in snapshot.property_ids():
        raise UnknownPropertyError(property_id)
    counts: dict[str, int] = {}
    for a in snapshot.associations:
        if a.property != property_id:
            continue
        counts[a.source] = counts.get(a.source, 0) + 1
        if a.target != a.source:
            counts[a.target] = counts.get(a.target, 0) + 1
    interesting = frozenset(counts)
    return InterestModel(
        mode="property",
        property_id=property_id,
        focus_class_id=None,
        interesting=interesting,
        count_by_class=counts,
        subtree_interesting=_subtree_interesting(tree, interesting),
    )


def mark_focus_interest(
    snapshot: OntologySnapshot, tree: OccurrenceTree, property_id: str, focus_class_id: str
) -> InterestModel:
    """Focus mode: the focal class plus classes touching it via the property;
    counts consider only associations that touch the focal class."""
    if focus_class_id not in snapshot.class_ids():
        raise UnknownClassError(focus_class_id)
    if property_id not in snapshot.property_ids():
        raise UnknownPropertyError(property_id)
    counts: dict[str, int] = {}
    for a in snapshot.associations:
        if a.property != property_id:
            continue
        if a.source == focus_class_id or a.target == focus_class_id:
            counts[a.source] = counts.get(a.source, 0) + 1
            if a.target != a.source:
                counts[a.target] = counts.get(a.target, 0) + 1
    interesting = frozenset(counts) | {focus_class_id}
    return InterestModel(
        mode="focus",
        property_id=property_id,
        focus_class_id=focus_class_id,
        interesting=interesting,
        count_by_class=counts,
        subtree_interesting=_subtree_interesting(tree, interesting),
    )


def detect_collapsible(tree: OccurrenceTree, interest: InterestModel) -> CompressionPlan:
    return _compress(tree, interest, {})


def apply_overrides(
    plan: CompressionPlan,
    tree: OccurrenceTree,
    interest: InterestModel,
    overrides: dict[int, str],
) -> CompressionPlan:
    """Re-plan with user overrides.

    The topmost forceCollapsed on each root path wins; forceExpanded keeps
    the whole subtree visible and suppresses auto-collapse inside it, except
    for nested forced collapses. `plan` is the override-free baseline and is
    superseded wholesale (auto regions are re-derived under the constraints).
    """
    del plan  # semantics are defined by tree + interest + overrides alone
    return _compress(tree, interest, overrides)


def _compress(tree: OccurrenceTree, interest: InterestModel, overrides: dict[int, str]) -> CompressionPlan:
    n = len(tree.nodes)
    for occ, action in overrides.items():
        if not isinstance(occ, int) or occ < 0 or occ >= n:
            raise UnknownOccurrenceError(occ)
        if action == COLLAPSE and occ == tree.root:
            raise RootCollapseError("the root occurrence cannot be collapsed")
        if action not in (EXPAND, COLLAPSE):
            raise ValueError(f"override must be {EXPAND!r} or {COLLAPSE!r}, got {action!r}")

    order = _bfs_order(tree)
    st = interest.subtree_interesting

    # One post-order sweep: subtree size and path shape, one visit per occ.
    size = [1] * n
    path_shape = [True] * n
    visits = 0
    for o in reversed(order):
        visits += 1
        kids = tree.nodes[o].children
        if kids:
            size[o] = 1 + sum(size[k] for k in kids)
            path_shape[o] = len(kids) == 1 and path_shape[kids[0]]

    collapse_occs = sorted(o for o, act in overrides.items() if act == COLLAPSE)
    expand_occs = sorted(o for o, act in overrides.items() if act == EXPAND)

    def has_collapsed_ancestor(occ: int) -> bool:
        p = tree.nodes[occ].parent_occ
        while p is not None:
            if p in collapse_set:
                return True
            p = tree.nodes[p].parent_occ
        return False

    collapse_set = set(collapse_occs)
    active_collapses = [o for o in collapse_occs if not has_collapsed_ancestor(o)]

    force_hidden: set[int] = set()
    forced_regions: list[CompressedRegion] = []
    for o in active_collapses:
        occs = tree.subtree_occs(o)
        force_hidden.update(occs)
        max_inside = 0
        for h in occs:
            c = interest.count_by_class.get(tree.nodes[h].class_id, 0)
            if c > max_inside:
                max_inside = c
        if size[o] == 1:
            kind, members = SQUARE_MERGE, (o,)
        elif path_shape[o]:
            kind, members = CHAIN, tuple(occs)  # a path's preorder is the path
        else:
            kind, members = SUBTREE, (o,)
        forced_regions.append(
            CompressedRegion(
                kind=kind,
                anchor_occ=tree.nodes[o].parent_occ,
                members=members,
                hidden_count=len(occs),
                max_assoc_inside=max_inside,
                forced=True,
            )
        )

    suppressed: set[int] = set()
    for o in expand_occs:
        suppressed.update(tree.subtree_occs(o))

    # blocked[o]: subtree(o) touches a forced region or an expanded subtree,
    # so auto-collapse may not swallow it.
    blocked = [False] * n
    for o in reversed(order):
        node = tree.nodes[o]
        b = o in force_hidden or o in suppressed
        if not b:
            for k in node.children:
                if blocked[k]:
                    b = True
                    break
        blocked[o] = b

    regions = list(forced_regions)
    hidden: set[int] = set(force_hidden)
    visible: list[int] = []
    forced_roots = {r.members[0] for r in forced_regions}

    stack = [tree.root]
    while stack:
        p = stack.pop()
        visible.append(p)
        barren_leaves: list[int] = []
        parent_has_interest = st[p] >= 1
        for c in tree.nodes[p].children:
            if c in forced_roots:
                continue  # replaced by its forced region glyph
            if parent_has_interest and st[c] == 0 and not blocked[c]:
                if size[c] == 1:
                    barren_leaves.append(c)
                elif path_shape[c]:
                    members = tuple(tree.subtree_occs(c))
                    hidden.update(members)
                    regions.append(
                        CompressedRegion(CHAIN, p, members, len(members))
                    )
                else:
                    occs = tree.subtree_occs(c)
                    hidden.update(occs)
                    regions.append(
                        CompressedRegion(SUBTREE, p, (c,), len(occs))
                    )
            else:
                stack.append(c)
        if barren_leaves:
            hidden.update(barren_leaves)
            regions.append(
                CompressedRegion(SQUARE_MERGE, p, tuple(barren_leaves), len(barren_leaves))
            )

    regions.sort(key=lambda r: r.key)
    return CompressionPlan(
        regions=tuple(regions),
        visible_occs=frozenset(visible),
        visit_count=visits,
    )
