"""Deterministic geometry for the compressed icicle view.

Every visible internal occurrence becomes a box whose width is the sum of its
children's widths; display-leaf children of one parent wrap into a per-parent
grid box together with the region glyphs anchored there. Row heights are
uniform per depth. The layout, its legend, and the incremental diff are pure
functions of (snapshot, tree, interest, plan, config, view), so identical
inputs always produce identical output; the diff contract depends on it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .compress import CHAIN, COLLAPSE, EXPAND, SQUARE_MERGE, CompressionPlan, InterestModel, apply_overrides, detect_collapsible
from .errors import InconsistentPlanError
from .hierarchy import SYNTHETIC_ROOT_ID, SYNTHETIC_ROOT_LABEL, OccurrenceTree
from .model import OntologySnapshot


@dataclass(frozen=True)
class LayoutConfig:
    cell_size: int = 16
    glyph_diameter: int = 12
    box_padding: int = 2
    level_gap: int = 4
    max_grid_columns: int = 8
    char_width: int = 7
    label_angle_deg: int = 45
    color_ramp: tuple[str, ...] = ("#fff5c2", "#fdd17e", "#f99a45", "#e6512d", "#a50f15")
    font_size: int = 11


@dataclass(frozen=True)
class ViewState:
    property_id: str
    focus_class_id: str | None = None
    selection_class_id: str | None = None
    overrides: tuple[tuple[int, str], ...] = ()
    pinned_labels: tuple[str, ...] = ()
    label_offsets: tuple[tuple[str, tuple[float, float]], ...] = ()

    def overrides_dict(self) -> dict[int, str]:
        return dict(self.overrides)

    def offsets_dict(self) -> dict[str, tuple[float, float]]:
        return dict(self.label_offsets)

    def with_override(self, occ: int, action: str | None) -> "ViewState":
        d = self.overrides_dict()
        if action is None:
            d.pop(occ, None)
        else:
            d[occ] = action
        return replace(self, overrides=tuple(sorted(d.items())))

    def to_wire(self) -> dict:
        out: dict = {"propertyId": self.property_id}
        if self.focus_class_id is not None:
            out["focusClassId"] = self.focus_class_id
        if self.selection_class_id is not None:
            out["selectionClassId"] = self.selection_class_id
        out["overrides"] = {str(occ): act for occ, act in self.overrides}
        out["pinnedLabels"] = list(self.pinned_labels)
        out["labelOffsets"] = {cid: [dx, dy] for cid, (dx, dy) in self.label_offsets}
        return out

    @staticmethod
    def from_wire(data: dict) -> "ViewState":
        if not isinstance(data, dict) or not isinstance(data.get("propertyId"), str):
            raise ValueError("viewState requires a string propertyId")
        overrides = data.get("overrides") or {}
        pinned = data.get("pinnedLabels") or []
        offsets = data.get("labelOffsets") or {}
        parsed_overrides = {}
        for key, act in overrides.items():
            if act not in (EXPAND, COLLAPSE):
                raise ValueError(f"override for occ {key} must be '{EXPAND}' or '{COLLAPSE}'")
            parsed_overrides[int(key)] = act
        return ViewState(
            property_id=data["propertyId"],
            focus_class_id=data.get("focusClassId"),
            selection_class_id=data.get("selectionClassId"),
            overrides=tuple(sorted(parsed_overrides.items())),
            pinned_labels=tuple(sorted(set(pinned))),
            label_offsets=tuple(sorted((cid, (float(v[0]), float(v[1]))) for cid, v in offsets.items())),
        )


@dataclass(frozen=True)
class SelectionMark:
    outline: bool = True
    in_arrow: bool = False
    out_arrow: bool = False
    pulsing_ring: bool = False


@dataclass(frozen=True)
class Box:
    ref_id: str
    owner_occ: int
    kind: str  # "node" | "grid"
    x: float
    y: float
    w: float
    h: float
    depth: int


@dataclass(frozen=True)
class Glyph:
    ref_id: str
    kind: str  # "circle" | "square" | "thin_block" | "triangle"
    owner_occ: int
    cx: float
    cy: float
    class_id: str | None = None
    label: str | None = None
    assoc_count: int = 0
    color_bin: int | None = None
    count_label: int | None = None
    shadow_color: str | None = None
    selection: SelectionMark | None = None


@dataclass(frozen=True)
class Separator:
    ref_id: str
    owner_occ: int
    x: float
    y_top: float
    y_bottom: float
    style: str  # "faint_partial" | "solid"


@dataclass(frozen=True)
class Label:
    ref_id: str
    owner_occ: int
    text: str
    x: float
    y: float
    orientation: str  # "horizontal" | "diagonal"
    kind: str  # "parent" | "association" | "pinned"
    color_bin: int | None = None


@dataclass(frozen=True)
class Legend:
    bin_bounds: tuple[tuple[int, int], ...]
    colors: tuple[str, ...]

    def bin_of(self, count: int) -> int | None:
        for i, (lo, hi) in enumerate(self.bin_bounds):
            if lo <= count <= hi:
                return i
        return len(self.bin_bounds) - 1 if self.bin_bounds else None

    def color_of(self, count: int) -> str | None:
        b = self.bin_of(count)
        return self.colors[b] if b is not None else None


@dataclass(frozen=True)
class Layout:
    boxes: tuple[Box, ...]
    glyphs: tuple[Glyph, ...]
    separators: tuple[Separator, ...]
    labels: tuple[Label, ...]
    legend: Legend
    total_w: float
    total_h: float


@dataclass(frozen=True)
class LayoutFragment:
    boxes: tuple[Box, ...] = ()
    glyphs: tuple[Glyph, ...] = ()
    separators: tuple[Separator, ...] = ()
    labels: tuple[Label, ...] = ()
    legend: Legend | None = None
    total_w: float = 0
    total_h: float = 0


@dataclass(frozen=True)
class Moved:
    ref_id: str
    dx: float
    dy: float


@dataclass(frozen=True)
class Resized:
    ref_id: str
    w: float
    h: float


@dataclass(frozen=True)
class LayoutDiff:
    moved: tuple[Moved, ...]
    resized: tuple[Resized, ...]
    added: LayoutFragment
    removed: tuple[str, ...]
    changed_region: tuple[str, ...]
    highlight_ms: int


def build_legend(counts, config: LayoutConfig | None = None) -> Legend:
    """Equal-width integer bins over [min observed, max]; at most five, one
    per distinct count when fewer. No interesting classes yields a zero-bin
    legend. Anchoring at the observed minimum keeps the smallest count in the
    first bin and the largest in the last."""
    config = config or LayoutConfig()
    values = sorted({c for c in counts if c > 0})
    if not values:
        return Legend((), ())
    first = values[0]
    m = values[-1]
    span = m - first + 1
    k = min(len(config.color_ramp), len(values))
    bounds = []
    lo = first
    for i in range(1, k + 1):
        hi = first - 1 + (i * span) // k
        bounds.append((lo, hi))
        lo = hi + 1
    ramp = config.color_ramp
    if k == 1:
        colors = (ramp[-1],)
    else:
        colors = tuple(ramp[round(i * (len(ramp) - 1) / (k - 1))] for i in range(k))
    return Legend(tuple(bounds), colors)


def _display_label(snapshot: OntologySnapshot, tree: OccurrenceTree, class_id: str) -> str:
    if tree.synthetic_root and class_id == SYNTHETIC_ROOT_ID:
        return SYNTHETIC_ROOT_LABEL
    return snapshot.label_of(class_id)


def compute_layout(
    snapshot: OntologySnapshot,
    tree: OccurrenceTree,
    interest: InterestModel,
    plan: CompressionPlan,
    config: LayoutConfig,
    view: ViewState,
) -> Layout:
    n = len(tree.nodes)
    for r in plan.regions:
        if r.anchor_occ >= n or any(m >= n for m in r.members):
            raise InconsistentPlanError(f"plan region {r.key} references occurrences outside the tree")
    for o in plan.visible_occs:
        if o >= n:
            raise InconsistentPlanError(f"plan marks unknown occurrence {o} visible")

    cell = config.cell_size
    pad = config.box_padding
    visible = plan.visible_occs
    counts = interest.count_by_class
    legend = build_legend(counts.values(), config)

    child_index: dict[int, int] = {}
    for node in tree.nodes:
        for i, k in enumerate(node.children):
            child_index[k] = i

    regions_at: dict[int, list] = {}
    for r in plan.regions:
        regions_at.setdefault(r.anchor_occ, []).append(r)

    def region_slot(r) -> int:
        if r.kind == SQUARE_MERGE:
            return min(child_index[m] for m in r.members)
        return child_index[r.members[0]]

    def region_order(r) -> tuple:
        group = 0 if r.kind == SQUARE_MERGE else 1
        return (group, 1 if r.forced else 0, region_slot(r))

    for rs in regions_at.values():
        rs.sort(key=region_order)

    def is_display_leaf(occ: int) -> bool:
        node = tree.nodes[occ]
        if occ in regions_at:
            return False
        return not any(k in visible for k in node.children)

    # Grid content per boxy occurrence: (circle occs sorted for display, regions).
    grid_items: dict[int, tuple[list[int], list]] = {}
    boxy: dict[int, list[int]] = {}  # occ -> visible internal children
    order = [tree.root]
    for o in order:
        node = tree.nodes[o]
        internal = []
        leaves = []
        for k in node.children:
            if k not in visible:
                continue
            if is_display_leaf(k):
                leaves.append(k)
            else:
                internal.append(k)
                order.append(k)
        rs = regions_at.get(o, [])
        if leaves or rs:
            leaves.sort(key=lambda c: (-counts.get(tree.nodes[c].class_id, 0), child_index.get(c, 0)))
            grid_items[o] = (leaves, rs)
        boxy[o] = internal

    root_is_leaf = is_display_leaf(tree.root) and tree.root not in grid_items

    # Bottom-up widths. Each boxy occurrence owns a node box; grids add one more.
    grid_dims: dict[int, tuple[int, int]] = {}
    for o, (leaves, rs) in grid_items.items():
        count = len(leaves) + len(rs)
        cols = min(config.max_grid_columns, math.ceil(math.sqrt(count)))
        rows = math.ceil(count / cols)
        grid_dims[o] = (cols, rows)

    width: dict[int, float] = {}
    for o in reversed(order):
        parts = 0.0
        for k in boxy[o]:
            parts += width[k]
        if o in grid_dims:
            parts += grid_dims[o][0] * cell + 2 * pad
        width[o] = max(float(cell), parts)

    # Slot-ordered child boxes ("g" grid marker sorts by its first item).
    def slots(o: int) -> list[tuple[int, str | int]]:
        out: list[tuple[int, str | int]] = [(child_index[k], k) for k in boxy[o]]
        if o in grid_items:
            leaves, rs = grid_items[o]
            keys = [child_index[c] for c in leaves] + [region_slot(r) for r in rs]
            out.append((min(keys), "g"))
        out.sort(key=lambda t: t[0])
        return out

    boxes: list[Box] = []
    x_of: dict[str, float] = {}

    depth_of_box: dict[str, int] = {}
    intrinsic: dict[str, float] = {}
    parent_of_box: dict[str, int | None] = {}

    if root_is_leaf:
        ref = f"grid:{tree.root}"
        x_of[ref] = 0.0
        depth_of_box[ref] = 0
        intrinsic[ref] = cell + 2 * pad
        parent_of_box[ref] = None
        grid_items[tree.root] = ([tree.root], [])
        grid_dims[tree.root] = (1, 1)
        width[tree.root] = cell + 2 * pad
    else:
        stack = [(tree.root, 0.0)]
        while stack:
            o, x = stack.pop()
            node = tree.nodes[o]
            ref = f"box:{o}"
            x_of[ref] = x
            depth_of_box[ref] = node.depth
            intrinsic[ref] = cell + 2 * pad
            parent_of_box[ref] = node.parent_occ
            cursor = x
            for _, slot in slots(o):
                if slot == "g":
                    gref = f"grid:{o}"
                    x_of[gref] = cursor
                    depth_of_box[gref] = node.depth + 1
                    cols, rows = grid_dims[o]
                    intrinsic[gref] = rows * cell + 2 * pad
                    parent_of_box[gref] = o
                    cursor += cols * cell + 2 * pad
                else:
                    stack.append((slot, cursor))
                    cursor += width[slot]

    # Uniform row heights per depth.
    row_h: dict[int, float] = {}
    for ref, d in depth_of_box.items():
        row_h[d] = max(row_h.get(d, 0.0), intrinsic[ref])
    y_at: dict[int, float] = {}
    y = 0.0
    for d in sorted(row_h):
        y_at[d] = y
        y += row_h[d] + config.level_gap
    total_h = y - config.level_gap if row_h else 0.0

    for ref in x_of:
        d = depth_of_box[ref]
        if ref.startswith("grid:"):
            o = int(ref.split(":")[1])
            cols, _ = grid_dims[o]
            w = cols * cell + 2 * pad
        else:
            o = int(ref.split(":")[1])
            w = width[o]
        boxes.append(
            Box(
                ref_id=ref,
                owner_occ=o,
                kind="grid" if ref.startswith("grid:") else "node",
                x=x_of[ref],
                y=y_at[d],
                w=w,
                h=row_h[d],
                depth=d,
            )
        )

    box_map = {b.ref_id: b for b in boxes}

    # Selection context.
    sel = view.selection_class_id
    sel_in = sel_out = False
    if sel is not None:
        for a in snapshot.associations:
            if a.property != view.property_id:
                continue
            if a.target == sel:
                sel_in = True
            if a.source == sel:
                sel_out = True
            if sel_in and sel_out:
                break

    def circle(occ: int, cx: float, cy: float) -> Glyph:
        cid = tree.nodes[occ].class_id
        cnt = counts.get(cid, 0)
        mark = None
        if sel is not None and cid == sel:
            mark = SelectionMark(outline=True, in_arrow=sel_in, out_arrow=sel_out)
        return Glyph(
            ref_id=f"glyph:{occ}",
            kind="circle",
            owner_occ=occ,
            cx=cx,
            cy=cy,
            class_id=cid,
            label=_display_label(snapshot, tree, cid),
            assoc_count=cnt,
            color_bin=legend.bin_of(cnt) if cnt > 0 else None,
            selection=mark,
        )

    region_glyph_kind = {SQUARE_MERGE: "square", CHAIN: "thin_block"}

    def region_glyph(r, cx: float, cy: float) -> Glyph:
        mark = None
        if sel is not None:
            hidden_classes = {tree.nodes[h].class_id for h in r.hidden_occs(tree)}
            if sel in hidden_classes:
                mark = SelectionMark(outline=False, pulsing_ring=True)
        shadow = legend.color_of(r.max_assoc_inside) if r.max_assoc_inside > 0 else None
        return Glyph(
            ref_id=f"glyph:region:{r.key}",
            kind=region_glyph_kind.get(r.kind, "triangle"),
            owner_occ=r.members[0] if r.kind != SQUARE_MERGE else min(r.members),
            cx=cx,
            cy=cy,
            count_label=r.hidden_count,
            shadow_color=shadow,
            selection=mark,
        )

    glyphs: list[Glyph] = []
    offsets = view.offsets_dict()
    labels: list[Label] = []
    pinned = set(view.pinned_labels)

    def emit_labels_for_circle(g: Glyph, stack_index: int) -> None:
        cid = g.class_id
        if cid in interest.interesting:
            dx, dy = offsets.get(cid, (0.0, 0.0))
            step = cell / 2
            labels.append(
                Label(
                    ref_id=f"label:assoc:{g.owner_occ}",
                    owner_occ=g.owner_occ,
                    text=g.label or cid,
                    x=g.cx + step + stack_index * step + dx,
                    y=g.cy + step + stack_index * step + dy,
                    orientation="diagonal",
                    kind="association",
                    color_bin=g.color_bin,
                )
            )
        if cid in pinned:
            labels.append(
                Label(
                    ref_id=f"label:pin:{g.owner_occ}",
                    owner_occ=g.owner_occ,
                    text=g.label or cid,
                    x=g.cx,
                    y=g.cy - cell / 2 - 2,
                    orientation="horizontal",
                    kind="pinned",
                )
            )

    for o, (leaves, rs) in grid_items.items():
        gref = f"grid:{o}"
        gb = box_map[gref]
        cols, _ = grid_dims[o]
        stacked = 0
        for idx, item in enumerate(list(leaves) + rs):
            col = idx % cols
            rowi = idx // cols
            cx = gb.x + pad + col * cell + cell / 2
            cy = gb.y + pad + rowi * cell + cell / 2
            if isinstance(item, int):
                g = circle(item, cx, cy)
                glyphs.append(g)
                emit_labels_for_circle(g, stacked)
                if g.class_id in interest.interesting:
                    stacked += 1
            else:
                glyphs.append(region_glyph(item, cx, cy))

    for o in boxy:
        if root_is_leaf and o == tree.root:
            continue
        b = box_map[f"box:{o}"]
        cx = b.x + pad + cell / 2
        cy = b.y + pad + cell / 2
        g = circle(o, cx, cy)
        glyphs.append(g)
        emit_labels_for_circle(g, 0)
        cid = tree.nodes[o].class_id
        text = _display_label(snapshot, tree, cid)
        if len(text) * config.char_width + 4 <= b.w:
            labels.append(
                Label(
                    ref_id=f"label:parent:{o}",
                    owner_occ=o,
                    text=text,
                    x=b.x + pad + cell,
                    y=b.y + pad + (cell + config.font_size) / 2,
                    orientation="horizontal",
                    kind="parent",
                )
            )

    # Separators between horizontally adjacent boxes of one depth row.
    separators: list[Separator] = []
    by_depth: dict[int, list[Box]] = {}
    for b in boxes:
        by_depth.setdefault(b.depth, []).append(b)
    for d, row in by_depth.items():
        row.sort(key=lambda b: b.x)
        for left, right in zip(row, row[1:]):
            same_parent = parent_of_box[left.ref_id] == parent_of_box[right.ref_id]
            style = "faint_partial" if same_parent else "solid"
            y_top = y_at[d]
            y_bottom = y_top + (row_h[d] / 2 if same_parent else row_h[d])
            separators.append(
                Separator(
                    ref_id=f"sep:{right.ref_id}",
                    owner_occ=right.owner_occ,
                    x=right.x,
                    y_top=y_top,
                    y_bottom=y_bottom,
                    style=style,
                )
            )

    root_ref = f"grid:{tree.root}" if root_is_leaf else f"box:{tree.root}"
    total_w = box_map[root_ref].w

    return Layout(
        boxes=tuple(sorted(boxes, key=lambda e: e.ref_id)),
        glyphs=tuple(sorted(glyphs, key=lambda e: e.ref_id)),
        separators=tuple(sorted(separators, key=lambda e: e.ref_id)),
        labels=tuple(sorted(labels, key=lambda e: e.ref_id)),
        legend=legend,
        total_w=total_w,
        total_h=total_h,
    )


def layout_for_view(
    snapshot: OntologySnapshot,
    tree: OccurrenceTree,
    interest: InterestModel,
    config: LayoutConfig,
    view: ViewState,
) -> Layout:
    """Plan (auto-compression + overrides) and lay out in one step."""
    plan = detect_collapsible(tree, interest)
    overrides = view.overrides_dict()
    if overrides:
        plan = apply_overrides(plan, tree, interest, overrides)
    return compute_layout(snapshot, tree, interest, plan, config, view)


def _geometry_only_change(prev, nxt) -> bool:
    if isinstance(prev, Box):
        return (
            prev.depth == nxt.depth
            and prev.kind == nxt.kind
            and prev.owner_occ == nxt.owner_occ
        )
    if isinstance(prev, Glyph):
        return (
            prev.kind == nxt.kind
            and prev.owner_occ == nxt.owner_occ
            and prev.class_id == nxt.class_id
            and prev.label == nxt.label
            and prev.assoc_count == nxt.assoc_count
            and prev.color_bin == nxt.color_bin
            and prev.count_label == nxt.count_label
            and prev.shadow_color == nxt.shadow_color
            and prev.selection == nxt.selection
        )
    if isinstance(prev, Label):
        return (
            prev.owner_occ == nxt.owner_occ
            and prev.text == nxt.text
            and prev.orientation == nxt.orientation
            and prev.kind == nxt.kind
            and prev.color_bin == nxt.color_bin
        )
    return False


def compute_layout_diff(
    snapshot: OntologySnapshot,
    tree: OccurrenceTree,
    interest: InterestModel,
    config: LayoutConfig,
    prev_view: ViewState,
    next_view: ViewState,
) -> LayoutDiff:
    prev = layout_for_view(snapshot, tree, interest, config, prev_view)
    nxt = layout_for_view(snapshot, tree, interest, config, next_view)
    return diff_layouts(prev, nxt, tree, prev_view, next_view)


def diff_layouts(
    prev: Layout,
    nxt: Layout,
    tree: OccurrenceTree,
    prev_view: ViewState,
    next_view: ViewState,
) -> LayoutDiff:
    moved: list[Moved] = []
    resized: list[Resized] = []
    removed: list[str] = []
    added_parts: dict[str, list] = {"boxes": [], "glyphs": [], "separators": [], "labels": []}

    def index(layout: Layout) -> dict[str, object]:
        out: dict[str, object] = {}
        for group in (layout.boxes, layout.glyphs, layout.separators, layout.labels):
            for el in group:
                out[el.ref_id] = el
        return out

    prev_map = index(prev)
    next_map = index(nxt)

    def bucket(el) -> list:
        if isinstance(el, Box):
            return added_parts["boxes"]
        if isinstance(el, Glyph):
            return added_parts["glyphs"]
        if isinstance(el, Separator):
            return added_parts["separators"]
        return added_parts["labels"]

    for ref, el in next_map.items():
        old = prev_map.get(ref)
        if old is None:
            bucket(el).append(el)
            continue
        if old == el:
            continue
        if isinstance(el, Separator) or not _geometry_only_change(old, el):
            removed.append(ref)
            bucket(el).append(el)
            continue
        if isinstance(el, Box):
            if (el.x, el.y) != (old.x, old.y):
                moved.append(Moved(ref, el.x - old.x, el.y - old.y))
            if (el.w, el.h) != (old.w, old.h):
                resized.append(Resized(ref, el.w, el.h))
        elif isinstance(el, Glyph):
            moved.append(Moved(ref, el.cx - old.cx, el.cy - old.cy))
        else:
            moved.append(Moved(ref, el.x - old.x, el.y - old.y))

    for ref in prev_map:
        if ref not in next_map:
            removed.append(ref)

    # Transient-highlight scope and duration.
    prev_over = prev_view.overrides_dict()
    next_over = next_view.overrides_dict()
    toggled = {o for o in set(prev_over) | set(next_over) if prev_over.get(o) != next_over.get(o)}
    changed: set[str] = set()
    highlight_hidden = 0
    if toggled:
        scope: set[int] = set()
        for o in toggled:
            scope.update(tree.subtree_occs(o))
        for source in (prev_map, next_map):
            for ref, el in source.items():
                if getattr(el, "owner_occ", None) in scope:
                    changed.add(ref)
        for layout in (nxt, prev):
            for g in layout.glyphs:
                if g.count_label is not None and g.owner_occ in toggled:
                    highlight_hidden = max(highlight_hidden, g.count_label)
    else:
        changed.update(ref for ref in removed)
        changed.update(m.ref_id for m in moved)
        changed.update(r.ref_id for r in resized)
        for els in added_parts.values():
            changed.update(e.ref_id for e in els)

    highlight_ms = max(300, min(2000, 300 + 10 * highlight_hidden))

    fragment = LayoutFragment(
        boxes=tuple(sorted(added_parts["boxes"], key=lambda e: e.ref_id)),
        glyphs=tuple(sorted(added_parts["glyphs"], key=lambda e: e.ref_id)),
        separators=tuple(sorted(added_parts["separators"], key=lambda e: e.ref_id)),
        labels=tuple(sorted(added_parts["labels"], key=lambda e: e.ref_id)),
        legend=nxt.legend if nxt.legend != prev.legend else None,
        total_w=nxt.total_w,
        total_h=nxt.total_h,
    )
    return LayoutDiff(
        moved=tuple(sorted(moved, key=lambda m: m.ref_id)),
        resized=tuple(sorted(resized, key=lambda r: r.ref_id)),
        added=fragment,
        removed=tuple(sorted(removed)),
        changed_region=tuple(sorted(changed)),
        highlight_ms=highlight_ms,
    )


def apply_layout_diff(prev: Layout, diff: LayoutDiff) -> Layout:
    removed = set(diff.removed)
    moved = {m.ref_id: m for m in diff.moved}
    resized = {r.ref_id: r for r in diff.resized}

    def carry(el):
        m = moved.get(el.ref_id)
        r = resized.get(el.ref_id)
        if isinstance(el, Box):
            if m or r:
                el = replace(
                    el,
                    x=el.x + (m.dx if m else 0),
                    y=el.y + (m.dy if m else 0),
                    w=r.w if r else el.w,
                    h=r.h if r else el.h,
                )
            return el
        if m is None:
            return el
        if isinstance(el, Glyph):
            return replace(el, cx=el.cx + m.dx, cy=el.cy + m.dy)
        return replace(el, x=el.x + m.dx, y=el.y + m.dy)

    boxes = [carry(b) for b in prev.boxes if b.ref_id not in removed]
    glyphs = [carry(g) for g in prev.glyphs if g.ref_id not in removed]
    separators = [s for s in prev.separators if s.ref_id not in removed]
    labels = [carry(l) for l in prev.labels if l.ref_id not in removed]

    boxes.extend(diff.added.boxes)
    glyphs.extend(diff.added.glyphs)
    separators.extend(diff.added.separators)
    labels.extend(diff.added.labels)

    return Layout(
        boxes=tuple(sorted(boxes, key=lambda e: e.ref_id)),
        glyphs=tuple(sorted(glyphs, key=lambda e: e.ref_id)),
        separators=tuple(sorted(separators, key=lambda e: e.ref_id)),
        labels=tuple(sorted(labels, key=lambda e: e.ref_id)),
        legend=diff.added.legend if diff.added.legend is not None else prev.legend,
        total_w=diff.added.total_w,
        total_h=diff.added.total_h,
    )


def _num(v: float):
    # Emit whole coordinates as ints so JSON output is stable and compact.
    return int(v) if isinstance(v, float) and v.is_integer() else v


def _selection_to_wire(mark: SelectionMark | None):
    if mark is None:
        return None
    return {
        "outline": mark.outline,
        "inArrow": mark.in_arrow,
        "outArrow": mark.out_arrow,
        "pulsingRing": mark.pulsing_ring,
    }


def legend_to_wire(legend: Legend) -> dict:
    return {
        "bins": [
            {"lo": lo, "hi": hi, "color": legend.colors[i]}
            for i, (lo, hi) in enumerate(legend.bin_bounds)
        ]
    }


def _box_to_wire(b: Box) -> dict:
    return {
        "refId": b.ref_id,
        "ownerOcc": b.owner_occ,
        "kind": b.kind,
        "x": _num(b.x),
        "y": _num(b.y),
        "w": _num(b.w),
        "h": _num(b.h),
        "depth": b.depth,
    }


def _glyph_to_wire(g: Glyph) -> dict:
    out = {
        "refId": g.ref_id,
        "kind": g.kind,
        "ownerOcc": g.owner_occ,
        "cx": _num(g.cx),
        "cy": _num(g.cy),
    }
    if g.class_id is not None:
        out["classId"] = g.class_id
    if g.label is not None:
        out["label"] = g.label
    if g.assoc_count:
        out["assocCount"] = g.assoc_count
    if g.color_bin is not None:
        out["colorBin"] = g.color_bin
    if g.count_label is not None:
        out["countLabel"] = g.count_label
    if g.shadow_color is not None:
        out["shadowColor"] = g.shadow_color
    sel = _selection_to_wire(g.selection)
    if sel is not None:
        out["selection"] = sel
    return out


def _separator_to_wire(s: Separator) -> dict:
    return {
        "refId": s.ref_id,
        "ownerOcc": s.owner_occ,
        "x": _num(s.x),
        "yTop": _num(s.y_top),
        "yBottom": _num(s.y_bottom),
        "style": s.style,
    }


def _label_to_wire(l: Label) -> dict:
    out = {
        "refId": l.ref_id,
        "ownerOcc": l.owner_occ,
        "text": l.text,
        "x": _num(l.x),
        "y": _num(l.y),
        "orientation": l.orientation,
        "kind": l.kind,
    }
    if l.color_bin is not None:
        out["colorBin"] = l.color_bin
    return out


def layout_to_wire(layout: Layout) -> dict:
    return {
        "boxes": [_box_to_wire(b) for b in layout.boxes],
        "glyphs": [_glyph_to_wire(g) for g in layout.glyphs],
        "separators": [_separator_to_wire(s) for s in layout.separators],
        "labels": [_label_to_wire(l) for l in layout.labels],
        "legend": legend_to_wire(layout.legend),
        "totalW": _num(layout.total_w),
        "totalH": _num(layout.total_h),
    }


def diff_to_wire(diff: LayoutDiff) -> dict:
    added = diff.added
    fragment = {
        "boxes": [_box_to_wire(b) for b in added.boxes],
        "glyphs": [_glyph_to_wire(g) for g in added.glyphs],
        "separators": [_separator_to_wire(s) for s in added.separators],
        "labels": [_label_to_wire(l) for l in added.labels],
        "totalW": _num(added.total_w),
        "totalH": _num(added.total_h),
    }
    if added.legend is not None:
        fragment["legend"] = legend_to_wire(added.legend)
    return {
        "moved": [
            {"refId": m.ref_id, "dx": _num(m.dx), "dy": _num(m.dy)} for m in diff.moved
        ],
        "resized": [
            {"refId": r.ref_id, "w": _num(r.w), "h": _num(r.h)} for r in diff.resized
        ],
        "added": fragment,
        "removed": list(diff.removed),
        "changedRegion": list(diff.changed_region),
        "highlightMs": diff.highlight_ms,
    }


def hit_test(layout: Layout, x: float, y: float, config: LayoutConfig | None = None):
    """Topmost element at a point: glyphs, then labels, then boxes."""
    config = config or LayoutConfig()
    if x < 0 or y < 0 or x > layout.total_w or y > layout.total_h:
        return None
    r = config.glyph_diameter / 2
    for g in layout.glyphs:
        if g.kind == "circle":
            if (x - g.cx) ** 2 + (y - g.cy) ** 2 <= r * r:
                return g.ref_id
        elif abs(x - g.cx) <= r and abs(y - g.cy) <= r:
            return g.ref_id
    for l in layout.labels:
        w = len(l.text) * config.char_width
        if l.x <= x <= l.x + w and l.y - config.font_size <= y <= l.y:
            return l.ref_id
    best = None
    best_depth = -1
    for b in layout.boxes:
        if b.x <= x < b.x + b.w and b.y <= y < b.y + b.h and b.depth > best_depth:
            best, best_depth = b.ref_id, b.depth
    return best
