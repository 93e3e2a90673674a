/**
 * Scene bookkeeping. The scene is the parsed layout wire object; the client
 * never computes geometry, it only filters, shifts and re-sorts what the
 * server sent.
 */
import type {
  DiffWire,
  LayoutWire,
  WireBox,
  WireGlyph,
  WireLabel,
} from "./types.js";

/**
 * Code-unit string order. Must match the server's element ordering exactly,
 * so no locale-aware comparison here.
 */
export function refIdCompare(a: string, b: string): number {
  return a < b ? -1 : a > b ? 1 : 0;
}

function byRefId<T extends { refId: string }>(items: T[]): T[] {
  return items.sort((x, y) => refIdCompare(x.refId, y.refId));
}

/**
 * Applies an incremental layout diff to the previous scene. Produces the same
 * scene the server would return for a fresh layout request of the new view
 * state: removals filter, moves shift positions, resizes replace box extents,
 * separators are never carried (always removed and re-added), then the added
 * fragment is appended and every list is re-sorted by refId.
 */
export function applyDiff(prev: LayoutWire, diff: DiffWire): LayoutWire {
  const removed = new Set(diff.removed);
  const moved = new Map(diff.moved.map((m) => [m.refId, m]));
  const resized = new Map(diff.resized.map((r) => [r.refId, r]));

  const boxes: WireBox[] = prev.boxes
    .filter((b) => !removed.has(b.refId))
    .map((b) => {
      const m = moved.get(b.refId);
      const r = resized.get(b.refId);
      if (!m && !r) return b;
      return {
        ...b,
        x: b.x + (m?.dx ?? 0),
        y: b.y + (m?.dy ?? 0),
        w: r?.w ?? b.w,
        h: r?.h ?? b.h,
      };
    });

  const glyphs: WireGlyph[] = prev.glyphs
    .filter((g) => !removed.has(g.refId))
    .map((g) => {
      const m = moved.get(g.refId);
      return m ? { ...g, cx: g.cx + m.dx, cy: g.cy + m.dy } : g;
    });

  const separators = prev.separators.filter((s) => !removed.has(s.refId));

  const labels: WireLabel[] = prev.labels
    .filter((l) => !removed.has(l.refId))
    .map((l) => {
      const m = moved.get(l.refId);
      return m ? { ...l, x: l.x + m.dx, y: l.y + m.dy } : l;
    });

  boxes.push(...diff.added.boxes);
  glyphs.push(...diff.added.glyphs);
  separators.push(...diff.added.separators);
  labels.push(...diff.added.labels);

  return {
    boxes: byRefId(boxes),
    glyphs: byRefId(glyphs),
    separators: byRefId(separators),
    labels: byRefId(labels),
    legend: diff.added.legend ?? prev.legend,
    totalW: diff.added.totalW,
    totalH: diff.added.totalH,
  };
}

/** Deterministic JSON with recursively sorted object keys, for scene equality. */
export function stableStringify(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(stableStringify).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .filter(([, v]) => v !== undefined)
    .sort(([a], [b]) => refIdCompare(a, b))
    .map(([k, v]) => JSON.stringify(k) + ":" + stableStringify(v));
  return "{" + entries.join(",") + "}";
}

export function glyphByRef(scene: LayoutWire, refId: string): WireGlyph | undefined {
  return scene.glyphs.find((g) => g.refId === refId);
}

export function circleForClass(scene: LayoutWire, classId: string): WireGlyph | undefined {
  return scene.glyphs.find((g) => g.kind === "circle" && g.classId === classId);
}

export function visibleClassIds(scene: LayoutWire): Set<string> {
  const out = new Set<string>();
  for (const g of scene.glyphs) {
    if (g.kind === "circle" && g.classId) out.add(g.classId);
  }
  return out;
}

export function regionGlyphs(scene: LayoutWire): WireGlyph[] {
  return scene.glyphs.filter((g) => g.refId.startsWith("glyph:region:"));
}

/** Class shown at an occurrence, when that occurrence renders as a circle. */
export function classForOcc(scene: LayoutWire, occ: number): string | undefined {
  return scene.glyphs.find((g) => g.kind === "circle" && g.ownerOcc === occ)?.classId;
}

/** Hover popup body for a glyph: name plus counts, or the hidden-class tally. */
export function popupText(glyph: WireGlyph): string {
  if (glyph.kind === "circle") {
    const name = glyph.label ?? glyph.classId ?? glyph.refId;
    const n = glyph.assocCount ?? 0;
    return `${name} (${n} ${n === 1 ? "association" : "associations"})`;
  }
  const hidden = glyph.countLabel ?? 0;
  return `${hidden} hidden ${hidden === 1 ? "class" : "classes"}`;
}
