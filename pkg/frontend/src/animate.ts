/** Pure timing math for diff animation; rendering code samples these. */
import type { DiffWire, LayoutWire } from "./types.js";

export interface AnimationPlan {
  durationMs: number;
  moves: Map<string, { dx: number; dy: number }>;
  resizes: Map<string, { fromW: number; fromH: number; toW: number; toH: number }>;
  fadeIn: Set<string>;
  fadeOut: Set<string>;
  highlight: Set<string>;
}

export function animationPlan(prev: LayoutWire, diff: DiffWire): AnimationPlan {
  const resizes = new Map<string, { fromW: number; fromH: number; toW: number; toH: number }>();
  const boxByRef = new Map(prev.boxes.map((b) => [b.refId, b]));
  for (const r of diff.resized) {
    const base = boxByRef.get(r.refId);
    if (base) resizes.set(r.refId, { fromW: base.w, fromH: base.h, toW: r.w, toH: r.h });
  }
  const fadeIn = new Set<string>();
  for (const part of [diff.added.boxes, diff.added.glyphs, diff.added.separators, diff.added.labels]) {
    for (const el of part) fadeIn.add(el.refId);
  }
  return {
    durationMs: diff.highlightMs,
    moves: new Map(diff.moved.map((m) => [m.refId, { dx: m.dx, dy: m.dy }])),
    resizes,
    fadeIn,
    fadeOut: new Set(diff.removed),
    highlight: new Set(diff.changedRegion),
  };
}

/** Linear easing; animation progress for an elapsed time. */
export function progressAt(elapsedMs: number, durationMs: number): number {
  if (durationMs <= 0) return 1;
  return Math.min(1, Math.max(0, elapsedMs / durationMs));
}

/** Interpolated coordinate at progress t in [0, 1]. */
export function positionAt(base: number, delta: number, t: number): number {
  return base + delta * t;
}

/** Red region highlight fades linearly from full to transparent. */
export function highlightAlpha(elapsedMs: number, durationMs: number): number {
  return 1 - progressAt(elapsedMs, durationMs);
}
