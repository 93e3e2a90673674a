/**
 * SVG painter. Positions, sizes and colors all come straight from the server
 * scene; this module only turns wire records into DOM nodes and samples the
 * animation plan while a diff is in flight.
 */
import { highlightAlpha, positionAt, progressAt, type AnimationPlan } from "./animate.js";
import type { DiffWire, LayoutWire, WireGlyph } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NEUTRAL = "#9aa7b1";
const GLYPH_R = 5;

export interface RenderOptions {
  showClassLabels: boolean;
  showAssocLabels: boolean;
  highlight?: Set<string>;
  highlightAlpha?: number;
  opacity?: Map<string, number>;
  shift?: Map<string, { dx: number; dy: number }>;
  append?: boolean;
}

function el(tag: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function binColor(scene: LayoutWire, bin: number | undefined): string {
  if (bin === undefined) return NEUTRAL;
  return scene.legend.bins[bin]?.color ?? NEUTRAL;
}

function glyphNode(scene: LayoutWire, g: WireGlyph, cx: number, cy: number): SVGElement {
  const group = el("g", { "data-ref": g.refId });
  if (g.shadowColor) {
    group.appendChild(el("circle", { cx, cy, r: GLYPH_R + 2, fill: g.shadowColor, opacity: 0.5 }));
  }
  if (g.kind === "circle") {
    group.appendChild(el("circle", { cx, cy, r: GLYPH_R, fill: binColor(scene, g.colorBin) }));
  } else if (g.kind === "square") {
    group.appendChild(
      el("rect", { x: cx - GLYPH_R, y: cy - GLYPH_R, width: GLYPH_R * 2, height: GLYPH_R * 2, fill: "#6b7280" }),
    );
  } else if (g.kind === "thin_block") {
    group.appendChild(
      el("rect", { x: cx - 2, y: cy - GLYPH_R, width: 4, height: GLYPH_R * 2, fill: "#6b7280" }),
    );
  } else {
    const pts = `${cx},${cy - GLYPH_R} ${cx - GLYPH_R},${cy + GLYPH_R} ${cx + GLYPH_R},${cy + GLYPH_R}`;
    group.appendChild(el("polygon", { points: pts, fill: "#6b7280" }));
  }
  if (g.countLabel !== undefined) {
    const t = el("text", { x: cx, y: cy + GLYPH_R + 9, "font-size": 8, "text-anchor": "middle" });
    t.textContent = String(g.countLabel);
    group.appendChild(t);
  }
  const sel = g.selection;
  if (sel) {
    if (sel.outline) {
      group.appendChild(el("circle", { cx, cy, r: GLYPH_R + 3, fill: "none", stroke: "#1d4ed8", "stroke-width": 2 }));
    }
    if (sel.pulsingRing) {
      const ring = el("circle", { cx, cy, r: GLYPH_R + 5, fill: "none", stroke: "#1d4ed8", class: "pulse" });
      group.appendChild(ring);
    }
    if (sel.inArrow) {
      group.appendChild(el("path", { d: `M ${cx - 14} ${cy} l 6 -4 v 8 z`, fill: "#1d4ed8" }));
    }
    if (sel.outArrow) {
      group.appendChild(el("path", { d: `M ${cx + 14} ${cy} l -6 -4 v 8 z`, fill: "#1d4ed8" }));
    }
  }
  return group;
}

export function renderScene(svg: SVGSVGElement, scene: LayoutWire, opts: RenderOptions): void {
  if (!opts.append) {
    svg.innerHTML = "";
    svg.setAttribute("width", String(scene.totalW));
    svg.setAttribute("height", String(scene.totalH));
    svg.setAttribute("viewBox", `0 0 ${scene.totalW} ${scene.totalH}`);
  }
  const shiftOf = (refId: string) => opts.shift?.get(refId) ?? { dx: 0, dy: 0 };
  const fadeOf = (refId: string) => opts.opacity?.get(refId);

  for (const b of scene.boxes) {
    const { dx, dy } = shiftOf(b.refId);
    const node = el("rect", {
      "data-ref": b.refId,
      x: b.x + dx,
      y: b.y + dy,
      width: b.w,
      height: b.h,
      fill: b.kind === "grid" ? "#eef2f7" : "#f8fafc",
      stroke: "#d3dae3",
    });
    const o = fadeOf(b.refId);
    if (o !== undefined) node.setAttribute("opacity", String(o));
    svg.appendChild(node);
  }
  for (const s of scene.separators) {
    const node = el("line", {
      "data-ref": s.refId,
      x1: s.x,
      y1: s.yTop,
      x2: s.x,
      y2: s.yBottom,
      stroke: "#94a3b8",
      "stroke-width": 1,
    });
    if (s.style === "faint_partial") node.setAttribute("opacity", "0.35");
    const o = fadeOf(s.refId);
    if (o !== undefined) node.setAttribute("opacity", String(o));
    svg.appendChild(node);
  }
  for (const g of scene.glyphs) {
    const { dx, dy } = shiftOf(g.refId);
    const node = glyphNode(scene, g, g.cx + dx, g.cy + dy);
    const o = fadeOf(g.refId);
    if (o !== undefined) node.setAttribute("opacity", String(o));
    svg.appendChild(node);
  }
  for (const l of scene.labels) {
    if (l.kind === "association" && !opts.showAssocLabels) continue;
    if (l.kind !== "association" && !opts.showClassLabels) continue;
    const { dx, dy } = shiftOf(l.refId);
    const x = l.x + dx;
    const y = l.y + dy;
    const attrs: Record<string, string | number> = {
      "data-ref": l.refId,
      x,
      y,
      "font-size": 11,
      fill: l.kind === "association" ? binColor(scene, l.colorBin) : "#334155",
    };
    if (l.orientation === "diagonal") attrs.transform = `rotate(-45 ${x} ${y})`;
    const node = el("text", attrs);
    node.textContent = l.text;
    const o = fadeOf(l.refId);
    if (o !== undefined) node.setAttribute("opacity", String(o));
    svg.appendChild(node);
  }
  if (opts.highlight && opts.highlight.size > 0) {
    const alpha = opts.highlightAlpha ?? 1;
    if (alpha > 0) {
      for (const b of scene.boxes) {
        if (!opts.highlight.has(b.refId)) continue;
        svg.appendChild(
          el("rect", {
            x: b.x,
            y: b.y,
            width: b.w,
            height: b.h,
            fill: "none",
            stroke: "#dc2626",
            "stroke-width": 2,
            opacity: alpha,
            "pointer-events": "none",
          }),
        );
      }
    }
  }
}

export function renderLegend(container: HTMLElement, scene: LayoutWire): void {
  container.innerHTML = "";
  for (const bin of scene.legend.bins) {
    const row = document.createElement("div");
    row.className = "legend-row";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = bin.color;
    const text = document.createElement("span");
    text.textContent = bin.lo === bin.hi ? String(bin.lo) : `${bin.lo} to ${bin.hi}`;
    row.append(swatch, text);
    container.appendChild(row);
  }
}

/**
 * Runs the diff animation: moved elements slide, resized boxes grow, added
 * elements fade in over the server-chosen duration while the changed region
 * pulses red and fades out. Calls done() after the final frame.
 */
export function animateDiff(
  svg: SVGSVGElement,
  prevScene: LayoutWire,
  nextScene: LayoutWire,
  diff: DiffWire,
  plan: AnimationPlan,
  opts: RenderOptions,
  done: () => void,
): void {
  const addedScene: LayoutWire = {
    ...nextScene,
    boxes: diff.added.boxes,
    glyphs: diff.added.glyphs,
    separators: diff.added.separators,
    labels: diff.added.labels,
  };
  const started = performance.now();
  const frame = (now: number) => {
    const t = progressAt(now - started, plan.durationMs);
    if (t >= 1) {
      renderScene(svg, nextScene, opts);
      done();
      return;
    }
    const shift = new Map<string, { dx: number; dy: number }>();
    for (const [refId, m] of plan.moves) {
      shift.set(refId, { dx: positionAt(0, m.dx, t), dy: positionAt(0, m.dy, t) });
    }
    const fadeOut = new Map<string, number>();
    for (const refId of plan.fadeOut) fadeOut.set(refId, 1 - t);
    renderScene(svg, prevScene, {
      ...opts,
      shift,
      opacity: fadeOut,
      highlight: plan.highlight,
      highlightAlpha: highlightAlpha(now - started, plan.durationMs),
    });
    const fadeIn = new Map<string, number>();
    for (const refId of plan.fadeIn) fadeIn.set(refId, t);
    renderScene(svg, addedScene, { ...opts, append: true, opacity: fadeIn });
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);
}
