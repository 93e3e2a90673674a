"""Static SVG 1.1 export of a computed layout.

Output is deterministic: elements are emitted in the layout's canonical ref-id
order with fixed number formatting, so the same layout always yields the same
bytes.
"""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .layout import Layout, LayoutConfig, legend_to_wire

MARGIN = 24
LEGEND_ROW_H = 18
LEGEND_WIDTH = 150

BOX_FILL = "#f2f2f2"
GRID_FILL = "#e8e8e8"
BOX_STROKE = "#b0b0b0"
NEUTRAL_CIRCLE = "#9aa7b1"
GLYPH_FILL = "#6b7680"
SOLID_SEP = "#707070"
FAINT_SEP = "#c8c8c8"
TEXT_COLOR = "#222222"
SELECTION_COLOR = "#1463d2"


def _fmt(v) -> str:
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if isinstance(v, int):
        return str(v)
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _attrs(**kw) -> str:
    return " ".join(f"{k.replace('_', '-')}={quoteattr(_fmt(v) if isinstance(v, (int, float)) else str(v))}" for k, v in kw.items())


def render_svg(layout: Layout, config: LayoutConfig | None = None) -> str:
    config = config or LayoutConfig()
    cell = config.cell_size
    half_glyph = config.glyph_diameter / 2
    parts: list[str] = []

    legend = legend_to_wire(layout.legend)["bins"]
    legend_h = len(legend) * LEGEND_ROW_H + (LEGEND_ROW_H if legend else 0)
    width = layout.total_w + 2 * MARGIN + (LEGEND_WIDTH if legend else 0)
    height = max(layout.total_h + 2 * MARGIN, legend_h + 2 * MARGIN)

    parts.append(
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    )
    parts.append(f'<g transform="translate({MARGIN},{MARGIN})" font-family="sans-serif" font-size="{config.font_size}">')

    for b in layout.boxes:
        fill = GRID_FILL if b.kind == "grid" else BOX_FILL
        parts.append(
            f"<rect {_attrs(id=b.ref_id, x=b.x, y=b.y, width=b.w, height=b.h, fill=fill, stroke=BOX_STROKE)}/>"
        )

    for s in layout.separators:
        color = FAINT_SEP if s.style == "faint_partial" else SOLID_SEP
        parts.append(
            f"<line {_attrs(id=s.ref_id, x1=s.x, y1=s.y_top, x2=s.x, y2=s.y_bottom, stroke=color)}/>"
        )

    for g in layout.glyphs:
        if g.kind == "circle":
            fill = layout.legend.colors[g.color_bin] if g.color_bin is not None else NEUTRAL_CIRCLE
            parts.append(
                f"<circle {_attrs(id=g.ref_id, cx=g.cx, cy=g.cy, r=half_glyph, fill=fill, stroke=GLYPH_FILL)}/>"
            )
        else:
            if g.shadow_color is not None:
                parts.append(
                    f"<rect {_attrs(x=g.cx - half_glyph + 2, y=g.cy - half_glyph + 2, width=config.glyph_diameter, height=config.glyph_diameter, fill=g.shadow_color)}/>"
                )
            if g.kind == "square":
                parts.append(
                    f"<rect {_attrs(id=g.ref_id, x=g.cx - half_glyph, y=g.cy - half_glyph, width=config.glyph_diameter, height=config.glyph_diameter, fill=GLYPH_FILL)} class=\"square-merge\"/>"
                )
            elif g.kind == "thin_block":
                w = config.glyph_diameter / 3
                parts.append(
                    f"<rect {_attrs(id=g.ref_id, x=g.cx - w / 2, y=g.cy - half_glyph, width=w, height=config.glyph_diameter, fill=GLYPH_FILL)} class=\"chain\"/>"
                )
            else:
                pts = (
                    f"{_fmt(g.cx)},{_fmt(g.cy - half_glyph)} "
                    f"{_fmt(g.cx - half_glyph)},{_fmt(g.cy + half_glyph)} "
                    f"{_fmt(g.cx + half_glyph)},{_fmt(g.cy + half_glyph)}"
                )
                parts.append(f'<polygon id={quoteattr(g.ref_id)} points="{pts}" fill="{GLYPH_FILL}" class="subtree"/>')
            if g.count_label is not None:
                parts.append(
                    f"<text {_attrs(x=g.cx, y=g.cy + 3, fill='#ffffff', text_anchor='middle', font_size=8)}>{g.count_label}</text>"
                )
        if g.selection is not None:
            if g.selection.pulsing_ring:
                parts.append(
                    f"<circle {_attrs(cx=g.cx, cy=g.cy, r=half_glyph + 3, fill='none', stroke=SELECTION_COLOR, stroke_dasharray='2 2')} class=\"pulsing-ring\"/>"
                )
            else:
                if g.selection.outline:
                    parts.append(
                        f"<circle {_attrs(cx=g.cx, cy=g.cy, r=half_glyph + 2, fill='none', stroke=SELECTION_COLOR, stroke_width=2)} class=\"selection-outline\"/>"
                    )
                if g.selection.in_arrow:
                    parts.append(
                        f"<path {_attrs(d=f'M {_fmt(g.cx - cell)} {_fmt(g.cy)} l 6 -3 l 0 6 z', fill=SELECTION_COLOR)} class=\"in-arrow\"/>"
                    )
                if g.selection.out_arrow:
                    parts.append(
                        f"<path {_attrs(d=f'M {_fmt(g.cx + cell)} {_fmt(g.cy)} l -6 -3 l 0 6 z', fill=SELECTION_COLOR)} class=\"out-arrow\"/>"
                    )

    for l in layout.labels:
        color = layout.legend.colors[l.color_bin] if l.color_bin is not None else TEXT_COLOR
        if l.orientation == "diagonal":
            transform = f"rotate(-{config.label_angle_deg} {_fmt(l.x)} {_fmt(l.y)})"
            parts.append(
                f"<text {_attrs(id=l.ref_id, x=l.x, y=l.y, fill=color, transform=transform)}>{escape(l.text)}</text>"
            )
        else:
            parts.append(f"<text {_attrs(id=l.ref_id, x=l.x, y=l.y, fill=color)}>{escape(l.text)}</text>")

    parts.append("</g>")

    if legend:
        lx = layout.total_w + 2 * MARGIN
        parts.append(f'<g id="legend" transform="translate({_fmt(lx)},{MARGIN})" font-family="sans-serif" font-size="{config.font_size}">')
        parts.append(f'<text x="0" y="{LEGEND_ROW_H - 6}" fill="{TEXT_COLOR}">associations</text>')
        for i, entry in enumerate(legend):
            y = (i + 1) * LEGEND_ROW_H
            lo, hi, color = entry["lo"], entry["hi"], entry["color"]
            rng = str(lo) if lo == hi else f"{lo}-{hi}"
            parts.append(f'<rect x="0" y="{_fmt(y)}" width="12" height="12" fill="{color}" stroke="{BOX_STROKE}"/>')
            parts.append(f'<text x="18" y="{_fmt(y + 10)}" fill="{TEXT_COLOR}">{escape(rng)}</text>')
        parts.append("</g>")

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
