/** Wire shapes exchanged with the ontoplot HTTP service. */

export type OverrideAction = "expand" | "collapse";

export interface ViewStateWire {
  propertyId: string;
  focusClassId?: string;
  selectionClassId?: string;
  overrides: Record<string, OverrideAction>;
  pinnedLabels: string[];
  labelOffsets: Record<string, [number, number]>;
}

export interface WireBox {
  refId: string;
  ownerOcc: number;
  kind: "node" | "grid";
  x: number;
  y: number;
  w: number;
  h: number;
  depth: number;
}

export interface SelectionWire {
  outline: boolean;
  inArrow: boolean;
  outArrow: boolean;
  pulsingRing: boolean;
}

export interface WireGlyph {
  refId: string;
  kind: "circle" | "square" | "thin_block" | "triangle";
  ownerOcc: number;
  cx: number;
  cy: number;
  classId?: string;
  label?: string;
  assocCount?: number;
  colorBin?: number;
  countLabel?: number;
  shadowColor?: string;
  selection?: SelectionWire;
}

export interface WireSeparator {
  refId: string;
  ownerOcc: number;
  x: number;
  yTop: number;
  yBottom: number;
  style: "solid" | "faint_partial";
}

export interface WireLabel {
  refId: string;
  ownerOcc: number;
  text: string;
  x: number;
  y: number;
  orientation: "horizontal" | "diagonal";
  kind: "association" | "pinned" | "parent";
  colorBin?: number;
}

export interface LegendBin {
  lo: number;
  hi: number;
  color: string;
}

export interface LegendWire {
  bins: LegendBin[];
}

export interface LayoutWire {
  boxes: WireBox[];
  glyphs: WireGlyph[];
  separators: WireSeparator[];
  labels: WireLabel[];
  legend: LegendWire;
  totalW: number;
  totalH: number;
}

export interface DiffFragment {
  boxes: WireBox[];
  glyphs: WireGlyph[];
  separators: WireSeparator[];
  labels: WireLabel[];
  totalW: number;
  totalH: number;
  legend?: LegendWire;
}

export interface DiffWire {
  moved: { refId: string; dx: number; dy: number }[];
  resized: { refId: string; w: number; h: number }[];
  added: DiffFragment;
  removed: string[];
  changedRegion: string[];
  highlightMs: number;
}

export interface SummaryWire {
  classCount: number;
  propertyCount: number;
  associationCount: number;
  perPropertyCounts: Record<string, number>;
  rootCount: number;
  maxDepth: number;
}

export interface PropertyRow {
  id: string;
  label: string;
  associationCount: number;
}

export interface ClassCard {
  id: string;
  label: string;
  parents: string[];
  children: string[];
  associations: { property: string; source: string; target: string }[];
}

export interface SearchHit {
  classId: string;
  label: string;
  rank: "Exact" | "Prefix" | "Substring";
  associationCount: number;
}
