/**
 * Client-side view state. Mirrors the server's viewState wire object plus
 * purely client-side fields (scroll position, transient hover/popover) that
 * never travel to the server.
 */
import type { OverrideAction, ViewStateWire } from "./types.js";

const REGION_PREFIX = "glyph:region:";

/** Anchor occurrence encoded in a region glyph refId, e.g. "glyph:region:tri:4". */
export function regionAnchor(refId: string): { kind: string; occ: number } {
  if (!refId.startsWith(REGION_PREFIX)) {
    throw new Error(`not a region glyph refId: ${refId}`);
  }
  const key = refId.slice(REGION_PREFIX.length);
  const sep = key.indexOf(":");
  if (sep < 0) throw new Error(`malformed region key: ${key}`);
  const kind = key.slice(0, sep);
  const occ = Number(key.slice(sep + 1));
  if (!Number.isInteger(occ) || occ < 0) throw new Error(`malformed region key: ${key}`);
  return { kind, occ };
}

export function circleOcc(refId: string): number {
  const m = /^glyph:(\d+)$/.exec(refId);
  if (!m) throw new Error(`not a circle glyph refId: ${refId}`);
  return Number(m[1]);
}

export class ClientViewState {
  propertyId: string;
  focusClassId: string | null = null;
  selectionClassId: string | null = null;
  overrides = new Map<number, OverrideAction>();
  pinnedLabels = new Set<string>();
  labelOffsets = new Map<string, [number, number]>();

  // Client-only; excluded from the wire form.
  scrollX = 0;
  hoverRefId: string | null = null;
  popoverClassId: string | null = null;

  constructor(propertyId: string) {
    this.propertyId = propertyId;
  }

  toWire(): ViewStateWire {
    const overrides: Record<string, OverrideAction> = {};
    for (const occ of [...this.overrides.keys()].sort((a, b) => a - b)) {
      overrides[String(occ)] = this.overrides.get(occ)!;
    }
    const labelOffsets: Record<string, [number, number]> = {};
    for (const cid of [...this.labelOffsets.keys()].sort()) {
      labelOffsets[cid] = this.labelOffsets.get(cid)!;
    }
    const wire: ViewStateWire = {
      propertyId: this.propertyId,
      overrides,
      pinnedLabels: [...this.pinnedLabels].sort(),
      labelOffsets,
    };
    if (this.focusClassId !== null) wire.focusClassId = this.focusClassId;
    if (this.selectionClassId !== null) wire.selectionClassId = this.selectionClassId;
    return wire;
  }

  /** Persistable form; transient hover/popover state is dropped on purpose. */
  serialize(): string {
    return JSON.stringify({ view: this.toWire(), scrollX: this.scrollX });
  }

  static deserialize(text: string): ClientViewState {
    const data = JSON.parse(text) as { view: ViewStateWire; scrollX?: number };
    const view = data.view;
    const state = new ClientViewState(view.propertyId);
    state.focusClassId = view.focusClassId ?? null;
    state.selectionClassId = view.selectionClassId ?? null;
    for (const [occ, action] of Object.entries(view.overrides ?? {})) {
      state.overrides.set(Number(occ), action);
    }
    for (const cid of view.pinnedLabels ?? []) state.pinnedLabels.add(cid);
    for (const [cid, off] of Object.entries(view.labelOffsets ?? {})) {
      state.labelOffsets.set(cid, [off[0], off[1]]);
    }
    state.scrollX = data.scrollX ?? 0;
    return state;
  }

  setProperty(propertyId: string): void {
    this.propertyId = propertyId;
  }

  /**
   * Double-click on a region glyph. A forced region ("user:" key) exists only
   * because of a collapse override on its anchor, so the toggle removes it;
   * auto-detected regions expand via an explicit expand override, which also
   * blocks re-detection anywhere inside the subtree.
   */
  toggleRegion(refId: string): void {
    const { kind, occ } = regionAnchor(refId);
    if (kind === "user") {
      this.overrides.delete(occ);
    } else {
      this.overrides.set(occ, "expand");
    }
  }

  /**
   * Double-click on a visible class circle. A circle carrying an override is
   * toggled back to automatic handling; an untouched circle collapses.
   */
  toggleCircle(occ: number): void {
    if (this.overrides.has(occ)) {
      this.overrides.delete(occ);
    } else {
      this.overrides.set(occ, "collapse");
    }
  }

  select(classId: string | null): void {
    this.selectionClassId = this.selectionClassId === classId ? null : classId;
  }

  enterFocus(classId: string): void {
    this.focusClassId = classId;
  }

  /** Leaves overrides, pins and label offsets in place; only focus is cleared. */
  resetView(): void {
    this.focusClassId = null;
  }

  togglePin(classId: string): void {
    if (this.pinnedLabels.has(classId)) {
      this.pinnedLabels.delete(classId);
    } else {
      this.pinnedLabels.add(classId);
    }
  }

  dragLabel(classId: string, dx: number, dy: number): void {
    const [px, py] = this.labelOffsets.get(classId) ?? [0, 0];
    this.labelOffsets.set(classId, [px + dx, py + dy]);
  }
}
