/**
 * DOM-free interaction core. Every user gesture funnels through here; the
 * browser shell only binds events and paints the scene this class holds.
 * Geometry is never computed locally: each interaction either replays the
 * full view state against /layout or applies a server-produced diff.
 */
import { ApiClient, ApiError, RequestGate } from "./api.js";
import { animationPlan, type AnimationPlan } from "./animate.js";
import { applyDiff, circleForClass, glyphByRef, popupText } from "./scene.js";
import { ClientViewState, circleOcc } from "./state.js";
import type { ClassCard, DiffWire, LayoutWire, SearchHit } from "./types.js";

export type Feedback = "shake" | "banner" | null;

export class ViewerController {
  scene: LayoutWire | null = null;
  selectionCard: ClassCard | null = null;
  lastAnimation: AnimationPlan | null = null;
  lastError: ApiError | null = null;
  lastFeedback: Feedback = null;
  private gate = new RequestGate();

  constructor(
    readonly api: ApiClient,
    readonly state: ClientViewState,
  ) {}

  /** Picks the busiest property when none is given, then loads the scene. */
  static async create(api: ApiClient, propertyId?: string): Promise<ViewerController> {
    if (propertyId === undefined) {
      const rows = await api.properties();
      if (rows.length === 0) throw new Error("ontology defines no properties");
      propertyId = rows[0]!.id;
    }
    const controller = new ViewerController(api, new ClientViewState(propertyId));
    await controller.refresh();
    return controller;
  }

  static async restore(api: ApiClient, serialized: string): Promise<ViewerController> {
    const controller = new ViewerController(api, ClientViewState.deserialize(serialized));
    await controller.refresh();
    if (controller.state.selectionClassId) {
      controller.selectionCard = await api.classCard(controller.state.selectionClassId);
    }
    return controller;
  }

  /** Re-requests the whole scene for the current view state. */
  async refresh(): Promise<void> {
    try {
      const resp = await this.gate.run(() => this.api.layout(this.state.toWire()));
      this.scene = resp.layout;
      this.lastError = null;
      this.lastFeedback = null;
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = err;
        this.lastFeedback = "banner";
        return;
      }
      throw err;
    }
  }

  /**
   * Double-click toggles compression. The server answers with an incremental
   * diff that is applied locally; a rejected toggle (collapsing the root)
   * rolls the state back and asks the shell for a shake.
   */
  async doubleClick(refId: string): Promise<DiffWire | null> {
    const prevWire = this.state.toWire();
    const savedOverrides = new Map(this.state.overrides);
    if (refId.startsWith("glyph:region:")) {
      this.state.toggleRegion(refId);
    } else if (/^glyph:\d+$/.test(refId)) {
      this.state.toggleCircle(circleOcc(refId));
    } else {
      return null;
    }
    try {
      const diff = await this.gate.run(() =>
        this.api.layoutDiff(prevWire, this.state.toWire()),
      );
      if (this.scene) {
        this.lastAnimation = animationPlan(this.scene, diff);
        this.scene = applyDiff(this.scene, diff);
      }
      this.lastError = null;
      this.lastFeedback = null;
      return diff;
    } catch (err) {
      if (err instanceof ApiError) {
        this.state.overrides = savedOverrides;
        this.lastError = err;
        this.lastFeedback = err.code === "RootCollapseError" ? "shake" : "banner";
        return null;
      }
      throw err;
    }
  }

  /** Click on a class circle: select it (or deselect on a second click). */
  async select(classId: string | null): Promise<void> {
    this.state.select(classId);
    this.selectionCard = this.state.selectionClassId
      ? await this.api.classCard(this.state.selectionClassId)
      : null;
    await this.refresh();
  }

  async enterFocus(classId: string): Promise<void> {
    this.state.enterFocus(classId);
    await this.refresh();
  }

  async resetView(): Promise<void> {
    this.state.resetView();
    await this.refresh();
  }

  async setProperty(propertyId: string): Promise<void> {
    this.state.setProperty(propertyId);
    await this.refresh();
  }

  async dragLabel(classId: string, dx: number, dy: number): Promise<void> {
    this.state.dragLabel(classId, dx, dy);
    await this.refresh();
  }

  async togglePin(classId: string): Promise<void> {
    this.state.togglePin(classId);
    await this.refresh();
  }

  search(q: string): Promise<SearchHit[]> {
    return this.api.search(q, this.state.propertyId);
  }

  popupForRef(refId: string): string | null {
    if (!this.scene) return null;
    const glyph = glyphByRef(this.scene, refId);
    return glyph ? popupText(glyph) : null;
  }

  /**
   * Which edge arrow to show for a class that sits outside the viewport, or
   * null when it is visible (or not rendered as a circle at all).
   */
  offscreenDirection(classId: string, viewportW: number): "left" | "right" | null {
    if (!this.scene) return null;
    const glyph = circleForClass(this.scene, classId);
    if (!glyph) return null;
    if (glyph.cx < this.state.scrollX) return "left";
    if (glyph.cx > this.state.scrollX + viewportW) return "right";
    return null;
  }

  scrollTo(classId: string, viewportW: number): void {
    if (!this.scene) return;
    const glyph = circleForClass(this.scene, classId);
    if (!glyph) return;
    const max = Math.max(0, this.scene.totalW - viewportW);
    this.state.scrollX = Math.min(max, Math.max(0, glyph.cx - viewportW / 2));
  }
}
