/** Browser shell: binds DOM events to the controller and paints its scene. */
import { ApiClient } from "./api.js";
import { ViewerController } from "./controller.js";
import { animateDiff, renderLegend, renderScene, type RenderOptions } from "./render.js";
import { classForOcc, glyphByRef } from "./scene.js";

const STORAGE_KEY = "ontoplot-view";

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function apiBase(): string {
  const override = new URLSearchParams(location.search).get("api");
  return override ?? location.origin;
}

async function main(): Promise<void> {
  const api = new ApiClient(apiBase());
  const svg = byId<HTMLElement>("scene") as unknown as SVGSVGElement;
  const viewport = byId<HTMLDivElement>("viewport");
  const banner = byId<HTMLDivElement>("error-banner");
  const popup = byId<HTMLDivElement>("popup");
  const popover = byId<HTMLDivElement>("popover");
  const focusBar = byId<HTMLDivElement>("focus-bar");
  const assocPanel = byId<HTMLDivElement>("assoc-panel");
  const propertySelect = byId<HTMLSelectElement>("property-select");
  const searchInput = byId<HTMLInputElement>("search-input");
  const searchResults = byId<HTMLUListElement>("search-results");
  const classLabelsBox = byId<HTMLInputElement>("labels-class");
  const assocLabelsBox = byId<HTMLInputElement>("labels-assoc");
  const edgeLeft = byId<HTMLDivElement>("edge-left");
  const edgeRight = byId<HTMLDivElement>("edge-right");

  const opts: RenderOptions = { showClassLabels: true, showAssocLabels: true };

  const showBanner = (message: string) => {
    banner.textContent = message;
    banner.hidden = false;
    setTimeout(() => (banner.hidden = true), 4000);
  };

  const properties = await api.properties();
  for (const row of properties) {
    const opt = document.createElement("option");
    opt.value = row.id;
    opt.textContent = `${row.label} (${row.associationCount})`;
    propertySelect.appendChild(opt);
  }

  let controller: ViewerController;
  const stored = localStorage.getItem(STORAGE_KEY);
  if (stored) {
    try {
      controller = await ViewerController.restore(api, stored);
    } catch {
      controller = await ViewerController.create(api);
    }
  } else {
    controller = await ViewerController.create(api);
  }
  propertySelect.value = controller.state.propertyId;

  const persist = () => localStorage.setItem(STORAGE_KEY, controller.state.serialize());

  const updateChrome = () => {
    const focus = controller.state.focusClassId;
    focusBar.hidden = focus === null;
    if (focus !== null) {
      byId<HTMLSpanElement>("focus-name").textContent = focus;
    }
    const selected = controller.state.selectionClassId;
    assocPanel.innerHTML = "";
    if (selected && controller.selectionCard) {
      const head = document.createElement("h3");
      head.textContent = controller.selectionCard.label;
      assocPanel.appendChild(head);
      for (const a of controller.selectionCard.associations) {
        const row = document.createElement("div");
        const other = a.source === selected ? a.target : a.source;
        row.textContent = `${a.source === selected ? "to" : "from"} ${other} via ${a.property}`;
        assocPanel.appendChild(row);
      }
    }
    const viewW = viewport.clientWidth;
    const dir = selected ? controller.offscreenDirection(selected, viewW) : null;
    edgeLeft.hidden = dir !== "left";
    edgeRight.hidden = dir !== "right";
  };

  const repaint = () => {
    if (controller.scene) {
      renderScene(svg, controller.scene, opts);
      renderLegend(byId<HTMLDivElement>("legend"), controller.scene);
    }
    viewport.scrollLeft = controller.state.scrollX;
    updateChrome();
    persist();
    if (controller.lastFeedback === "banner" && controller.lastError) {
      showBanner(controller.lastError.message);
    }
  };

  const refOf = (target: EventTarget | null): string | null => {
    const node = (target as Element | null)?.closest("[data-ref]");
    return node?.getAttribute("data-ref") ?? null;
  };

  svg.addEventListener("dblclick", async (ev) => {
    const refId = refOf(ev.target);
    if (!refId || !controller.scene) return;
    const prevScene = controller.scene;
    const diff = await controller.doubleClick(refId);
    if (diff && controller.scene && controller.lastAnimation) {
      animateDiff(svg, prevScene, controller.scene, diff, controller.lastAnimation, opts, repaint);
      persist();
    } else if (controller.lastFeedback === "shake") {
      viewport.classList.add("shake");
      setTimeout(() => viewport.classList.remove("shake"), 400);
    } else if (controller.lastFeedback === "banner" && controller.lastError) {
      showBanner(controller.lastError.message);
    }
  });

  svg.addEventListener("click", async (ev) => {
    const refId = refOf(ev.target);
    popover.hidden = true;
    if (!refId || !controller.scene) return;
    const glyph = glyphByRef(controller.scene, refId);
    if (!glyph || glyph.kind !== "circle" || !glyph.classId) return;
    await controller.select(glyph.classId);
    repaint();
    if (controller.state.selectionClassId === glyph.classId) {
      popover.hidden = false;
      popover.style.left = `${glyph.cx - controller.state.scrollX + 12}px`;
      popover.style.top = `${glyph.cy + 12}px`;
      popover.dataset.classId = glyph.classId;
    }
  });

  svg.addEventListener("mousemove", (ev) => {
    const refId = refOf(ev.target);
    const text = refId ? controller.popupForRef(refId) : null;
    popup.hidden = text === null;
    if (text !== null) {
      popup.textContent = text;
      popup.style.left = `${ev.pageX + 10}px`;
      popup.style.top = `${ev.pageY + 10}px`;
    }
  });
  svg.addEventListener("mouseleave", () => (popup.hidden = true));

  // Association labels drag live, then the offset persists via relayout.
  let drag: { refId: string; startX: number; startY: number; node: Element } | null = null;
  svg.addEventListener("pointerdown", (ev) => {
    const refId = refOf(ev.target);
    if (!refId || !refId.startsWith("label:assoc:")) return;
    const node = (ev.target as Element).closest("[data-ref]");
    if (!node) return;
    drag = { refId, startX: ev.clientX, startY: ev.clientY, node };
    svg.setPointerCapture(ev.pointerId);
  });
  svg.addEventListener("pointermove", (ev) => {
    if (!drag) return;
    const dx = ev.clientX - drag.startX;
    const dy = ev.clientY - drag.startY;
    (drag.node as SVGGraphicsElement).setAttribute("transform", `translate(${dx} ${dy})`);
  });
  svg.addEventListener("pointerup", async (ev) => {
    if (!drag || !controller.scene) return;
    const dx = ev.clientX - drag.startX;
    const dy = ev.clientY - drag.startY;
    const occ = Number(drag.refId.split(":")[2]);
    drag = null;
    const classId = classForOcc(controller.scene, occ);
    if (classId && (dx !== 0 || dy !== 0)) {
      await controller.dragLabel(classId, dx, dy);
    }
    repaint();
  });

  byId<HTMLButtonElement>("pin-btn").addEventListener("click", async () => {
    const classId = popover.dataset.classId;
    popover.hidden = true;
    if (classId) {
      await controller.togglePin(classId);
      repaint();
    }
  });
  byId<HTMLButtonElement>("focus-btn").addEventListener("click", async () => {
    const classId = popover.dataset.classId;
    popover.hidden = true;
    if (classId) {
      await controller.enterFocus(classId);
      repaint();
    }
  });
  byId<HTMLButtonElement>("reset-view").addEventListener("click", async () => {
    await controller.resetView();
    repaint();
  });

  propertySelect.addEventListener("change", async () => {
    await controller.setProperty(propertySelect.value);
    repaint();
  });

  classLabelsBox.addEventListener("change", () => {
    opts.showClassLabels = classLabelsBox.checked;
    repaint();
  });
  assocLabelsBox.addEventListener("change", () => {
    opts.showAssocLabels = assocLabelsBox.checked;
    repaint();
  });

  searchInput.addEventListener("input", async () => {
    const q = searchInput.value.trim();
    searchResults.innerHTML = "";
    if (!q) return;
    const hits = await controller.search(q);
    for (const hit of hits) {
      const li = document.createElement("li");
      li.textContent = `${hit.label} (${hit.associationCount})`;
      li.addEventListener("click", async () => {
        await controller.select(hit.classId);
        controller.scrollTo(hit.classId, viewport.clientWidth);
        searchResults.innerHTML = "";
        repaint();
      });
      searchResults.appendChild(li);
    }
  });

  const scrollToSelection = () => {
    const selected = controller.state.selectionClassId;
    if (selected) {
      controller.scrollTo(selected, viewport.clientWidth);
      repaint();
    }
  };
  edgeLeft.addEventListener("click", scrollToSelection);
  edgeRight.addEventListener("click", scrollToSelection);

  viewport.addEventListener("scroll", () => {
    controller.state.scrollX = viewport.scrollLeft;
    persist();
  });

  repaint();
}

main().catch((err) => {
  const banner = document.getElementById("error-banner");
  if (banner) {
    banner.textContent = err instanceof Error ? err.message : String(err);
    banner.hidden = false;
  }
});
