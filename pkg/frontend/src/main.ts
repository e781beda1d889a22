/**
 * App wiring: toolbar, canvas stack, motion tags with hover panels,
 * sliders, timeline, generation progress, onion skin, save/history.
 */

import { ApiClient, ApiRequestError } from "./api";
import { attachBrush, createLayerStack, exportLayer, paintLayerFromUrl } from "./canvas";
import {
  clearEdits,
  dragTag,
  generateEnabled,
  newSession,
  setBrush,
  setMode,
  stageEdit,
  toggleOnionFrame,
  type UiSession,
} from "./session";
import type { FrameRecord, WorkspaceManifest } from "./types";
import {
  blockViewModels,
  doneFrameIndices,
  hoverPanelModel,
  markerViewModels,
  motionTags,
  onionToggleEnabled,
  sliderModels,
  unassignedMarkModels,
} from "./viewmodels";

const CANVAS_SIZE = 480;
const BEAT_PX = 90;

const api = new ApiClient("");
let session: UiSession;
let manifest: WorkspaceManifest | null = null;
let liveFrames: FrameRecord[] = [];

function toast(message: string, kind: "info" | "error" = "info"): void {
  const el = document.createElement("div");
  el.className = `toast toast-${kind}`;
  el.textContent = message;
  document.getElementById("toasts")?.appendChild(el);
  setTimeout(() => el.remove(), 4000);
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    return await work();
  } catch (error) {
    if (error instanceof ApiRequestError) toast(`${error.code}: ${error.message}`, "error");
    else toast(String(error), "error");
    return undefined;
  }
}

async function refresh(): Promise<void> {
  manifest = await api.getWorkspace(session.workspaceId);
  liveFrames = manifest.frames;
  render();
}

function render(): void {
  renderToolbar();
  renderTags();
  renderSliders();
  renderTimeline();
  renderOnion();
}

function renderToolbar(): void {
  const modeDrawing = document.getElementById("mode-drawing") as HTMLButtonElement;
  const modeNotation = document.getElementById("mode-notation") as HTMLButtonElement;
  modeDrawing.classList.toggle("active", session.mode === "drawing");
  modeNotation.classList.toggle("active", session.mode === "notation");

  const generateButton = document.getElementById("generate") as HTMLButtonElement;
  generateButton.disabled = !generateEnabled(session, manifest?.interpretation != null);

  const confirmButton = document.getElementById("confirm-edits") as HTMLButtonElement;
  confirmButton.disabled = session.pendingEdits.length === 0;

  const onionButton = document.getElementById("onion-toggle") as HTMLButtonElement;
  onionButton.disabled = !onionToggleEnabled(liveFrames);
  onionButton.classList.toggle("active", session.onionVisible);
}

function renderTags(): void {
  const overlay = document.querySelector(".tag-overlay");
  if (!overlay || !manifest) return;
  overlay.querySelectorAll(".motion-tag, .unassigned-mark").forEach((el) => el.remove());
  const result = manifest.interpretation;
  if (!result) return;

  for (const tag of motionTags(result, CANVAS_SIZE, CANVAS_SIZE)) {
    const offset = session.tagOffsets[tag.unitId] ?? { dx: 0, dy: 0 };
    const el = document.createElement("div");
    el.className = `motion-tag badge-${tag.bucket}`;
    el.style.position = "absolute";
    el.style.left = `${tag.anchor.left + offset.dx}px`;
    el.style.top = `${Math.max(tag.anchor.top - 24, 0) + offset.dy}px`;
    el.style.borderColor = tag.color;
    el.innerHTML = `<span class="dot" style="background:${tag.color}"></span>` +
      `<span class="tag-name">${tag.unitId}</span>` +
      `<span class="badge">${tag.bucket}</span>`;
    wireTagDrag(el, tag.unitId);
    el.addEventListener("mouseenter", () => showHoverPanel(tag.unitId, el));
    overlay.appendChild(el);
  }

  for (const mark of unassignedMarkModels(result.unassigned_marks, CANVAS_SIZE, CANVAS_SIZE)) {
    const el = document.createElement("div");
    el.className = "unassigned-mark"; // gray outline: a UI addition, flagged in the title
    el.title = `unassigned: ${mark.note}`;
    el.style.position = "absolute";
    el.style.left = `${mark.anchor.left}px`;
    el.style.top = `${mark.anchor.top}px`;
    el.style.width = `${mark.anchor.width}px`;
    el.style.height = `${mark.anchor.height}px`;
    overlay.appendChild(el);
  }
}

function wireTagDrag(el: HTMLElement, unitId: string): void {
  el.addEventListener("pointerdown", (down) => {
    down.stopPropagation();
    let lastX = down.clientX;
    let lastY = down.clientY;
    const move = (event: PointerEvent) => {
      session = dragTag(session, unitId, event.clientX - lastX, event.clientY - lastY);
      lastX = event.clientX;
      lastY = event.clientY;
      renderTags();
    };
    const up = () => {
      window.removeEventListener("pointermove", move);
      window.removeEventListener("pointerup", up);
    };
    window.addEventListener("pointermove", move);
    window.addEventListener("pointerup", up);
  });
}

function showHoverPanel(unitId: string, anchor: HTMLElement): void {
  const result = manifest?.interpretation;
  const unit = result?.units.find((u) => u.id === unitId);
  const panel = document.getElementById("hover-panel");
  if (!unit || !panel) return;
  panel.innerHTML = "";
  panel.style.display = "block";
  panel.style.left = `${anchor.offsetLeft + 30}px`;
  panel.style.top = `${anchor.offsetTop + 20}px`;

  for (const row of hoverPanelModel(unit)) {
    const label = document.createElement("label");
    label.textContent = row.field;
    const input = document.createElement("input");
    input.value = row.value;
    input.addEventListener("change", () => {
      const field = row.field === "description" ? "summary" : row.field;
      session = stageEdit(session, { unitId, field, value: input.value || null });
      renderToolbar();
    });
    panel.append(label, input);
  }
  panel.addEventListener("mouseleave", () => (panel.style.display = "none"), { once: true });
}

function renderSliders(): void {
  const host = document.getElementById("sliders");
  if (!host) return;
  host.innerHTML = "";
  const result = manifest?.interpretation;
  if (!result) return;
  for (const unit of result.units) {
    for (const model of sliderModels(unit)) {
      const row = document.createElement("div");
      row.className = "slider-row";
      row.innerHTML =
        `<span class="slider-label" style="color:${unit.color ?? "#444"}">${model.label}</span>` +
        `<span class="anchor">${model.minLabel}</span>`;
      const input = document.createElement("input");
      input.type = "range";
      input.min = `${model.min}`;
      input.max = `${model.max}`;
      input.step = "0.01";
      input.value = `${model.value}`;
      // PATCH on release, not on every input tick
      input.addEventListener("change", () =>
        guard(async () => {
          await api.setSlider(session.workspaceId, model.unitId, model.sliderId,
            Number(input.value));
          await refresh();
        }),
      );
      row.appendChild(input);
      row.insertAdjacentHTML("beforeend", `<span class="anchor">${model.maxLabel}</span>`);
      host.appendChild(row);
    }
  }
}

function renderTimeline(): void {
  const host = document.getElementById("timeline");
  if (!host) return;
  host.innerHTML = "";
  const timeline = manifest?.timeline;
  if (!timeline) return;

  const markers = markerViewModels(timeline, liveFrames);
  const markerLane = document.createElement("div");
  markerLane.className = "marker-lane";
  for (const marker of markers) {
    const el = document.createElement("div");
    el.className = `marker marker-${marker.status}`;
    el.style.left = `${marker.time * BEAT_PX}px`;
    if (marker.frameIndex !== null) {
      const thumb = document.createElement("img");
      thumb.className = "thumb";
      thumb.src = api.frameUrl(session.workspaceId, marker.frameIndex);
      thumb.addEventListener("click", () => placeFrameOnCanvas(marker.frameIndex as number));
      el.appendChild(thumb);
    }
    markerLane.appendChild(el);
  }
  host.appendChild(markerLane);

  const byTrack = new Map<string, ReturnType<typeof blockViewModels>>();
  for (const block of blockViewModels(timeline)) {
    const list = byTrack.get(block.trackId) ?? [];
    list.push(block);
    byTrack.set(block.trackId, list);
  }
  for (const track of timeline.tracks) {
    const lane = document.createElement("div");
    lane.className = "track-lane";
    const name = document.createElement("span");
    name.className = "track-name";
    name.textContent = track.part_name;
    lane.appendChild(name);
    for (const block of byTrack.get(track.id) ?? []) {
      const el = document.createElement("div");
      el.className = "block";
      el.title = block.description;
      el.textContent = block.label;
      el.style.left = `${block.start * BEAT_PX}px`;
      el.style.width = `${block.duration * BEAT_PX}px`;
      el.style.background = block.color; // mirrors the unit's tag color exactly
      wireBlockInteractions(el, block.blockId, block.start, block.duration);
      lane.appendChild(el);
    }
    host.appendChild(lane);
  }
}

function wireBlockInteractions(el: HTMLElement, blockId: string, start: number,
                               duration: number): void {
  el.addEventListener("pointerdown", (down) => {
    const resizeZone = down.offsetX > el.offsetWidth - 8;
    const originX = down.clientX;
    let moved = false;
    const move = (event: PointerEvent) => {
      moved = Math.abs(event.clientX - originX) > 2 || moved;
    };
    const up = async (event: PointerEvent) => {
      window.removeEventListener("pointermove", move);
      if (!moved) return;
      const deltaBeats = (event.clientX - originX) / BEAT_PX;
      await guard(async () => {
        if (resizeZone) {
          await api.resizeBlock(session.workspaceId, blockId,
            Math.max(duration + deltaBeats, 0.05));
        } else {
          await api.moveBlock(session.workspaceId, blockId,
            Math.max(start + deltaBeats, 0));
        }
        await refresh();
      });
    };
    window.addEventListener("pointermove", move);
    window.addEventListener("pointerup", up, { once: true });
  });
  el.addEventListener("dblclick", () =>
    guard(async () => {
      await api.deleteBlock(session.workspaceId, blockId);
      await refresh();
    }),
  );
}

async function placeFrameOnCanvas(index: number): Promise<void> {
  const stack = document.querySelector(".layer-drawing") as HTMLCanvasElement | null;
  if (!stack) return;
  await paintLayerFromUrl(stack, api.frameUrl(session.workspaceId, index));
  toast(`placed keyframe ${index} on canvas`);
}

function renderOnion(): void {
  const img = document.getElementById("onion-preview") as HTMLImageElement | null;
  if (!img) return;
  if (!session.onionVisible || session.onionSelection.length === 0) {
    img.style.display = "none";
    return;
  }
  img.style.display = "block";
  img.src = api.onionUrl(session.workspaceId, session.onionSelection);
}

async function pushLayer(layer: "drawing" | "notation"): Promise<void> {
  const canvas = document.querySelector(
    layer === "drawing" ? ".layer-drawing" : ".layer-notation",
  ) as HTMLCanvasElement | null;
  if (!canvas) return;
  const bytes = await exportLayer(canvas);
  await guard(() => api.putLayer(session.workspaceId, layer, bytes));
}

async function boot(): Promise<void> {
  const app = document.getElementById("app");
  if (!app) return;
  const { id } = await api.createWorkspace(CANVAS_SIZE, CANVAS_SIZE);
  session = newSession(id);

  const stack = createLayerStack(CANVAS_SIZE, CANVAS_SIZE);
  document.getElementById("canvas-host")?.appendChild(stack.container);
  attachBrush(stack, () => session.mode, () => session.brush, (layer) => void pushLayer(layer));

  document.getElementById("mode-drawing")?.addEventListener("click", () => {
    session = setMode(session, "drawing");
    renderToolbar();
  });
  document.getElementById("mode-notation")?.addEventListener("click", () => {
    session = setMode(session, "notation");
    renderToolbar();
  });
  (document.getElementById("brush-size") as HTMLInputElement)?.addEventListener("change", (e) => {
    session = setBrush(session, { size: Number((e.target as HTMLInputElement).value) });
  });
  (document.getElementById("brush-color") as HTMLInputElement)?.addEventListener("change", (e) => {
    session = setBrush(session, { color: (e.target as HTMLInputElement).value });
  });

  document.getElementById("infer")?.addEventListener("click", () =>
    guard(async () => {
      toast("inferring motion…");
      await api.infer(session.workspaceId);
      await refresh();
    }),
  );

  document.getElementById("confirm-edits")?.addEventListener("click", () =>
    guard(async () => {
      const byUnit = new Map<string, Record<string, string | null>>();
      for (const edit of session.pendingEdits) {
        const edits = byUnit.get(edit.unitId) ?? {};
        edits[edit.field] = edit.value;
        byUnit.set(edit.unitId, edits);
      }
      for (const [unitId, edits] of byUnit) {
        await api.editUnit(session.workspaceId, unitId, edits);
      }
      await api.reinfer(session.workspaceId);
      session = clearEdits(session);
      await refresh();
    }),
  );

  document.getElementById("generate")?.addEventListener("click", () =>
    guard(async () => {
      session = { ...session, generating: true };
      renderToolbar();
      try {
        await api.generate(session.workspaceId, (frame) => {
          liveFrames = [...liveFrames.filter((f) => f.index !== frame.index), frame]
            .sort((a, b) => a.index - b.index);
          renderTimeline();
          renderToolbar();
        });
      } finally {
        session = { ...session, generating: false };
      }
      await refresh();
    }),
  );

  document.getElementById("onion-toggle")?.addEventListener("click", () => {
    session = { ...session, onionVisible: !session.onionVisible };
    if (session.onionSelection.length === 0) {
      for (const index of doneFrameIndices(liveFrames)) {
        session = toggleOnionFrame(session, index);
      }
    }
    render();
  });

  document.getElementById("save")?.addEventListener("click", () =>
    guard(async () => {
      const snapshot = await api.save(session.workspaceId);
      toast(`saved snapshot ${snapshot.snapshot_id}`);
      await renderHistory();
    }),
  );
  await renderHistory();
  await refresh();
}

async function renderHistory(): Promise<void> {
  const host = document.getElementById("history");
  if (!host) return;
  const entries = await api.history(session.workspaceId);
  host.innerHTML = entries
    .map((s) => `<li>${s.snapshot_id} · ${s.taken_at}</li>`)
    .join("");
}

boot().catch((error) => toast(String(error), "error"));
