/**
 * Layered drawing surface: one canvas per raster layer (drawing, notation).
 * Strokes rasterize at canvas resolution into whichever layer the session's
 * mode targets; layers export as PNG bytes for PUT /layers round-trips.
 */

import type { CanvasMode } from "./session";

export interface LayerStack {
  container: HTMLElement;
  drawing: HTMLCanvasElement;
  notation: HTMLCanvasElement;
  overlay: HTMLDivElement;
}

export function createLayerStack(width: number, height: number): LayerStack {
  const container = document.createElement("div");
  container.className = "canvas-stack";
  container.style.position = "relative";
  container.style.width = `${width}px`;
  container.style.height = `${height}px`;

  const make = (name: string): HTMLCanvasElement => {
    const canvas = document.createElement("canvas");
    canvas.width = width;
    canvas.height = height;
    canvas.className = `layer layer-${name}`;
    canvas.style.position = "absolute";
    canvas.style.left = "0";
    canvas.style.top = "0";
    container.appendChild(canvas);
    return canvas;
  };
  const drawing = make("drawing");
  const ctx = drawing.getContext("2d");
  if (ctx) {
    ctx.fillStyle = "#ffffff";
    ctx.fillRect(0, 0, width, height);
  }
  const notation = make("notation");

  const overlay = document.createElement("div");
  overlay.className = "tag-overlay";
  overlay.style.position = "absolute";
  overlay.style.inset = "0";
  container.appendChild(overlay);

  return { container, drawing, notation, overlay };
}

export interface BrushSettings {
  size: number;
  color: string;
}

/** Wire pointer events so strokes land on the active layer. */
export function attachBrush(
  stack: LayerStack,
  activeMode: () => CanvasMode,
  brush: () => BrushSettings,
  onStrokeEnd: (layer: CanvasMode) => void,
): void {
  let drawing = false;
  let last: { x: number; y: number } | null = null;

  const target = (): HTMLCanvasElement =>
    activeMode() === "drawing" ? stack.drawing : stack.notation;

  const position = (event: PointerEvent): { x: number; y: number } => {
    const rect = target().getBoundingClientRect();
    return {
      x: ((event.clientX - rect.left) * target().width) / rect.width,
      y: ((event.clientY - rect.top) * target().height) / rect.height,
    };
  };

  stack.overlay.addEventListener("pointerdown", (event) => {
    drawing = true;
    last = position(event);
    stack.overlay.setPointerCapture(event.pointerId);
  });
  stack.overlay.addEventListener("pointermove", (event) => {
    if (!drawing || !last) return;
    const ctx = target().getContext("2d");
    if (!ctx) return;
    const next = position(event);
    const settings = brush();
    ctx.strokeStyle = settings.color;
    ctx.lineWidth = settings.size;
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    ctx.beginPath();
    ctx.moveTo(last.x, last.y);
    ctx.lineTo(next.x, next.y);
    ctx.stroke();
    last = next;
  });
  const finish = () => {
    if (drawing) {
      drawing = false;
      last = null;
      onStrokeEnd(activeMode());
    }
  };
  stack.overlay.addEventListener("pointerup", finish);
  stack.overlay.addEventListener("pointerleave", finish);
}

/** Export one layer as PNG bytes (byte-for-byte what PUT /layers receives). */
export async function exportLayer(canvas: HTMLCanvasElement): Promise<Uint8Array> {
  const blob = await new Promise<Blob | null>((resolve) => canvas.toBlob(resolve, "image/png"));
  if (!blob) throw new Error("canvas export failed");
  return new Uint8Array(await blob.arrayBuffer());
}

export async function paintLayerFromUrl(canvas: HTMLCanvasElement, url: string): Promise<void> {
  const image = new Image();
  image.crossOrigin = "anonymous";
  await new Promise<void>((resolve, reject) => {
    image.onload = () => resolve();
    image.onerror = () => reject(new Error(`failed to load ${url}`));
    image.src = url;
  });
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(image, 0, 0, canvas.width, canvas.height);
}
