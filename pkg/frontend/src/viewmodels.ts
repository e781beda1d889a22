/**
 * Pure view models. Everything here is a deterministic projection of
 * server state; no semantics are re-derived client-side beyond display
 * mappings published in the engine docs.
 */

import type {
  AnimationUnit,
  Block,
  FrameRecord,
  InterpretationResult,
  RoiBBox,
  Timeline,
  UnassignedMark,
} from "./types";

export type ConfidenceBucket = "low" | "medium" | "high";

/** Display mapping for confidence badges; thresholds mirror the engine contract. */
export function confidenceBucket(confidence: number): ConfidenceBucket {
  if (confidence < 0.4) return "low";
  if (confidence < 0.75) return "medium";
  return "high";
}

const GRID_CELLS = 30;

/** Pixel rect for an ROI on a canvas of the given size (grid origin is bottom-left). */
export function roiToRect(
  roi: RoiBBox,
  width: number,
  height: number,
): { left: number; top: number; width: number; height: number } {
  const cellW = width / GRID_CELLS;
  const cellH = height / GRID_CELLS;
  const [xMin, yMin, xMax, yMax] = roi;
  const left = Math.round(xMin * cellW);
  const right = Math.round(xMax * cellW);
  const top = Math.round((GRID_CELLS - yMax) * cellH);
  const bottom = Math.round((GRID_CELLS - yMin) * cellH);
  return { left, top, width: right - left, height: bottom - top };
}

export interface MotionTagModel {
  unitId: string;
  color: string;
  summary: string;
  bucket: ConfidenceBucket;
  anchor: { left: number; top: number; width: number; height: number };
}

export function motionTags(
  result: InterpretationResult,
  canvasWidth: number,
  canvasHeight: number,
): MotionTagModel[] {
  return result.units.map((unit) => ({
    unitId: unit.id,
    color: unit.color ?? "#888888",
    summary: unit.natural_language_summary,
    bucket: confidenceBucket(unit.confidence),
    anchor: roiToRect(unit.roi_bbox, canvasWidth, canvasHeight),
  }));
}

export interface HoverPanelRow {
  field: "source" | "path" | "target" | "description";
  value: string;
  editable: boolean;
}

/** Rows for the hover details panel: the triplet verbatim plus the summary. */
export function hoverPanelModel(unit: AnimationUnit): HoverPanelRow[] {
  const rows: HoverPanelRow[] = (["source", "path", "target"] as const).map((field) => ({
    field,
    value: unit.primary[field] ?? "",
    editable: true,
  }));
  rows.push({ field: "description", value: unit.natural_language_summary, editable: true });
  return rows;
}

export interface SliderModel {
  unitId: string;
  sliderId: string;
  label: string;
  min: number;
  max: number;
  value: number;
  /** Endpoint labels: semantic anchors when provided, numeric otherwise. */
  minLabel: string;
  maxLabel: string;
  neutral: boolean;
}

export function sliderModels(unit: AnimationUnit): SliderModel[] {
  return unit.sliders.map((slider) => ({
    unitId: unit.id,
    sliderId: slider.id,
    label: slider.label,
    min: slider.min,
    max: slider.max,
    value: slider.value,
    minLabel: slider.min_label || `${slider.min}`,
    maxLabel: slider.max_label || `${slider.max}`,
    neutral: slider.value === slider.default,
  }));
}

export interface BlockViewModel {
  blockId: string;
  trackId: string;
  label: string;
  description: string;
  start: number;
  duration: number;
  /** Read from the track's color field, which the engine copies from the unit tag. */
  color: string;
  unitId: string;
}

export function blockViewModels(timeline: Timeline): BlockViewModel[] {
  const trackById = new Map(timeline.tracks.map((t) => [t.id, t]));
  return timeline.blocks.map((block: Block) => {
    const track = trackById.get(block.track_id);
    return {
      blockId: block.id,
      trackId: block.track_id,
      label: block.label,
      description: block.description,
      start: block.start,
      duration: block.duration,
      color: track?.color ?? "#888888",
      unitId: track?.unit_id ?? "",
    };
  });
}

export interface MarkerViewModel {
  markerId: string;
  time: number;
  status: "placeholder" | "generated";
  /** Frame index for the thumbnail above the marker, when generated. */
  frameIndex: number | null;
}

export function markerViewModels(timeline: Timeline, frames: FrameRecord[]): MarkerViewModel[] {
  const frameByMarker = new Map(frames.map((f) => [f.marker_id, f]));
  return timeline.markers.map((marker) => {
    const frame = frameByMarker.get(marker.id);
    return {
      markerId: marker.id,
      time: marker.time,
      status: marker.status,
      frameIndex: frame && frame.status === "done" ? frame.index : null,
    };
  });
}

/** Onion skinning needs at least one finished frame to overlay. */
export function onionToggleEnabled(frames: FrameRecord[]): boolean {
  return frames.some((frame) => frame.status === "done");
}

export function doneFrameIndices(frames: FrameRecord[]): number[] {
  return frames.filter((f) => f.status === "done").map((f) => f.index);
}

export interface UnassignedMarkModel {
  note: string;
  anchor: { left: number; top: number; width: number; height: number };
}

/**
 * Unassigned marks render as gray outline rects with notes. This surfacing
 * is a UI design addition; the engine only reports the marks.
 */
export function unassignedMarkModels(
  marks: UnassignedMark[],
  canvasWidth: number,
  canvasHeight: number,
): UnassignedMarkModel[] {
  return marks.map((mark) => ({
    note: mark.note,
    anchor: roiToRect(mark.bbox, canvasWidth, canvasHeight),
  }));
}
