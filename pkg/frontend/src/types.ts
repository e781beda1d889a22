/**
 * Wire types mirroring the engine's published JSON schemas
 * (interpretation.schema.json and the workspace manifest).
 */

export interface PrimaryTriplet {
  source?: string | null;
  path?: string | null;
  target?: string | null;
}

export interface SecondaryModifier {
  property: "color" | "thickness" | "text" | "number" | "letter" | "style" | "other";
  value: string;
  intended_meaning?: string;
  scope?: "source" | "path" | "target" | "unit";
}

export interface DimensionSlider {
  id: string;
  label: string;
  kind: "amplitude" | "directional_bias" | "timing";
  min: number;
  max: number;
  default: number;
  value: number;
  min_label?: string;
  max_label?: string;
}

/** [x_min, y_min, x_max, y_max] in grid units, origin bottom-left, y up. */
export type RoiBBox = [number, number, number, number];

export interface AnimationUnit {
  id: string;
  color?: string;
  roi_bbox: RoiBBox;
  primary: PrimaryTriplet;
  secondary_modifiers: SecondaryModifier[];
  temporal_order: number | null;
  confidence: number;
  natural_language_summary: string;
  sliders: DimensionSlider[];
  edited_fields?: string[];
  pin_enforced?: boolean;
}

export interface UnassignedMark {
  note: string;
  bbox: RoiBBox;
}

export interface InterpretationResult {
  units: AnimationUnit[];
  unassigned_marks: UnassignedMark[];
  global_timeline: string[];
  legend_inferred: { cue: string; meaning: string }[];
}

export interface Track {
  id: string;
  part_name: string;
  unit_id: string;
  color: string | null;
}

export interface Block {
  id: string;
  track_id: string;
  label: string;
  start: number;
  duration: number;
  description: string;
}

export interface KeyframeMarker {
  id: string;
  time: number;
  status: "placeholder" | "generated";
  frame_ref: string | null;
}

export interface Timeline {
  tracks: Track[];
  blocks: Block[];
  markers: KeyframeMarker[];
  beat_duration_hint: number;
}

export type FrameStatus = "pending" | "generating" | "done" | "failed";

export interface FrameRecord {
  frame_id: string;
  marker_id: string;
  index: number;
  status: FrameStatus;
  prompt_digest: string;
  parent_frame_id: string | null;
  has_image: boolean;
}

export interface WorkspaceManifest {
  id: string;
  created_at: string;
  modified_at: string;
  width: number;
  height: number;
  brush_state: { mode: "drawing" | "notation"; size: number; color: string };
  interpretation: InterpretationResult | null;
  decomposition: { unit_id: string; part_name: string; verb: string; description: string }[];
  timeline: Timeline | null;
  frames: FrameRecord[];
}

export interface SnapshotMeta {
  snapshot_id: string;
  workspace_id: string;
  taken_at: string;
  digest: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details?: unknown;
}
