/**
 * Local UI session state. This is display state only: tag drag offsets,
 * brush settings, pending (unconfirmed) edits, onion-skin selection. The
 * engine's workspace is the single source of truth; reloading the page and
 * re-fetching reproduces the same scene plus these local offsets.
 */

export type CanvasMode = "drawing" | "notation";

export interface TagOffset {
  dx: number;
  dy: number;
}

export interface PendingEdit {
  unitId: string;
  field: "source" | "path" | "target" | "summary";
  value: string | null;
}

export interface UiSession {
  workspaceId: string;
  mode: CanvasMode;
  brush: { size: number; color: string };
  /** Display-only drag offsets per unit tag; never sent to the engine. */
  tagOffsets: Record<string, TagOffset>;
  /** Frame indices selected for the onion-skin overlay. */
  onionSelection: number[];
  onionVisible: boolean;
  /** Edits typed into hover panels but not yet confirmed. */
  pendingEdits: PendingEdit[];
  generating: boolean;
}

export function newSession(workspaceId: string): UiSession {
  return {
    workspaceId,
    mode: "drawing",
    brush: { size: 4, color: "#1a1a1a" },
    tagOffsets: {},
    onionSelection: [],
    onionVisible: false,
    pendingEdits: [],
    generating: false,
  };
}

export function setMode(session: UiSession, mode: CanvasMode): UiSession {
  return { ...session, mode };
}

export function setBrush(session: UiSession, brush: Partial<UiSession["brush"]>): UiSession {
  return { ...session, brush: { ...session.brush, ...brush } };
}

export function dragTag(session: UiSession, unitId: string, dx: number, dy: number): UiSession {
  const prev = session.tagOffsets[unitId] ?? { dx: 0, dy: 0 };
  return {
    ...session,
    tagOffsets: { ...session.tagOffsets, [unitId]: { dx: prev.dx + dx, dy: prev.dy + dy } },
  };
}

export function stageEdit(session: UiSession, edit: PendingEdit): UiSession {
  const rest = session.pendingEdits.filter(
    (e) => !(e.unitId === edit.unitId && e.field === edit.field),
  );
  return { ...session, pendingEdits: [...rest, edit] };
}

export function clearEdits(session: UiSession): UiSession {
  return { ...session, pendingEdits: [] };
}

export function toggleOnionFrame(session: UiSession, index: number): UiSession {
  const selected = session.onionSelection.includes(index)
    ? session.onionSelection.filter((i) => i !== index)
    : [...session.onionSelection, index].sort((a, b) => a - b);
  return { ...session, onionSelection: selected };
}

/**
 * Generate is disabled while a run is active or while the interpretation is
 * superseded by unconfirmed edits (the stale-result guard).
 */
export function generateEnabled(session: UiSession, hasInterpretation: boolean): boolean {
  return hasInterpretation && !session.generating && session.pendingEdits.length === 0;
}
