"""Workspace persistence and history snapshots.

On-disk layout, one directory per workspace:

    <root>/<workspace_id>/
        manifest.json          # everything but pixels
        drawing.png
        notation.png
        frames/<index>.png
        history/<digest>.snap  # full canonical snapshot, content-addressed
        history/index.json     # append-only snapshot log
        .lock                  # advisory single-writer lock

Snapshots serialize the complete workspace (pixels embedded base64) to
canonical JSON; the digest is the SHA-256 of those bytes, checked on load.
Identical content dedups into one .snap file but still logs one history
entry per save.
"""

from __future__ import annotations

import base64
import errno
import json
import shutil
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

from filelock import FileLock
from PIL import Image

from .digest import canonical_bytes, sha256_hex
from .errors import IntegrityError, NotFound, SerializationError, StorageFull
from .generation import FrameRecord
from .intent import InterpretationResult, parse_interpretation
from .raster import blank, from_png_bytes, png_bytes
from .timeline import DecompositionEntry, Timeline

MANIFEST_NAME = "manifest.json"
HISTORY_DIR = "history"
FRAMES_DIR = "frames"

DEFAULT_CANVAS = 480


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


@dataclass(frozen=True)
class BrushState:
    mode: str = "drawing"  # drawing | notation
    size: int = 4
    color: str = "#1a1a1a"

    def __post_init__(self) -> None:
        if self.mode not in ("drawing", "notation"):
            raise ValueError(f"bad brush mode {self.mode!r}")

    def to_wire(self) -> dict[str, Any]:
        return {"mode": self.mode, "size": self.size, "color": self.color}


@dataclass(frozen=True)
class Workspace:
    id: str
    created_at: str
    modified_at: str
    drawing_layer: Image.Image
    notation_layer: Image.Image
    interpretation: InterpretationResult | None = None
    decomposition: tuple[DecompositionEntry, ...] = ()
    timeline: Timeline | None = None
    frames: tuple[FrameRecord, ...] = ()
    brush_state: BrushState = field(default_factory=BrushState)

    def __post_init__(self) -> None:
        if self.drawing_layer.size != self.notation_layer.size:
            raise ValueError(
                f"layer sizes differ: {self.drawing_layer.size} vs {self.notation_layer.size}")
        if [f.index for f in self.frames] != list(range(len(self.frames))):
            raise ValueError("frame indices must be contiguous from 0")

    @property
    def size(self) -> tuple[int, int]:
        return self.drawing_layer.size

    def touched(self, clock: Callable[[], str] = utc_now_iso) -> "Workspace":
        return replace(self, modified_at=clock())


@dataclass(frozen=True)
class Snapshot:
    snapshot_id: str
    workspace_id: str
    taken_at: str
    digest: str

    def to_wire(self) -> dict[str, Any]:
        return {"snapshot_id": self.snapshot_id, "workspace_id": self.workspace_id,
                "taken_at": self.taken_at, "digest": self.digest}


def _manifest_doc(workspace: Workspace) -> dict[str, Any]:
    return {
        "id": workspace.id,
        "created_at": workspace.created_at,
        "modified_at": workspace.modified_at,
        "width": workspace.size[0],
        "height": workspace.size[1],
        "brush_state": workspace.brush_state.to_wire(),
        "interpretation": (workspace.interpretation.to_wire()
                           if workspace.interpretation is not None else None),
        "decomposition": [e.to_wire() for e in workspace.decomposition],
        "timeline": workspace.timeline.to_wire() if workspace.timeline is not None else None,
        "frames": [f.to_wire() for f in workspace.frames],
    }


def snapshot_doc(workspace: Workspace) -> dict[str, Any]:
    """The full serialized workspace: manifest plus embedded pixel data."""
    doc = _manifest_doc(workspace)
    doc["layers"] = {
        "drawing": base64.b64encode(png_bytes(workspace.drawing_layer)).decode("ascii"),
        "notation": base64.b64encode(png_bytes(workspace.notation_layer)).decode("ascii"),
    }
    doc["frame_images"] = {
        str(f.index): base64.b64encode(png_bytes(f.image)).decode("ascii")
        for f in workspace.frames if f.image is not None
    }
    return doc


def _frames_from_wire(frames_wire: list[dict[str, Any]],
                      images: dict[int, Image.Image]) -> tuple[FrameRecord, ...]:
    records = []
    for wire in frames_wire:
        records.append(FrameRecord(
            frame_id=wire["frame_id"],
            marker_id=wire["marker_id"],
            index=wire["index"],
            status=wire["status"],
            image=images.get(wire["index"]),
            prompt_digest=wire.get("prompt_digest", ""),
            parent_frame_id=wire.get("parent_frame_id"),
        ))
    return tuple(records)


def workspace_from_snapshot_doc(doc: dict[str, Any]) -> Workspace:
    layers = doc["layers"]
    images = {int(k): from_png_bytes(base64.b64decode(v))
              for k, v in doc.get("frame_images", {}).items()}
    interpretation = None
    if doc.get("interpretation") is not None:
        interpretation = parse_interpretation(json.dumps(doc["interpretation"]))
    timeline = Timeline.from_wire(doc["timeline"]) if doc.get("timeline") else None
    return Workspace(
        id=doc["id"],
        created_at=doc["created_at"],
        modified_at=doc["modified_at"],
        drawing_layer=from_png_bytes(base64.b64decode(layers["drawing"])),
        notation_layer=from_png_bytes(base64.b64decode(layers["notation"])),
        interpretation=interpretation,
        decomposition=tuple(DecompositionEntry(**e) for e in doc.get("decomposition", [])),
        timeline=timeline,
        frames=_frames_from_wire(doc.get("frames", []), images),
        brush_state=BrushState(**doc.get("brush_state", {})),
    )


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    try:
        tmp.write_bytes(data)
        tmp.replace(path)
    except OSError as exc:
        if exc.errno == errno.ENOSPC:
            raise StorageFull(str(path)) from exc
        raise


class WorkspaceStore:
    """Directory-backed store; one advisory write lock per workspace."""

    def __init__(self, root: str | Path,
                 clock: Callable[[], str] = utc_now_iso,
                 id_factory: Callable[[], str] | None = None) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.clock = clock
        self.id_factory = id_factory or (lambda: uuid.uuid4().hex[:12])

    # -- paths ---------------------------------------------------------

    def _dir(self, workspace_id: str) -> Path:
        return self.root / workspace_id

    def _history_dir(self, workspace_id: str) -> Path:
        return self._dir(workspace_id) / HISTORY_DIR

    def lock(self, workspace_id: str) -> FileLock:
        return FileLock(str(self._dir(workspace_id) / ".lock"))

    def exists(self, workspace_id: str) -> bool:
        return (self._dir(workspace_id) / MANIFEST_NAME).exists()

    def list_workspaces(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir()
                      if (p / MANIFEST_NAME).exists())

    # -- create / read / write -----------------------------------------

    def create(self, width: int = DEFAULT_CANVAS, height: int = DEFAULT_CANVAS,
               base_image: Image.Image | None = None,
               workspace_id: str | None = None) -> Workspace:
        if base_image is not None:
            drawing = base_image.convert("RGBA")
            width, height = drawing.size
        else:
            drawing = blank(width, height, (255, 255, 255, 255))
        now = self.clock()
        workspace = Workspace(
            id=workspace_id or self.id_factory(),
            created_at=now,
            modified_at=now,
            drawing_layer=drawing,
            notation_layer=blank(width, height),
        )
        self.write(workspace)
        return workspace

    def write(self, workspace: Workspace) -> None:
        directory = self._dir(workspace.id)
        directory.mkdir(parents=True, exist_ok=True)
        with self.lock(workspace.id):
            try:
                manifest = json.dumps(_manifest_doc(workspace), indent=2, sort_keys=True)
            except (TypeError, ValueError) as exc:
                raise SerializationError(str(exc)) from exc
            _write_atomic(directory / "drawing.png", png_bytes(workspace.drawing_layer))
            _write_atomic(directory / "notation.png", png_bytes(workspace.notation_layer))
            frames_dir = directory / FRAMES_DIR
            if frames_dir.exists():
                shutil.rmtree(frames_dir)
            frames_dir.mkdir()
            for frame in workspace.frames:
                if frame.image is not None:
                    _write_atomic(frames_dir / f"{frame.index}.png", png_bytes(frame.image))
            _write_atomic(directory / MANIFEST_NAME, manifest.encode("utf-8"))

    def read(self, workspace_id: str) -> Workspace:
        directory = self._dir(workspace_id)
        manifest_path = directory / MANIFEST_NAME
        if not manifest_path.exists():
            raise NotFound(f"workspace {workspace_id!r}")
        doc = json.loads(manifest_path.read_text())
        images = {}
        for frame_wire in doc.get("frames", []):
            path = directory / FRAMES_DIR / f"{frame_wire['index']}.png"
            if frame_wire.get("has_image") and path.exists():
                images[frame_wire["index"]] = from_png_bytes(path.read_bytes())
        interpretation = None
        if doc.get("interpretation") is not None:
            interpretation = parse_interpretation(json.dumps(doc["interpretation"]))
        return Workspace(
            id=doc["id"],
            created_at=doc["created_at"],
            modified_at=doc["modified_at"],
            drawing_layer=from_png_bytes((directory / "drawing.png").read_bytes()),
            notation_layer=from_png_bytes((directory / "notation.png").read_bytes()),
            interpretation=interpretation,
            decomposition=tuple(DecompositionEntry(**e) for e in doc.get("decomposition", [])),
            timeline=Timeline.from_wire(doc["timeline"]) if doc.get("timeline") else None,
            frames=_frames_from_wire(doc.get("frames", []), images),
            brush_state=BrushState(**doc.get("brush_state", {})),
        )

    # -- history ---------------------------------------------------------

    def _history_index(self, workspace_id: str) -> dict[str, Any]:
        path = self._history_dir(workspace_id) / "index.json"
        if path.exists():
            return json.loads(path.read_text())
        return {"snapshots": []}

    def save_snapshot(self, workspace: Workspace) -> Snapshot:
        """Append one history entry; identical content shares a .snap file."""
        history = self._history_dir(workspace.id)
        history.mkdir(parents=True, exist_ok=True)
        with self.lock(workspace.id):
            try:
                payload = canonical_bytes(snapshot_doc(workspace))
            except (TypeError, ValueError) as exc:
                raise SerializationError(str(exc)) from exc
            digest = sha256_hex(payload)
            snap_path = history / f"{digest}.snap"
            if not snap_path.exists():
                _write_atomic(snap_path, payload)
            index = self._history_index(workspace.id)
            snapshot = Snapshot(
                snapshot_id=f"s{len(index['snapshots']) + 1:06d}",
                workspace_id=workspace.id,
                taken_at=self.clock(),
                digest=digest,
            )
            index["snapshots"].append(snapshot.to_wire())
            _write_atomic(history / "index.json",
                          json.dumps(index, indent=2, sort_keys=True).encode("utf-8"))
        return snapshot

    def list_history(self, workspace_id: str) -> list[Snapshot]:
        """Snapshot metadata, newest first."""
        entries = self._history_index(workspace_id)["snapshots"]
        snapshots = [Snapshot(**e) for e in entries]
        return list(reversed(snapshots))

    def load_snapshot(self, workspace_id: str, snapshot_id: str) -> Workspace:
        entries = self._history_index(workspace_id)["snapshots"]
        entry = next((e for e in entries if e["snapshot_id"] == snapshot_id), None)
        if entry is None:
            raise NotFound(f"snapshot {snapshot_id!r}")
        path = self._history_dir(workspace_id) / f"{entry['digest']}.snap"
        if not path.exists():
            raise NotFound(f"snapshot file for {snapshot_id!r}")
        payload = path.read_bytes()
        actual = sha256_hex(payload)
        if actual != entry["digest"]:
            raise IntegrityError(expected=entry["digest"], actual=actual)
        return workspace_from_snapshot_doc(json.loads(payload.decode("utf-8")))
