"""Offline end-to-end runs of the built-in scenes.

Used by the `demo` CLI subcommand and the acceptance suite: everything is
scripted (mock interpreter, digest-stamper image backend) and clocked with a
fixed timestamp, so repeated runs produce byte-identical artifacts.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path
from typing import Any

from .backends import ScriptedInterpreter, StampImageBackend
from .fixtures import SCENES, scene_router
from .generation import generate_frames
from .intent import serialize_result
from .pipeline import infer_decomposition, infer_motions
from .prompts import synthesize_frame_prompts
from .raster import save_png
from .store import WorkspaceStore
from .timeline import build_timeline, keyframe_schedule, mark_generated

FIXED_CLOCK = "2026-01-01T00:00:00.000000Z"


def run_scene(name: str, out_dir: str | Path,
              image_backend=None) -> dict[str, Any]:
    """Run one scene end to end; returns a summary of what was written."""
    if name not in SCENES:
        raise ValueError(f"unknown example {name!r}; choose from {sorted(SCENES)}")
    scene = SCENES[name]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    store = WorkspaceStore(out / "workspace", clock=lambda: FIXED_CLOCK)
    workspace = store.create(base_image=scene.drawing(), workspace_id=f"demo-{name}")
    workspace = replace(workspace, notation_layer=scene.notations())

    interpreter = ScriptedInterpreter(router=scene_router(scene))
    backend = image_backend or StampImageBackend()

    result = infer_motions(workspace, interpreter)
    decomposition = infer_decomposition(workspace, result, interpreter)
    timeline = scene.adjust_timeline(build_timeline(result, decomposition))
    schedule = keyframe_schedule(timeline)
    prompts = synthesize_frame_prompts(result, timeline, schedule)
    records = generate_frames(workspace.drawing_layer, prompts, backend)

    for record in records:
        if record.status == "done":
            timeline = mark_generated(timeline, record.marker_id, record.frame_id)
    workspace = replace(workspace, interpretation=result, decomposition=decomposition,
                        timeline=timeline, frames=tuple(records))
    store.write(workspace)
    store.save_snapshot(workspace)

    (out / "result.json").write_text(serialize_result(result, indent=2) + "\n")
    frames_dir = out / "frames"
    frames_dir.mkdir(exist_ok=True)
    for record in records:
        save_png(record.image, frames_dir / f"{record.index}.png")
    (out / "prompts.json").write_text(json.dumps(
        [{"index": p.index, "marker_id": p.marker_id, "text": p.text,
          "inputs_digest": p.inputs_digest} for p in prompts],
        indent=2) + "\n")

    return {
        "example": name,
        "workspace_id": workspace.id,
        "units": [u.id for u in result.units],
        "tracks": len(timeline.tracks),
        "blocks": len(timeline.blocks),
        "frames": len(records),
        "result_json": str(out / "result.json"),
        "frames_dir": str(frames_dir),
        "manifest": str(out / "workspace" / workspace.id / "manifest.json"),
    }
