#!/usr/bin/env python3
"""End-to-end drive of the real HTTP server over a socket, fully offline.

Pre-records replay cassettes for the "run" scene (interpreter replies and
the digest-stamped image chain), launches `notana serve` in replay mode as
a subprocess, and walks the whole authoring loop over HTTP:
create -> upload layers -> infer -> timeline edit -> generate (SSE) ->
fetch frames -> onion skin -> save -> history.

Exits non-zero on the first failed check.
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
import time
from dataclasses import replace
from pathlib import Path

import httpx

from notana.backends import Cassette, StampImageBackend
from notana.backends.mock import stamp_digest
from notana.digest import request_digest
from notana.fixtures import SCENES
from notana.pipeline import grounded_canvas
from notana.prompts import synthesize_frame_prompts
from notana.raster import from_png_bytes, png_bytes
from notana.store import WorkspaceStore
from notana.templates import (
    DECOMPOSE_TEMPLATE_ID,
    INTERPRET_TEMPLATE_ID,
    load_template,
)
from notana.timeline import build_timeline, keyframe_schedule
from notana.intent import parse_interpretation
from notana.pipeline import assign_tag_colors, infer_decomposition

PORT = 8797
BASE = f"http://127.0.0.1:{PORT}"


def check(label: str, ok: bool) -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {label}")
    if not ok:
        sys.exit(1)


def record_cassettes(tape_dir: Path) -> None:
    """Precompute the run scene's backend traffic and record it."""
    scene = SCENES["run"]
    cassette = Cassette(tape_dir)

    with tempfile.TemporaryDirectory() as tmp:
        store = WorkspaceStore(tmp, clock=lambda: "t")
        workspace = store.create(base_image=scene.drawing(), workspace_id="probe")
        workspace = replace(workspace, notation_layer=scene.notations())
        grounded = png_bytes(grounded_canvas(workspace))

        interpret_prompt = load_template(INTERPRET_TEMPLATE_ID)
        cassette.write(request_digest(grounded, interpret_prompt),
                       scene.interpretation_reply.encode())

        result = assign_tag_colors(parse_interpretation(scene.interpretation_reply))
        interpretation_json = json.dumps(result.to_wire(), indent=2, sort_keys=True)
        decompose_prompt = load_template(DECOMPOSE_TEMPLATE_ID).replace(
            "{interpretation_json}", interpretation_json)
        cassette.write(request_digest(grounded, decompose_prompt),
                       scene.decomposition_reply.encode())

        # image chain: frame i conditions on frame i-1's stamped output
        class Recorder:
            def __init__(self):
                self.inner = StampImageBackend()

            def generate(self, image, prompt):
                out = self.inner.generate(image, prompt)
                cassette.write(request_digest(png_bytes(image), prompt), png_bytes(out))
                return out

        decomposition = infer_decomposition(
            workspace, result,
            type("R", (), {"interpret": staticmethod(
                lambda img, p: scene.decomposition_reply)})())
        timeline = build_timeline(result, decomposition)
        prompts = synthesize_frame_prompts(result, timeline, keyframe_schedule(timeline))
        recorder = Recorder()
        current = workspace.drawing_layer
        for prompt in prompts:
            current = recorder.generate(current, prompt.text)


def main() -> None:
    scene = SCENES["run"]
    with tempfile.TemporaryDirectory() as tmp:
        tape = Path(tmp) / "cassettes"
        record_cassettes(tape)
        config = Path(tmp) / "backends.json"
        config.write_text(json.dumps({
            "interpreter": {"mode": "replay", "cassette_dir": str(tape)},
            "image": {"mode": "replay", "cassette_dir": str(tape)},
        }))
        server = subprocess.Popen(
            [sys.executable, "-m", "notana.cli", "serve", "--port", str(PORT),
             "--data-dir", str(Path(tmp) / "data"),
             "--backend-config", str(config)],
            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        try:
            client = httpx.Client(base_url=BASE, timeout=10)
            for _ in range(100):
                try:
                    if client.get("/health").status_code == 200:
                        break
                except httpx.TransportError:
                    time.sleep(0.1)
            else:
                check("server came up", False)
            check("health is ok", client.get("/health").json()["status"] == "ok")

            wid = client.post("/workspaces",
                              content=png_bytes(scene.drawing())).json()["id"]
            check("workspace created", bool(wid))
            response = client.put(f"/workspaces/{wid}/layers/notation",
                                  content=png_bytes(scene.notations()),
                                  headers={"Content-Type": "image/png"})
            check("notation layer uploaded", response.status_code == 204)

            result = client.post(f"/workspaces/{wid}/infer")
            check("infer over replay cassettes", result.status_code == 200)
            units = [u["id"] for u in result.json()["units"]]
            check("units are body_run and hair_drag",
                  units == ["body_run", "hair_drag"])
            manifest = client.get(f"/workspaces/{wid}").json()
            check("timeline has 7 tracks", len(manifest["timeline"]["tracks"]) == 7)

            generated = client.post(f"/workspaces/{wid}/generate")
            check("generate streams SSE",
                  generated.headers["content-type"].startswith("text/event-stream"))
            check("stream ends with done event", "event: done" in generated.text)
            frames = json.loads(generated.text.strip().split("\n")[-1][len("data: "):])
            check("two frames generated", len(frames["frames"]) == 2)

            png = client.get(f"/workspaces/{wid}/frames/1")
            check("frame PNG served", png.content.startswith(b"\x89PNG"))
            decoded = from_png_bytes(png.content)
            from notana.backends import read_stamps
            check("frame 1 carries two chained stamps", len(read_stamps(decoded)) == 2)

            onion = client.get(f"/workspaces/{wid}/onion", params={"frames": "0,1"})
            check("onion composite served", onion.status_code == 200)

            snapshot = client.post(f"/workspaces/{wid}/save").json()
            history = client.get(f"/workspaces/{wid}/history").json()
            check("snapshot appears in history",
                  history[0]["snapshot_id"] == snapshot["snapshot_id"])

            conflict = client.post(f"/workspaces/{wid}/units/ghost/edits",
                                   json={"target": "x"})
            check("unknown unit is 404 with code",
                  conflict.status_code == 404 and conflict.json()["code"] == "unknown_unit")

            repo = Path(__file__).resolve().parent.parent
            smoke = repo / "frontend" / "scripts" / "smoke-real-server.mjs"
            if (repo / "frontend" / "dist" / "api.js").exists():
                drawing_png = Path(tmp) / "drawing.png"
                notation_png = Path(tmp) / "notation.png"
                drawing_png.write_bytes(png_bytes(scene.drawing()))
                notation_png.write_bytes(png_bytes(scene.notations()))
                node = subprocess.run(
                    ["node", str(smoke), BASE, str(drawing_png), str(notation_png)],
                    capture_output=True, text=True)
                sys.stdout.write(node.stdout)
                check("frontend client drives the real server", node.returncode == 0)
            else:
                print("SKIP: frontend/dist not built (run `npm run build` in frontend/)")
            print("ALL CHECKS PASSED")
        finally:
            server.terminate()
            server.wait(timeout=10)


if __name__ == "__main__":
    main()
