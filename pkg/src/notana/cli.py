"""Command-line interface: serve, infer, generate, demo."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .backends import (
    BackendConfig,
    ScriptedInterpreter,
    StampImageBackend,
    make_image_backend,
    make_interpreter,
)
from .demo import run_scene
from .errors import NotanaError
from .generation import generate_frames
from .intent import serialize_result
from .pipeline import infer_motions
from .prompts import synthesize_frame_prompts
from .raster import load_png
from .service import ERROR_CODES, create_app
from .store import WorkspaceStore
from .timeline import build_timeline, keyframe_schedule, mark_generated

EMPTY_REPLY = ('{"units": [], "unassigned_marks": [], "global_timeline": [],'
               ' "legend_inferred": []}')


def _error_code(exc: BaseException) -> str:
    for klass, (name, _) in ERROR_CODES.items():
        if isinstance(exc, klass):
            return name
    return "validation_error" if isinstance(exc, ValueError) else "internal_error"


def _fail(exc: Exception) -> None:
    body = {"code": _error_code(exc), "message": str(exc)}
    cause = exc.__cause__
    while cause is not None:  # surface the root backend error (e.g. cassette_miss)
        body["cause"] = _error_code(cause)
        cause = cause.__cause__
    click.echo(json.dumps(body), err=True)
    sys.exit(1)


def _load_backend_config(path: str | None, kind: str, mode: str) -> BackendConfig:
    data = {}
    if path:
        data = json.loads(Path(path).read_text()).get(kind, {})
    if mode != "live":
        data["mode"] = "replay"
    return BackendConfig.from_dict(kind, data)


def _interpreter_for(backend: str, config_path: str | None, mock_reply: str | None):
    if backend == "mock":
        reply = Path(mock_reply).read_text() if mock_reply else EMPTY_REPLY
        return ScriptedInterpreter(router=lambda image, prompt: reply)
    return make_interpreter(_load_backend_config(config_path, "interpreter", backend))


def _image_backend_for(backend: str, config_path: str | None):
    if backend == "mock":
        return StampImageBackend()
    return make_image_backend(_load_backend_config(config_path, "image", backend))


@click.group()
def main() -> None:
    """Notation-driven animation authoring engine."""


@main.command()
@click.option("--port", default=8787, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--data-dir", default="./notana-data", show_default=True)
@click.option("--backend-config", type=click.Path(exists=True), default=None,
              help="JSON file with interpreter/image backend settings.")
def serve(port: int, host: str, data_dir: str, backend_config: str | None) -> None:
    """Run the HTTP service."""
    try:
        import uvicorn
    except ImportError as exc:
        _fail(RuntimeError(f"uvicorn is required for serve: {exc}"))
        return
    interpreter = image_backend = None
    if backend_config:
        config = json.loads(Path(backend_config).read_text())
        if "interpreter" in config:
            interpreter = make_interpreter(
                BackendConfig.from_dict("interpreter", config["interpreter"]))
        if "image" in config:
            image_backend = make_image_backend(
                BackendConfig.from_dict("image", config["image"]))
    app = create_app(WorkspaceStore(data_dir), interpreter, image_backend)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--drawing", type=click.Path(exists=True), required=True)
@click.option("--notations", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", default="result.json", show_default=True)
@click.option("--backend", type=click.Choice(["mock", "replay", "live"]), default="mock",
              show_default=True)
@click.option("--backend-config", type=click.Path(exists=True), default=None)
@click.option("--mock-reply", type=click.Path(exists=True), default=None,
              help="Reply text the mock interpreter returns.")
def infer(drawing: str, notations: str | None, out_path: str, backend: str,
          backend_config: str | None, mock_reply: str | None) -> None:
    """Interpret a notated drawing into a structured result."""
    try:
        import tempfile

        from dataclasses import replace

        from .raster import blank

        drawing_img = load_png(drawing)
        notation_img = (load_png(notations) if notations
                        else blank(*drawing_img.size))
        with tempfile.TemporaryDirectory() as tmp:
            store = WorkspaceStore(tmp)
            workspace = store.create(base_image=drawing_img, workspace_id="cli-infer")
            workspace = replace(workspace, notation_layer=notation_img)
            interpreter = _interpreter_for(backend, backend_config, mock_reply)
            result = infer_motions(workspace, interpreter)
        Path(out_path).write_text(serialize_result(result, indent=2) + "\n")
        click.echo(json.dumps({"units": len(result.units), "out": out_path}))
    except (NotanaError, ValueError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--workspace-dir", type=click.Path(exists=True), required=True,
              help="A workspace directory created by the service or demo.")
@click.option("--frames", "max_frames", type=int, default=None,
              help="Cap the number of frames to generate.")
@click.option("--backend", type=click.Choice(["mock", "replay", "live"]), default="mock",
              show_default=True)
@click.option("--backend-config", type=click.Path(exists=True), default=None)
def generate(workspace_dir: str, max_frames: int | None, backend: str,
             backend_config: str | None) -> None:
    """Fill a workspace's keyframe placeholders by progressive generation."""
    try:
        from dataclasses import replace

        directory = Path(workspace_dir)
        store = WorkspaceStore(directory.parent)
        workspace = store.read(directory.name)
        if workspace.interpretation is None:
            raise NotanaError("workspace has no interpretation; run infer first")
        timeline = workspace.timeline
        if timeline is None:
            timeline = build_timeline(workspace.interpretation, workspace.decomposition)
        schedule = keyframe_schedule(timeline)
        if max_frames is not None:
            schedule = schedule[:max_frames]
        if not schedule:
            click.echo(json.dumps({"frames": 0, "workspace": directory.name,
                                   "note": "no empty keyframe placeholders"}))
            return
        prompts = synthesize_frame_prompts(workspace.interpretation, timeline, schedule)
        image_backend = _image_backend_for(backend, backend_config)
        records = generate_frames(workspace.drawing_layer, prompts, image_backend)
        for record in records:
            if record.status == "done":
                timeline = mark_generated(timeline, record.marker_id, record.frame_id)
        store.write(replace(workspace, timeline=timeline, frames=tuple(records)))
        click.echo(json.dumps({"frames": len(records), "workspace": directory.name}))
    except (NotanaError, ValueError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--example", type=click.Choice(["run", "cubes", "splash"]), required=True)
@click.option("--out", "out_dir", default=None,
              help="Output directory (default: ./demo-<example>).")
def demo(example: str, out_dir: str | None) -> None:
    """Run a built-in scene end to end with mock backends (offline)."""
    try:
        summary = run_scene(example, out_dir or f"demo-{example}")
        click.echo(json.dumps(summary, indent=2))
    except (NotanaError, ValueError, OSError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
