"""HTTP service exposing the authoring loop.

All endpoints are workspace-scoped; per-workspace mutations are serialized
behind an in-process lock plus the store's advisory file lock. Generation
streams per-frame status over server-sent events and holds a per-workspace
job slot: a second concurrent run gets 409. State-changing endpoints honor
an Idempotency-Key header (same key => same response, no duplicate effects).
"""

from __future__ import annotations

import json
import logging
import queue
import threading
from dataclasses import replace
from typing import Any, Iterator

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from . import errors as err
from .generation import generate_frames, onion_skin, regenerate_frame
from .intent import apply_unit_edit, set_slider
from .pipeline import infer_decomposition, infer_motions, reinfer_with_edits
from .prompts import synthesize_frame_prompts
from .raster import from_png_bytes, png_bytes
from .store import Workspace, WorkspaceStore, _manifest_doc
from .timeline import (
    ScheduleEntry,
    add_block,
    build_timeline,
    delete_block,
    keyframe_schedule,
    mark_generated,
    move_block,
    resize_block,
)

logger = logging.getLogger(__name__)

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

# published machine codes for every error the API can emit
ERROR_CODES: dict[type, tuple[str, int]] = {
    err.NotFound: ("not_found", 404),
    err.UnknownUnit: ("unknown_unit", 404),
    err.UnknownSlider: ("unknown_slider", 404),
    err.UnknownBlock: ("unknown_block", 404),
    err.UnknownTrack: ("unknown_track", 404),
    err.SchemaViolation: ("schema_violation", 400),
    err.EmptyTriplet: ("empty_triplet", 400),
    err.NonPositiveDuration: ("non_positive_duration", 400),
    err.NegativeStart: ("negative_start", 400),
    err.NothingPinned: ("nothing_pinned", 400),
    err.OutOfRange: ("out_of_range", 400),
    err.DimensionMismatch: ("dimension_mismatch", 400),
    err.FrameNotReady: ("frame_not_ready", 400),
    err.ParentNotReady: ("parent_not_ready", 400),
    err.UnknownUnitInDecomposition: ("unknown_unit_in_decomposition", 400),
    err.DuplicateUnitId: ("duplicate_unit_id", 400),
    err.NoJsonFound: ("no_json_found", 502),
    err.InterpretationInvalid: ("interpretation_invalid", 502),
    err.BackendUnavailable: ("backend_unavailable", 502),
    err.BackendTimeout: ("backend_timeout", 502),
    err.AuthMissing: ("auth_missing", 502),
    err.TransportError: ("transport_error", 502),
    err.CassetteMiss: ("cassette_miss", 502),
    err.GenerationRejected: ("generation_rejected", 502),
    err.IntegrityError: ("integrity_error", 409),
    err.StorageFull: ("storage_full", 507),
    err.SerializationError: ("serialization_error", 500),
}


def api_error(code: str, message: str, status: int,
              details: dict[str, Any] | None = None) -> JSONResponse:
    body: dict[str, Any] = {"code": code, "message": message}
    if details:
        body["details"] = details
    return JSONResponse(status_code=status, content=body)


def error_response(exc: Exception) -> JSONResponse:
    for klass, (code, status) in ERROR_CODES.items():
        if isinstance(exc, klass):
            return api_error(code, str(exc), status)
    if isinstance(exc, ValueError):
        return api_error("validation_error", str(exc), 400)
    raise exc


class EditRequest(BaseModel):
    source: str | None = None
    path: str | None = None
    target: str | None = None
    summary: str | None = None


class SliderRequest(BaseModel):
    value: float


class MoveRequest(BaseModel):
    start: float


class ResizeRequest(BaseModel):
    duration: float


class AddBlockRequest(BaseModel):
    track_id: str
    label: str
    start: float
    duration: float
    description: str = ""


class ServiceState:
    def __init__(self, store: WorkspaceStore, interpreter=None, image_backend=None):
        self.store = store
        self.interpreter = interpreter
        self.image_backend = image_backend
        self.mutation_locks: dict[str, threading.Lock] = {}
        self.generation_busy: set[str] = set()
        self.guard = threading.Lock()
        self.idempotency: dict[tuple[str, str, str], tuple[int, bytes, str]] = {}

    def mutation_lock(self, workspace_id: str) -> threading.Lock:
        with self.guard:
            return self.mutation_locks.setdefault(workspace_id, threading.Lock())

    def claim_generation(self, workspace_id: str) -> bool:
        with self.guard:
            if workspace_id in self.generation_busy:
                return False
            self.generation_busy.add(workspace_id)
            return True

    def release_generation(self, workspace_id: str) -> None:
        with self.guard:
            self.generation_busy.discard(workspace_id)


def _require_backend(backend, name: str):
    if backend is None:
        raise err.BackendUnavailable(f"no {name} backend configured")
    return backend


def _sse(event: str, data: Any) -> str:
    return f"event: {event}\ndata: {json.dumps(data, sort_keys=True)}\n\n"


def create_app(store: WorkspaceStore, interpreter=None, image_backend=None) -> FastAPI:
    app = FastAPI(title="notana", version="0.1.0")
    state = ServiceState(store, interpreter, image_backend)
    app.state.service = state

    @app.exception_handler(err.NotanaError)
    def handle_engine_error(request: Request, exc: err.NotanaError):
        return error_response(exc)

    def load_workspace(workspace_id: str) -> Workspace:
        return store.read(workspace_id)

    def persist(workspace: Workspace) -> Workspace:
        workspace = workspace.touched(store.clock)
        store.write(workspace)
        return workspace

    def idempotent(request: Request, workspace_id: str, run) -> Response:
        key = request.headers.get("Idempotency-Key")
        cache_key = (workspace_id, request.url.path, key or "")
        if key is not None and cache_key in state.idempotency:
            status, body, media = state.idempotency[cache_key]
            return Response(content=body, status_code=status, media_type=media)
        response = run()
        if key is not None and response.status_code < 500:
            state.idempotency[cache_key] = (
                response.status_code, bytes(response.body), response.media_type)
        return response

    def result_response(workspace: Workspace) -> JSONResponse:
        wire = workspace.interpretation.to_wire() if workspace.interpretation else None
        return JSONResponse(content=wire)

    # -- workspace lifecycle -------------------------------------------

    @app.post("/workspaces", status_code=201)
    async def create_workspace(request: Request):
        body = await request.body()
        if body.startswith(PNG_MAGIC):
            workspace = store.create(base_image=from_png_bytes(body))
        else:
            params = json.loads(body) if body else {}
            workspace = store.create(int(params.get("width", 480)),
                                     int(params.get("height", 480)))
        return JSONResponse(status_code=201, content={"id": workspace.id})

    @app.get("/workspaces/{workspace_id}")
    def get_workspace(workspace_id: str):
        return JSONResponse(content=_manifest_doc(load_workspace(workspace_id)))

    @app.put("/workspaces/{workspace_id}/layers/{layer}", status_code=204)
    async def put_layer(workspace_id: str, layer: str, request: Request):
        if layer not in ("drawing", "notation"):
            return api_error("validation_error", f"unknown layer {layer!r}", 400)
        body = await request.body()
        if not body.startswith(PNG_MAGIC):
            return api_error("validation_error", "body must be a PNG image", 400)
        image = from_png_bytes(body)
        with state.mutation_lock(workspace_id):
            workspace = load_workspace(workspace_id)
            if image.size != workspace.size:
                return api_error(
                    "dimension_mismatch",
                    f"layer is {image.size}, workspace is {workspace.size}", 400)
            field = "drawing_layer" if layer == "drawing" else "notation_layer"
            persist(replace(workspace, **{field: image}))
        return Response(status_code=204)

    # -- interpretation --------------------------------------------------

    def _interpret_and_build(workspace: Workspace, reinfer: bool) -> Workspace:
        interpreter = _require_backend(state.interpreter, "interpreter")
        if reinfer:
            result = reinfer_with_edits(workspace, workspace.interpretation, interpreter)
        else:
            result = infer_motions(workspace, interpreter)
        decomposition = infer_decomposition(workspace, result, interpreter)
        timeline = build_timeline(result, decomposition)
        return replace(workspace, interpretation=result, decomposition=decomposition,
                       timeline=timeline)

    @app.post("/workspaces/{workspace_id}/infer")
    def infer(workspace_id: str, request: Request):
        def run():
            with state.mutation_lock(workspace_id):
                workspace = _interpret_and_build(load_workspace(workspace_id), reinfer=False)
                return result_response(persist(workspace))
        return idempotent(request, workspace_id, run)

    @app.post("/workspaces/{workspace_id}/reinfer")
    def reinfer(workspace_id: str, request: Request):
        def run():
            with state.mutation_lock(workspace_id):
                workspace = load_workspace(workspace_id)
                if workspace.interpretation is None:
                    return api_error("nothing_pinned", "no interpretation to re-infer", 400)
                workspace = _interpret_and_build(workspace, reinfer=True)
                return result_response(persist(workspace))
        return idempotent(request, workspace_id, run)

    @app.post("/workspaces/{workspace_id}/units/{unit_id}/edits")
    def edit_unit(workspace_id: str, unit_id: str, body: EditRequest, request: Request):
        def run():
            with state.mutation_lock(workspace_id):
                workspace = load_workspace(workspace_id)
                if workspace.interpretation is None:
                    return api_error("not_found", "no interpretation yet", 404)
                edits = {k: getattr(body, k) for k in body.model_fields_set}
                result = apply_unit_edit(workspace.interpretation, unit_id, edits)
                persist(replace(workspace, interpretation=result))
                return JSONResponse(content=result.to_wire())
        return idempotent(request, workspace_id, run)

    @app.patch("/workspaces/{workspace_id}/units/{unit_id}/sliders/{slider_id}")
    def patch_slider(workspace_id: str, unit_id: str, slider_id: str,
                     body: SliderRequest, request: Request):
        def run():
            with state.mutation_lock(workspace_id):
                workspace = load_workspace(workspace_id)
                if workspace.interpretation is None:
                    return api_error("not_found", "no interpretation yet", 404)
                result = set_slider(workspace.interpretation, unit_id, slider_id, body.value)
                persist(replace(workspace, interpretation=result))
                return JSONResponse(content=result.unit(unit_id).to_wire())
        return idempotent(request, workspace_id, run)

    # -- timeline ---------------------------------------------------------

    def _timeline_edit(workspace_id: str, request: Request, apply) -> Response:
        def run():
            with state.mutation_lock(workspace_id):
                workspace = load_workspace(workspace_id)
                if workspace.timeline is None:
                    return api_error("not_found", "no timeline yet", 404)
                timeline = apply(workspace.timeline)
                persist(replace(workspace, timeline=timeline))
                return JSONResponse(content=timeline.to_wire())
        return idempotent(request, workspace_id, run)

    @app.post("/workspaces/{workspace_id}/timeline/blocks/{block_id}:move")
    def move(workspace_id: str, block_id: str, body: MoveRequest, request: Request):
        return _timeline_edit(workspace_id, request,
                              lambda t: move_block(t, block_id, body.start))

    @app.post("/workspaces/{workspace_id}/timeline/blocks/{block_id}:resize")
    def resize(workspace_id: str, block_id: str, body: ResizeRequest, request: Request):
        return _timeline_edit(workspace_id, request,
                              lambda t: resize_block(t, block_id, body.duration))

    @app.post("/workspaces/{workspace_id}/timeline/blocks/{block_id}:delete")
    def delete(workspace_id: str, block_id: str, request: Request):
        return _timeline_edit(workspace_id, request,
                              lambda t: delete_block(t, block_id))

    @app.post("/workspaces/{workspace_id}/timeline/blocks")
    def add(workspace_id: str, body: AddBlockRequest, request: Request):
        return _timeline_edit(
            workspace_id, request,
            lambda t: add_block(t, body.track_id, body.label, body.start,
                                body.duration, body.description))

    # -- generation -------------------------------------------------------

    def _generation_stream(workspace_id: str) -> Iterator[str]:
        try:
            with state.mutation_lock(workspace_id):
                workspace = load_workspace(workspace_id)
                backend = _require_backend(state.image_backend, "image")
                if workspace.interpretation is None or workspace.timeline is None:
                    yield _sse("error", {"code": "not_found",
                                         "message": "infer before generating"})
                    return
                schedule = keyframe_schedule(workspace.timeline)
                prompts = synthesize_frame_prompts(
                    workspace.interpretation, workspace.timeline, schedule)
                if not prompts:
                    yield _sse("done", {"frames": []})
                    return

                # frames stream as soon as the worker publishes them
                events: queue.Queue = queue.Queue()

                def worker():
                    try:
                        records = generate_frames(
                            workspace.drawing_layer, prompts, backend,
                            on_frame=lambda r: events.put(("frame", r)))
                        events.put(("finished", records))
                    except err.BackendUnavailable as exc:
                        events.put(("failed", exc))
                    except err.NotanaError as exc:
                        events.put(("failed", err.BackendUnavailable(str(exc), records=[])))

                thread = threading.Thread(target=worker, daemon=True)
                thread.start()
                records: list = []
                failure: dict[str, Any] | None = None
                while True:
                    kind, payload = events.get()
                    if kind == "frame":
                        yield _sse("frame", payload.to_wire())
                        continue
                    if kind == "finished":
                        records = payload
                    else:
                        records = payload.records or []
                        failure = {"code": "backend_unavailable", "message": str(payload)}
                    break
                thread.join()

                timeline = workspace.timeline
                for record in records:
                    if record.status == "done":
                        timeline = mark_generated(timeline, record.marker_id,
                                                  record.frame_id)
                persist(replace(workspace, frames=tuple(records), timeline=timeline))
                if failure is not None:
                    yield _sse("error", failure)
                else:
                    yield _sse("done", {"frames": [r.to_wire() for r in records]})
        finally:
            state.release_generation(workspace_id)

    @app.post("/workspaces/{workspace_id}/generate")
    def generate(workspace_id: str, request: Request):
        if not store.exists(workspace_id):
            raise err.NotFound(f"workspace {workspace_id!r}")
        workspace = load_workspace(workspace_id)
        if workspace.interpretation is None or workspace.timeline is None:
            return api_error("validation_error", "infer before generating", 400)
        key = request.headers.get("Idempotency-Key")
        cache_key = (workspace_id, request.url.path, key or "")
        if key is not None and cache_key in state.idempotency:
            _, body, _ = state.idempotency[cache_key]
            return Response(content=body, media_type="text/event-stream")
        if not state.claim_generation(workspace_id):
            return api_error("generation_in_progress",
                             "another generation run is active", 409)

        def stream():
            chunks = []
            for chunk in _generation_stream(workspace_id):
                chunks.append(chunk)
                yield chunk
            if key is not None:
                state.idempotency[cache_key] = (200, "".join(chunks).encode(),
                                                "text/event-stream")

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/workspaces/{workspace_id}/frames/{index}/regenerate")
    def regenerate(workspace_id: str, index: int, request: Request):
        def run():
            with state.mutation_lock(workspace_id):
                workspace = load_workspace(workspace_id)
                backend = _require_backend(state.image_backend, "image")
                if not workspace.frames:
                    return api_error("not_found", "no frames generated yet", 404)
                schedule = keyframe_schedule(workspace.timeline)
                # regeneration slots include markers already marked generated
                prompts = synthesize_frame_prompts(
                    workspace.interpretation, workspace.timeline, schedule)
                by_marker = {p.marker_id: p for p in prompts}
                frame_prompts = []
                for record in workspace.frames:
                    prompt = by_marker.get(record.marker_id)
                    if prompt is None:
                        prompt = _prompt_for_generated_marker(workspace, record)
                    frame_prompts.append(replace(prompt, index=record.index))
                records = regenerate_frame(workspace.drawing_layer,
                                           list(workspace.frames), frame_prompts,
                                           index, backend)
                persist(replace(workspace, frames=tuple(records)))
                return JSONResponse(content=[r.to_wire() for r in records])
        return idempotent(request, workspace_id, run)

    def _prompt_for_generated_marker(workspace: Workspace, record):
        # markers flip to generated after a run; rebuild their prompt slots
        marker = next(m for m in workspace.timeline.markers if m.id == record.marker_id)
        active = tuple(b for b in workspace.timeline.blocks
                       if b.start <= marker.time <= b.end)
        slot = ScheduleEntry(time=marker.time, marker_id=marker.id, active_blocks=active)
        return synthesize_frame_prompts(workspace.interpretation, workspace.timeline,
                                        [slot])[0]

    @app.get("/workspaces/{workspace_id}/frames/{index}")
    def get_frame(workspace_id: str, index: int):
        workspace = load_workspace(workspace_id)
        frame = next((f for f in workspace.frames if f.index == index), None)
        if frame is None or frame.image is None:
            raise err.NotFound(f"frame {index} has no image")
        return Response(content=png_bytes(frame.image), media_type="image/png")

    @app.get("/workspaces/{workspace_id}/onion")
    def onion(workspace_id: str, frames: str = Query("")):
        workspace = load_workspace(workspace_id)
        indices = [int(i) for i in frames.split(",") if i != ""]
        by_index = {f.index: f for f in workspace.frames}
        missing = [i for i in indices if i not in by_index]
        if missing:
            raise err.NotFound(f"frames {missing} do not exist")
        selected = [by_index[i] for i in indices]
        composite = onion_skin(workspace.drawing_layer, selected)
        return Response(content=png_bytes(composite), media_type="image/png")

    # -- history ----------------------------------------------------------

    @app.post("/workspaces/{workspace_id}/save")
    def save(workspace_id: str, request: Request):
        def run():
            with state.mutation_lock(workspace_id):
                snapshot = store.save_snapshot(load_workspace(workspace_id))
                return JSONResponse(content=snapshot.to_wire())
        return idempotent(request, workspace_id, run)

    @app.get("/workspaces/{workspace_id}/history")
    def history(workspace_id: str):
        if not store.exists(workspace_id):
            raise err.NotFound(f"workspace {workspace_id!r}")
        return JSONResponse(content=[s.to_wire() for s in store.list_history(workspace_id)])

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "backends": {
                "interpreter": "ok" if state.interpreter is not None else "unconfigured",
                "image": "ok" if state.image_backend is not None else "unconfigured",
            },
        }

    return app
