"""Progressive keyframe generation.

Frames are generated strictly in sequence: frame i is conditioned on frame
i-1's image (frame 0 on the base drawing) plus its own prompt, which is what
keeps consecutive keyframes temporally coherent. Regenerating a frame
invalidates everything downstream of it, because those frames were
conditioned on the replaced image.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable

from PIL import Image

from .errors import (
    BackendUnavailable,
    FrameNotReady,
    GenerationRejected,
    NotanaError,
    ParentNotReady,
)
from .prompts import FramePrompt
from .raster import alpha_over, scale_alpha

PENDING = "pending"
GENERATING = "generating"
DONE = "done"
FAILED = "failed"


@dataclass(frozen=True)
class FrameRecord:
    frame_id: str
    marker_id: str
    index: int
    status: str = PENDING
    image: Image.Image | None = None
    prompt_digest: str = ""
    parent_frame_id: str | None = None

    def __post_init__(self) -> None:
        if self.status not in (PENDING, GENERATING, DONE, FAILED):
            raise ValueError(f"bad frame status {self.status!r}")
        if self.status == DONE and self.image is None:
            raise ValueError("done frame has no image")

    def to_wire(self) -> dict[str, Any]:
        return {
            "frame_id": self.frame_id,
            "marker_id": self.marker_id,
            "index": self.index,
            "status": self.status,
            "prompt_digest": self.prompt_digest,
            "parent_frame_id": self.parent_frame_id,
            "has_image": self.image is not None,
        }


def pending_records(prompts: list[FramePrompt]) -> list[FrameRecord]:
    """Fresh pending records for a prompt list, parent links prewired."""
    return [
        FrameRecord(
            frame_id=f"f{p.index}",
            marker_id=p.marker_id,
            index=p.index,
            prompt_digest=p.inputs_digest,
            parent_frame_id=f"f{p.index - 1}" if p.index > 0 else None,
        )
        for p in prompts
    ]


def _run_one(backend, source: Image.Image, prompt: FramePrompt,
             record: FrameRecord) -> FrameRecord:
    try:
        image = backend.generate(source, prompt.text)
    except NotanaError:
        raise
    except ValueError as exc:
        raise GenerationRejected(prompt.index, str(exc)) from exc
    return replace(record, status=DONE, image=image)


def generate_frames(base: Image.Image, prompts: list[FramePrompt], backend,
                    on_frame: Callable[[FrameRecord], None] | None = None,
                    cancel_check: Callable[[], bool] | None = None,
                    ) -> list[FrameRecord]:
    """Generate every frame in sequence, conditioning each on its parent.

    On a backend failure at index i the failing frame is marked failed,
    later frames stay pending, and BackendUnavailable(index=i) is raised
    with the partial records attached. ``on_frame`` sees each record as its
    status settles, so callers can stream progress.
    """
    if not prompts:
        raise ValueError("prompt list is empty")
    if [p.index for p in prompts] != list(range(len(prompts))):
        raise ValueError("prompts must be index-ordered from 0")

    records = pending_records(prompts)
    source = base
    for i, prompt in enumerate(prompts):
        if cancel_check is not None and cancel_check():
            break
        records[i] = replace(records[i], status=GENERATING)
        if on_frame:
            on_frame(records[i])
        try:
            records[i] = _run_one(backend, source, prompt, records[i])
        except GenerationRejected:
            records[i] = replace(records[i], status=FAILED)
            if on_frame:
                on_frame(records[i])
            raise
        except NotanaError as exc:
            records[i] = replace(records[i], status=FAILED)
            if on_frame:
                on_frame(records[i])
            raise BackendUnavailable(f"image backend failed at frame {i}: {exc}",
                                     index=i, records=records) from exc
        if on_frame:
            on_frame(records[i])
        source = records[i].image
    return records


def regenerate_frame(base: Image.Image, records: list[FrameRecord],
                     prompts: list[FramePrompt], index: int, backend,
                     on_frame: Callable[[FrameRecord], None] | None = None,
                     ) -> list[FrameRecord]:
    """Regenerate one frame from its parent and invalidate everything after.

    Downstream frames reset to pending with their prompts preserved; frames
    before ``index`` are never touched.
    """
    if not 0 <= index < len(records):
        raise ValueError(f"index {index} out of range")
    if index > 0 and records[index - 1].status != DONE:
        raise ParentNotReady(f"frame {index - 1} is {records[index - 1].status}")

    out = list(records)
    for i in range(index + 1, len(out)):
        out[i] = replace(out[i], status=PENDING, image=None)
    source = base if index == 0 else out[index - 1].image
    out[index] = replace(out[index], status=GENERATING, image=None)
    if on_frame:
        on_frame(out[index])
    try:
        out[index] = _run_one(backend, source, prompts[index], out[index])
    except NotanaError as exc:
        out[index] = replace(out[index], status=FAILED)
        if on_frame:
            on_frame(out[index])
        if isinstance(exc, GenerationRejected):
            raise
        raise BackendUnavailable(f"image backend failed at frame {index}: {exc}",
                                 index=index, records=out) from exc
    if on_frame:
        on_frame(out[index])
    return out


def default_opacity_ramp(count: int) -> list[float]:
    # oldest most transparent, newest most opaque
    if count <= 0:
        return []
    if count == 1:
        return [0.8]
    return [round(0.2 + 0.6 * i / (count - 1), 4) for i in range(count)]


def onion_skin(base: Image.Image, frames: list[FrameRecord],
               opacity_ramp: list[float] | None = None) -> Image.Image:
    """Overlay selected frames on the base at ramped opacities."""
    for frame in frames:
        if frame.status != DONE or frame.image is None:
            raise FrameNotReady(f"frame {frame.frame_id} is {frame.status}")
    ramp = default_opacity_ramp(len(frames)) if opacity_ramp is None else list(opacity_ramp)
    if len(ramp) != len(frames):
        raise ValueError(f"ramp has {len(ramp)} opacities for {len(frames)} frames")
    out = base
    for frame, opacity in zip(frames, ramp):
        opacity = min(max(opacity, 0.0), 1.0)
        out = alpha_over(out, scale_alpha(frame.image, opacity))
    return out
