"""Interpretation pipeline: canvas composite -> grid -> backend -> validated result.

The notated canvas is composited (notation layer over drawing layer), the
grounding grid is overlaid, and the interpreter backend is asked for the
structured JSON interpretation. Malformed replies are retried with a repair
hint before giving up; user-asserted fields survive re-inference verbatim,
with the pipeline restoring them if the backend disagrees.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace

from PIL import Image

from .errors import (
    AuthMissing,
    BackendTimeout,
    BackendUnavailable,
    CassetteMiss,
    DuplicateUnitId,
    InterpretationInvalid,
    NoJsonFound,
    NothingPinned,
    SchemaViolation,
    TransportError,
    UnknownUnitInDecomposition,
)
from .grid import GridSpec, GridStyle, overlay_grid
from .intent import InterpretationResult, parse_interpretation, pinned_assertions
from .intent.parse import extract_json_object
from .raster import alpha_over
from .store import Workspace
from .templates import (
    DECOMPOSE_TEMPLATE_ID,
    INTERPRET_TEMPLATE_ID,
    REINFER_SUFFIX_TEMPLATE_ID,
    load_template,
)
from .timeline import DecompositionEntry

logger = logging.getLogger(__name__)

MAX_REPAIR_RETRIES = 2
REPAIR_HINT = ("Your previous reply was not a single valid JSON object; "
               "return only the JSON")

# categorical cycle used when the backend omits a unit color
TAG_PALETTE = (
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff",
)

_TRANSPORT_ERRORS = (TransportError, BackendTimeout, AuthMissing, CassetteMiss)


@dataclass(frozen=True)
class InferenceJob:
    """One interpreter invocation with its composed image and prompt."""

    workspace_id: str
    composite_image: Image.Image
    prompt_template_id: str
    attempt: int = 1
    pinned_edits: tuple[tuple[str, str, str], ...] = ()

    def __post_init__(self) -> None:
        if self.attempt > MAX_REPAIR_RETRIES + 1:
            raise ValueError(f"attempt {self.attempt} exceeds retry budget")


def compose_canvas(drawing: Image.Image, notations: Image.Image) -> Image.Image:
    """Alpha-composite the notation layer over the drawing layer."""
    return alpha_over(drawing, notations)


def grounded_canvas(workspace: Workspace, style: GridStyle = GridStyle()) -> Image.Image:
    composite = compose_canvas(workspace.drawing_layer, workspace.notation_layer)
    spec = GridSpec(image_width_px=composite.width, image_height_px=composite.height)
    return overlay_grid(composite, spec, style)


def assign_tag_colors(result: InterpretationResult) -> InterpretationResult:
    """Fill missing unit colors from the palette, keeping them distinct."""
    used = {u.tag_color for u in result.units if u.tag_color is not None}
    cycle = (c for c in TAG_PALETTE if c not in used)
    units = []
    for index, unit in enumerate(result.units):
        if unit.tag_color is None:
            color = next(cycle, None) or f"#{(index * 2654435761) % 0xFFFFFF:06x}"
            unit = replace(unit, tag_color=color)
        units.append(unit)
    return replace(result, units=tuple(units))


def _interpret_with_repair(interpreter, job: InferenceJob, prompt: str,
                           parse):
    """Call the backend, retrying malformed replies with a repair hint."""
    violations: list[str] = []
    raw = ""
    attempt_prompt = prompt
    for attempt in range(MAX_REPAIR_RETRIES + 1):
        job = replace(job, attempt=attempt + 1)
        try:
            raw = interpreter.interpret(job.composite_image, attempt_prompt)
        except _TRANSPORT_ERRORS as exc:
            raise BackendUnavailable(f"interpreter backend failed: {exc}") from exc
        try:
            return parse(raw)
        except (NoJsonFound, SchemaViolation, DuplicateUnitId) as exc:
            violations.append(f"attempt {attempt + 1}: {exc}")
            logger.debug("reply invalid (%s), retrying with repair hint", exc)
            attempt_prompt = f"{prompt}\n\n{REPAIR_HINT}"
    raise InterpretationInvalid(raw, violations)


def infer_motions(workspace: Workspace, interpreter,
                  template_id: str = INTERPRET_TEMPLATE_ID) -> InterpretationResult:
    """Run the full interpretation pass over a workspace's canvas.

    The drawing (or uploaded image) plus notations are composited, grid
    overlaid, and sent with the default prompt. Every returned unit ends up
    with a distinct tag color even when the backend omits one.
    """
    image = grounded_canvas(workspace)
    job = InferenceJob(workspace_id=workspace.id, composite_image=image,
                       prompt_template_id=template_id)
    prompt = load_template(template_id)
    result = _interpret_with_repair(interpreter, job, prompt, parse_interpretation)
    return assign_tag_colors(result)


def _pinned_block(pins: list[tuple[str, str, str]]) -> str:
    return "\n".join(
        f"The user asserts: unit {uid} {fld} = {value}; do not contradict."
        for uid, fld, value in pins
    )


def _enforce_pins(parsed: InterpretationResult, previous: InterpretationResult,
                  pins: list[tuple[str, str, str]]) -> InterpretationResult:
    units = list(parsed.units)
    by_id = {u.id: i for i, u in enumerate(units)}
    for uid, fld, value in pins:
        original = previous.unit(uid)
        if uid not in by_id:
            # backend dropped a pinned unit entirely; restore it
            units.append(replace(original, pin_enforced=True))
            by_id[uid] = len(units) - 1
            continue
        unit = units[by_id[uid]]
        current = unit.summary if fld == "summary" else getattr(unit.primary, fld)
        pinned_flags = tuple(sorted(set(unit.edited_fields) | {fld}))
        if current != value:
            if fld == "summary":
                unit = replace(unit, summary=value, pin_enforced=True)
            else:
                unit = replace(unit, primary=replace(unit.primary, **{fld: value}),
                               pin_enforced=True)
        unit = replace(unit, edited_fields=pinned_flags)
        units[by_id[uid]] = unit
    # ids stay stable across re-inference, so previous colors persist
    units = [
        replace(u, tag_color=previous.unit(u.id).tag_color)
        if previous.unit(u.id) is not None and previous.unit(u.id).tag_color is not None
        else u
        for u in units
    ]
    seen: set[str] = set()
    deduped = []
    for unit in units:
        if unit.tag_color is not None and unit.tag_color in seen:
            unit = replace(unit, tag_color=None)
        if unit.tag_color is not None:
            seen.add(unit.tag_color)
        deduped.append(unit)
    return assign_tag_colors(replace(parsed, units=tuple(deduped)))


def reinfer_with_edits(workspace: Workspace, edited_result: InterpretationResult,
                       interpreter) -> InterpretationResult:
    """Re-infer with the user's edits pinned as ground truth.

    Pinned fields survive whatever the backend replies: a contradicting
    value is overwritten back and the unit is marked pin-enforced.
    """
    pins = pinned_assertions(edited_result)
    if not pins:
        raise NothingPinned("no unit carries an edit flag")
    image = grounded_canvas(workspace)
    job = InferenceJob(workspace_id=workspace.id, composite_image=image,
                       prompt_template_id=REINFER_SUFFIX_TEMPLATE_ID,
                       pinned_edits=tuple(pins))
    suffix = load_template(REINFER_SUFFIX_TEMPLATE_ID)
    prompt = load_template(INTERPRET_TEMPLATE_ID) + suffix.format(
        pinned_edits_block=_pinned_block(pins))
    parsed = _interpret_with_repair(interpreter, job, prompt, parse_interpretation)
    return _enforce_pins(parsed, edited_result, pins)


def _parse_decomposition(raw: str, known_ids: set[str]) -> tuple[DecompositionEntry, ...]:
    obj = extract_json_object(raw)
    if "decomposition" not in obj:
        raise SchemaViolation("$.decomposition", "missing required key")
    items = obj["decomposition"]
    if not isinstance(items, list):
        raise SchemaViolation("$.decomposition", "expected array")
    entries = []
    for i, item in enumerate(items):
        path = f"$.decomposition[{i}]"
        if not isinstance(item, dict):
            raise SchemaViolation(path, "expected object")
        for key in ("unit_id", "part_name", "verb"):
            if not isinstance(item.get(key), str) or not item.get(key):
                raise SchemaViolation(f"{path}.{key}", "missing or empty")
        if item["unit_id"] not in known_ids:
            raise UnknownUnitInDecomposition(item["unit_id"])
        entries.append(DecompositionEntry(
            unit_id=item["unit_id"],
            part_name=item["part_name"],
            verb=item["verb"],
            description=str(item.get("description", "")),
        ))
    return tuple(entries)


def infer_decomposition(workspace: Workspace, result: InterpretationResult,
                        interpreter) -> tuple[DecompositionEntry, ...]:
    """Ask the interpreter to split each unit into primitive per-part motions."""
    if not result.units:
        return ()
    image = grounded_canvas(workspace)
    job = InferenceJob(workspace_id=workspace.id, composite_image=image,
                       prompt_template_id=DECOMPOSE_TEMPLATE_ID)
    template = load_template(DECOMPOSE_TEMPLATE_ID)
    interpretation_json = json.dumps(result.to_wire(), indent=2, sort_keys=True)
    prompt = template.replace("{interpretation_json}", interpretation_json)
    known = {u.id for u in result.units}
    return _interpret_with_repair(interpreter, job, prompt,
                                  lambda raw: _parse_decomposition(raw, known))
