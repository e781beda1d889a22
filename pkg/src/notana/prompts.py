"""Deterministic frame-prompt assembly.

Each keyframe slot gets a natural-language prompt assembled from a fixed
template with three sections: the global scene state (every unit's summary
with its motion progress at that instant), the local movements (the blocks
active at the marker), and magnitude clauses for sliders the user moved off
neutral. Byte-identical inputs produce byte-identical prompts; an optional
model-polish pass lives in the pipeline, not here.
"""

from __future__ import annotations

from dataclasses import dataclass

from .digest import digest_of
from .errors import DanglingReference
from .intent.types import AnimationUnit, InterpretationResult
from .templates import FRAME_PROMPT_TEMPLATE_ID, load_template
from .timeline import ScheduleEntry, Timeline


@dataclass(frozen=True)
class FramePrompt:
    marker_id: str
    index: int
    text: str
    inputs_digest: str


def unit_progress(unit_id: str, timeline: Timeline, time: float) -> float:
    """Fraction of the unit's timeline span elapsed at ``time``, in [0, 1]."""
    track_ids = {t.id for t in timeline.tracks if t.unit_id == unit_id}
    blocks = [b for b in timeline.blocks if b.track_id in track_ids]
    if not blocks:
        return 1.0
    start = min(b.start for b in blocks)
    end = max(b.end for b in blocks)
    if end <= start:
        return 1.0 if time >= start else 0.0
    return min(max((time - start) / (end - start), 0.0), 1.0)


def _slider_clauses(units: tuple[AnimationUnit, ...]) -> list[str]:
    clauses = []
    for unit in units:
        for slider in unit.sliders:
            if slider.value != slider.default:
                clauses.append(
                    f"exaggerate {slider.label} to {slider.value:g}× "
                    f"of the default extent")
    return clauses


def synthesize_frame_prompts(result: InterpretationResult, timeline: Timeline,
                             schedule: list[ScheduleEntry]) -> list[FramePrompt]:
    """One prompt per schedule entry, index-ordered, fully deterministic."""
    template = load_template(FRAME_PROMPT_TEMPLATE_ID)
    unit_ids = {u.id for u in result.units}
    for track in timeline.tracks:
        if track.unit_id not in unit_ids:
            raise DanglingReference(f"track {track.id} references unknown unit {track.unit_id}")

    prompts = []
    for index, slot in enumerate(schedule):
        global_lines = []
        for unit in result.units:
            progress = unit_progress(unit.id, timeline, slot.time)
            global_lines.append(f"- {unit.summary} (motion {progress:.0%} complete)")
        local_lines = []
        for block in slot.active_blocks:
            line = f"- {block.label}"
            if block.description:
                line += f": {block.description}"
            local_lines.append(line)

        clauses = _slider_clauses(result.units)
        slider_section = ""
        if clauses:
            slider_section = "Motion range adjustments:\n" + "\n".join(
                f"- {c}" for c in clauses)

        text = template.format(
            global_state="\n".join(global_lines) if global_lines else "- static scene",
            local_movements="\n".join(local_lines) if local_lines else "- hold the pose",
            slider_clauses=slider_section,
        ).rstrip() + "\n"

        inputs_digest = digest_of({
            "units": [u.to_wire() for u in result.units],
            "marker": {"id": slot.marker_id, "time": slot.time},
            "active_blocks": [b.to_wire() for b in slot.active_blocks],
        })
        prompts.append(FramePrompt(marker_id=slot.marker_id, index=index,
                                   text=text, inputs_digest=inputs_digest))
    return prompts
