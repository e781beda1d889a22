"""Small builders shared across test modules."""

from __future__ import annotations

from notana.intent.types import (
    AnimationUnit,
    DimensionSlider,
    InterpretationResult,
    PrimaryTriplet,
    RoiBBox,
)


def make_slider(slider_id: str = "s1", kind: str = "amplitude",
                value: float = 1.0, label: str = "reach") -> DimensionSlider:
    return DimensionSlider(id=slider_id, label=label, kind=kind,
                           min=0.5, max=1.5, value=value)


def make_unit(unit_id: str, order: int | None = None, color: str | None = None,
              summary: str | None = None, source: str = "subject",
              sliders: tuple[DimensionSlider, ...] | None = None) -> AnimationUnit:
    return AnimationUnit(
        id=unit_id,
        tag_color=color,
        roi=RoiBBox(0, 0, 10, 10),
        primary=PrimaryTriplet(source=source, path="moves right"),
        confidence=0.9,
        summary=summary or f"{unit_id} moves to the right.",
        sliders=sliders or (make_slider(),),
        temporal_order=order,
    )


def make_result(*units: AnimationUnit, global_timeline: tuple[str, ...] = ()
                ) -> InterpretationResult:
    return InterpretationResult(units=tuple(units), global_timeline=global_timeline)
