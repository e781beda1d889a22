"""Core animation-intent types.

A backend reply is validated into an :class:`InterpretationResult`: a list of
animation units, each carrying a <source, path, target> triplet, secondary
modifiers, an ROI on the grounding grid, a confidence score, and 1-3
adjustment sliders. All types are immutable values; editing operations live
in :mod:`notana.intent.ops` and return new values.

Unknown wire keys are kept in per-object ``extras`` dicts so a parsed result
serializes back without data loss.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

MODIFIER_PROPERTIES = ("color", "thickness", "text", "number", "letter", "style", "other")
MODIFIER_SCOPES = ("source", "path", "target", "unit")
SLIDER_KINDS = ("amplitude", "directional_bias", "timing")

GRID_MAX = 30.0
DIRECTIONAL_BIAS_BOUNDS = (0.5, 1.5)
# Fallback slider range when a backend omits min/max. The timing kind has no
# published numeric range; it shares this default and stays configurable at
# the parse call site.
DEFAULT_SLIDER_RANGE = (0.5, 1.5)


class ConfidenceBucket(enum.Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


def _check_grid_component(value: float, label: str) -> None:
    if not 0.0 <= value <= GRID_MAX:
        raise ValueError(f"{label} {value} outside [0, {GRID_MAX:g}]")
    if not float(2 * value).is_integer():
        raise ValueError(f"{label} {value} is not quantized to 0.5")


@dataclass(frozen=True)
class GridCoord:
    """A point on the grounding grid, quantized to half cells."""

    x: float
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        _check_grid_component(self.x, "x")
        _check_grid_component(self.y, "y")


@dataclass(frozen=True)
class RoiBBox:
    """Axis-aligned region of interest in grid units."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        for label in ("x_min", "y_min", "x_max", "y_max"):
            object.__setattr__(self, label, float(getattr(self, label)))
            _check_grid_component(getattr(self, label), label)
        if self.x_min > self.x_max:
            raise ValueError(f"x_min {self.x_min} > x_max {self.x_max}")
        if self.y_min > self.y_max:
            raise ValueError(f"y_min {self.y_min} > y_max {self.y_max}")

    def to_wire(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    def contains(self, point: GridCoord) -> bool:
        return self.x_min <= point.x <= self.x_max and self.y_min <= point.y <= self.y_max


@dataclass(frozen=True)
class PrimaryTriplet:
    """<source, path, target>: what moves, how it moves, where it ends.

    Completeness is flexible: any field may be omitted (None) as long as at
    least one is present and non-empty.
    """

    source: str | None = None
    path: str | None = None
    target: str | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.source or self.path or self.target):
            raise ValueError("source, path, and target are all empty")

    def to_wire(self) -> dict[str, Any]:
        wire: dict[str, Any] = dict(self.extras)
        for key in ("source", "path", "target"):
            value = getattr(self, key)
            if value is not None:
                wire[key] = value
        return wire


@dataclass(frozen=True)
class SecondaryModifier:
    """Auxiliary notation metadata (color coding, text labels, numbers...)."""

    property: str
    value: str
    intended_meaning: str = ""
    scope: str = "unit"
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.property not in MODIFIER_PROPERTIES:
            raise ValueError(f"property {self.property!r} not one of {MODIFIER_PROPERTIES}")
        if self.scope not in MODIFIER_SCOPES:
            raise ValueError(f"scope {self.scope!r} not one of {MODIFIER_SCOPES}")
        if not self.value:
            raise ValueError("modifier value is empty")

    def to_wire(self) -> dict[str, Any]:
        wire = dict(self.extras)
        wire.update(property=self.property, value=self.value,
                    intended_meaning=self.intended_meaning, scope=self.scope)
        return wire


@dataclass(frozen=True)
class DimensionSlider:
    """One neutral adjustment slider grounded in the user's marks.

    Sliders are created neutral: ``default`` is always 1.0. Directional-bias
    sliders are hard-bounded to [0.5, 1.5]. ``min_label``/``max_label`` carry
    the semantic anchors shown at the slider endpoints (e.g. "shoulder
    level") when the quantity is qualitative.
    """

    id: str
    label: str
    kind: str
    min: float
    max: float
    default: float = 1.0
    value: float = 1.0
    min_label: str = ""
    max_label: str = ""
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label in ("min", "max", "default", "value"):
            object.__setattr__(self, label, float(getattr(self, label)))
        if self.kind not in SLIDER_KINDS:
            raise ValueError(f"kind {self.kind!r} not one of {SLIDER_KINDS}")
        if not self.min <= self.default <= self.max:
            raise ValueError(f"default {self.default} outside [{self.min}, {self.max}]")
        if not self.min <= self.value <= self.max:
            raise ValueError(f"value {self.value} outside [{self.min}, {self.max}]")
        if self.default != 1.0:
            raise ValueError(f"default must be 1.0 on creation, got {self.default}")
        if self.kind == "directional_bias":
            lo, hi = DIRECTIONAL_BIAS_BOUNDS
            if self.min < lo or self.max > hi:
                raise ValueError(
                    f"directional_bias bounds [{self.min}, {self.max}] exceed [{lo}, {hi}]")

    def to_wire(self) -> dict[str, Any]:
        wire = dict(self.extras)
        wire.update(id=self.id, label=self.label, kind=self.kind, min=self.min,
                    max=self.max, default=self.default, value=self.value)
        if self.min_label:
            wire["min_label"] = self.min_label
        if self.max_label:
            wire["max_label"] = self.max_label
        return wire


@dataclass(frozen=True)
class UnassignedMark:
    """A mark the interpreter saw but could not confidently assign."""

    note: str
    bbox: RoiBBox
    extras: Mapping[str, Any] = field(default_factory=dict)

    def to_wire(self) -> dict[str, Any]:
        wire = dict(self.extras)
        wire.update(note=self.note, bbox=self.bbox.to_wire())
        return wire


@dataclass(frozen=True)
class LegendEntry:
    """A notation convention the interpreter inferred (e.g. red = paths)."""

    cue: str
    meaning: str
    extras: Mapping[str, Any] = field(default_factory=dict)

    def to_wire(self) -> dict[str, Any]:
        wire = dict(self.extras)
        wire.update(cue=self.cue, meaning=self.meaning)
        return wire


@dataclass(frozen=True)
class AnimationUnit:
    """One interpreted motion: triplet, modifiers, ROI, confidence, sliders.

    ``edited_fields`` records which fields the user asserted by hand so
    re-inference can pin them; ``pin_enforced`` marks units where the backend
    contradicted a pin and the pipeline restored the user's value.
    """

    id: str
    roi: RoiBBox
    primary: PrimaryTriplet
    confidence: float
    summary: str
    sliders: tuple[DimensionSlider, ...]
    tag_color: str | None = None
    modifiers: tuple[SecondaryModifier, ...] = ()
    temporal_order: int | None = None
    edited_fields: tuple[str, ...] = ()
    pin_enforced: bool = False
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "confidence", float(self.confidence))
        if not self.id:
            raise ValueError("unit id is empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if not self.summary:
            raise ValueError("summary is empty")
        if not 1 <= len(self.sliders) <= 3:
            raise ValueError(f"expected 1-3 sliders, got {len(self.sliders)}")
        if self.temporal_order is not None and self.temporal_order < 0:
            raise ValueError(f"temporal_order {self.temporal_order} is negative")
        seen = set()
        for slider in self.sliders:
            if slider.id in seen:
                raise ValueError(f"duplicate slider id {slider.id!r}")
            seen.add(slider.id)

    def slider(self, slider_id: str) -> DimensionSlider | None:
        for slider in self.sliders:
            if slider.id == slider_id:
                return slider
        return None

    def to_wire(self) -> dict[str, Any]:
        wire = dict(self.extras)
        wire.update(
            id=self.id,
            roi_bbox=self.roi.to_wire(),
            primary=self.primary.to_wire(),
            secondary_modifiers=[m.to_wire() for m in self.modifiers],
            temporal_order=self.temporal_order,
            confidence=self.confidence,
            natural_language_summary=self.summary,
            sliders=[s.to_wire() for s in self.sliders],
        )
        if self.tag_color is not None:
            wire["color"] = self.tag_color
        if self.edited_fields:
            wire["edited_fields"] = list(self.edited_fields)
        if self.pin_enforced:
            wire["pin_enforced"] = True
        return wire


@dataclass(frozen=True)
class InterpretationResult:
    """The full validated interpretation of one notated canvas."""

    units: tuple[AnimationUnit, ...] = ()
    unassigned_marks: tuple[UnassignedMark, ...] = ()
    global_timeline: tuple[str, ...] = ()
    legend_inferred: tuple[LegendEntry, ...] = ()
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ids = [u.id for u in self.units]
        id_set = set(ids)
        if len(id_set) != len(ids):
            dupe = next(i for i in ids if ids.count(i) > 1)
            raise ValueError(f"duplicate unit id {dupe!r}")
        if len(set(self.global_timeline)) != len(self.global_timeline):
            raise ValueError("global_timeline repeats a unit id")
        for uid in self.global_timeline:
            if uid not in id_set:
                raise ValueError(f"global_timeline references unknown unit {uid!r}")
        colors = [u.tag_color for u in self.units if u.tag_color is not None]
        if len(set(colors)) != len(colors):
            raise ValueError("tag colors are not unique across units")

    def unit(self, unit_id: str) -> AnimationUnit | None:
        for unit in self.units:
            if unit.id == unit_id:
                return unit
        return None

    def to_wire(self) -> dict[str, Any]:
        wire = dict(self.extras)
        wire.update(
            units=[u.to_wire() for u in self.units],
            unassigned_marks=[m.to_wire() for m in self.unassigned_marks],
            global_timeline=list(self.global_timeline),
            legend_inferred=[e.to_wire() for e in self.legend_inferred],
        )
        return wire
