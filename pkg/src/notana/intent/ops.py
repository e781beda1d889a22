"""Pure operations over interpretation results.

All functions return new values; nothing mutates in place.
"""

from __future__ import annotations

from dataclasses import replace

from ..errors import EmptyTriplet, OutOfRange, UnknownSlider, UnknownUnit
from .types import AnimationUnit, ConfidenceBucket, InterpretationResult, PrimaryTriplet

TRIPLET_FIELDS = ("source", "path", "target")
EDITABLE_FIELDS = TRIPLET_FIELDS + ("summary",)

BUCKET_LOW_BELOW = 0.4
BUCKET_HIGH_FROM = 0.75


def bucket_confidence(confidence: float) -> ConfidenceBucket:
    """Map a confidence score to its display bucket.

    Total and monotone on [0, 1]: below 0.4 is low, 0.75 and above is high,
    medium in between.
    """
    if not 0.0 <= confidence <= 1.0:
        raise OutOfRange(f"confidence {confidence} outside [0, 1]")
    if confidence < BUCKET_LOW_BELOW:
        return ConfidenceBucket.LOW
    if confidence < BUCKET_HIGH_FROM:
        return ConfidenceBucket.MEDIUM
    return ConfidenceBucket.HIGH


def _replace_unit(result: InterpretationResult, unit_id: str,
                  new_unit: AnimationUnit) -> InterpretationResult:
    units = tuple(new_unit if u.id == unit_id else u for u in result.units)
    return replace(result, units=units)


def apply_unit_edit(result: InterpretationResult, unit_id: str,
                    edits: dict[str, str | None]) -> InterpretationResult:
    """Apply user edits to a unit's triplet fields and/or summary.

    A value of None (or "") clears a triplet field; at least one triplet
    field must survive. Edited fields are flagged so re-inference can pin
    them as user-asserted ground truth.
    """
    unit = result.unit(unit_id)
    if unit is None:
        raise UnknownUnit(unit_id)
    unknown = set(edits) - set(EDITABLE_FIELDS)
    if unknown:
        raise ValueError(f"uneditable fields: {sorted(unknown)}")

    triplet = {f: getattr(unit.primary, f) for f in TRIPLET_FIELDS}
    pinned = set(unit.edited_fields)
    for fld, value in edits.items():
        if fld == "summary":
            continue
        if value:
            triplet[fld] = value
            pinned.add(fld)
        else:
            triplet[fld] = None
            pinned.discard(fld)
    if not any(triplet.values()):
        raise EmptyTriplet("cannot clear source, path, and target together")

    summary = unit.summary
    if "summary" in edits:
        if not edits["summary"]:
            raise ValueError("summary cannot be cleared")
        summary = edits["summary"]
        pinned.add("summary")

    new_unit = replace(
        unit,
        primary=PrimaryTriplet(source=triplet["source"], path=triplet["path"],
                               target=triplet["target"], extras=unit.primary.extras),
        summary=summary,
        edited_fields=tuple(sorted(pinned)),
    )
    return _replace_unit(result, unit_id, new_unit)


def set_slider(result: InterpretationResult, unit_id: str, slider_id: str,
               value: float) -> InterpretationResult:
    """Set a slider's value, clamped to its [min, max] range."""
    unit = result.unit(unit_id)
    if unit is None:
        raise UnknownUnit(unit_id)
    slider = unit.slider(slider_id)
    if slider is None:
        raise UnknownSlider(slider_id)
    clamped = min(max(value, slider.min), slider.max)
    sliders = tuple(
        replace(s, value=clamped) if s.id == slider_id else s for s in unit.sliders
    )
    return _replace_unit(result, unit_id, replace(unit, sliders=sliders))


def pinned_assertions(result: InterpretationResult) -> list[tuple[str, str, str]]:
    """All (unit_id, field, value) triples the user has asserted by hand."""
    pins = []
    for unit in result.units:
        for fld in unit.edited_fields:
            value = unit.summary if fld == "summary" else getattr(unit.primary, fld)
            if value:
                pins.append((unit.id, fld, value))
    return pins
