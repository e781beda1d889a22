"""Strict parser for interpreter-backend replies.

Real model output is noisy: the JSON object may be wrapped in prose or code
fences. Extraction strips fences and takes the first balanced ``{...}`` that
decodes; validation then enforces every type invariant, attaching a
JSON-path to each failure. Unknown keys are preserved so that
``parse_interpretation(serialize_result(r)) == r``.
"""

from __future__ import annotations

import json
import re
from typing import Any, Mapping

from ..errors import DuplicateUnitId, NoJsonFound, SchemaViolation
from .types import (
    DEFAULT_SLIDER_RANGE,
    MODIFIER_PROPERTIES,
    MODIFIER_SCOPES,
    SLIDER_KINDS,
    AnimationUnit,
    DimensionSlider,
    InterpretationResult,
    LegendEntry,
    PrimaryTriplet,
    RoiBBox,
    SecondaryModifier,
    UnassignedMark,
)

_FENCE_RE = re.compile(r"```(?:[a-zA-Z0-9_-]+)?\n?(.*?)```", re.DOTALL)

_RESULT_KEYS = ("units", "unassigned_marks", "global_timeline", "legend_inferred")
_UNIT_KEYS = ("id", "color", "roi_bbox", "primary", "secondary_modifiers",
              "temporal_order", "confidence", "natural_language_summary",
              "sliders", "edited_fields", "pin_enforced")
_SLIDER_KEYS = ("id", "label", "kind", "min", "max", "default", "value",
                "min_label", "max_label")
_MODIFIER_KEYS = ("property", "value", "intended_meaning", "scope")
_TRIPLET_KEYS = ("source", "path", "target")


def extract_json_object(raw: str) -> dict[str, Any]:
    """Return the first balanced JSON object embedded in ``raw``.

    Code fences are searched first; a candidate that is balanced but does
    not decode is skipped and scanning continues at the next brace.
    """
    candidates = [m.strip() for m in _FENCE_RE.findall(raw)]
    candidates.append(raw)
    for text in candidates:
        obj = _scan_balanced(text)
        if obj is not None:
            return obj
    raise NoJsonFound("no balanced JSON object in reply")


def _scan_balanced(text: str) -> dict[str, Any] | None:
    start = text.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(text)):
            ch = text[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
            elif ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    try:
                        obj = json.loads(text[start : i + 1])
                    except json.JSONDecodeError:
                        break
                    if isinstance(obj, dict):
                        return obj
                    break
        start = text.find("{", start + 1)
    return None


def _extras(obj: Mapping[str, Any], known: tuple[str, ...]) -> dict[str, Any]:
    return {k: v for k, v in obj.items() if k not in known}


def _require(obj: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in obj:
        raise SchemaViolation(f"{path}.{key}", "missing required key")
    return obj[key]


def _as_str(value: Any, path: str, allow_empty: bool = False) -> str:
    if not isinstance(value, str):
        raise SchemaViolation(path, f"expected string, got {type(value).__name__}")
    if not value and not allow_empty:
        raise SchemaViolation(path, "must be non-empty")
    return value


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(path, f"expected number, got {type(value).__name__}")
    return float(value)


def _as_list(value: Any, path: str) -> list[Any]:
    if not isinstance(value, list):
        raise SchemaViolation(path, f"expected array, got {type(value).__name__}")
    return value


def _as_dict(value: Any, path: str) -> dict[str, Any]:
    if not isinstance(value, dict):
        raise SchemaViolation(path, f"expected object, got {type(value).__name__}")
    return value


def _parse_bbox(value: Any, path: str) -> RoiBBox:
    items = _as_list(value, path)
    if len(items) != 4:
        raise SchemaViolation(path, f"expected [x_min, y_min, x_max, y_max], got {len(items)} items")
    nums = [_as_number(v, f"{path}[{i}]") for i, v in enumerate(items)]
    try:
        return RoiBBox(*nums)
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from exc


def _parse_triplet(value: Any, path: str) -> PrimaryTriplet:
    obj = _as_dict(value, path)
    fields: dict[str, str | None] = {}
    for key in _TRIPLET_KEYS:
        raw = obj.get(key)
        if raw is None or raw == "":
            fields[key] = None
        elif isinstance(raw, str):
            fields[key] = raw
        else:
            raise SchemaViolation(f"{path}.{key}", f"expected string, got {type(raw).__name__}")
    try:
        return PrimaryTriplet(**fields, extras=_extras(obj, _TRIPLET_KEYS))
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from exc


def _parse_modifier(value: Any, path: str) -> SecondaryModifier:
    obj = _as_dict(value, path)
    prop = _as_str(_require(obj, "property", path), f"{path}.property")
    if prop not in MODIFIER_PROPERTIES:
        raise SchemaViolation(f"{path}.property", f"{prop!r} not one of {MODIFIER_PROPERTIES}")
    scope = obj.get("scope", "unit")
    if scope not in MODIFIER_SCOPES:
        raise SchemaViolation(f"{path}.scope", f"{scope!r} not one of {MODIFIER_SCOPES}")
    try:
        return SecondaryModifier(
            property=prop,
            value=_as_str(_require(obj, "value", path), f"{path}.value"),
            intended_meaning=_as_str(obj.get("intended_meaning", ""), f"{path}.intended_meaning",
                                     allow_empty=True),
            scope=scope,
            extras=_extras(obj, _MODIFIER_KEYS),
        )
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from exc


def _parse_slider(value: Any, path: str, index: int,
                  default_range: tuple[float, float]) -> DimensionSlider:
    obj = _as_dict(value, path)
    kind = _as_str(_require(obj, "kind", path), f"{path}.kind")
    if kind not in SLIDER_KINDS:
        raise SchemaViolation(f"{path}.kind", f"{kind!r} not one of {SLIDER_KINDS}")
    lo = _as_number(obj["min"], f"{path}.min") if "min" in obj else default_range[0]
    hi = _as_number(obj["max"], f"{path}.max") if "max" in obj else default_range[1]
    default = _as_number(obj["default"], f"{path}.default") if "default" in obj else 1.0
    value_ = _as_number(obj["value"], f"{path}.value") if "value" in obj else default
    slider_id = obj.get("id", f"s{index + 1}")
    try:
        return DimensionSlider(
            id=_as_str(slider_id, f"{path}.id"),
            label=_as_str(_require(obj, "label", path), f"{path}.label"),
            kind=kind,
            min=lo,
            max=hi,
            default=default,
            value=value_,
            min_label=_as_str(obj.get("min_label", ""), f"{path}.min_label", allow_empty=True),
            max_label=_as_str(obj.get("max_label", ""), f"{path}.max_label", allow_empty=True),
            extras=_extras(obj, _SLIDER_KEYS),
        )
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from exc


def _parse_unit(value: Any, path: str, index: int,
                default_range: tuple[float, float]) -> AnimationUnit:
    obj = _as_dict(value, path)
    unit_id = obj.get("id", f"u{index + 1}")

    temporal_order = obj.get("temporal_order")
    if temporal_order is not None:
        if isinstance(temporal_order, bool) or not isinstance(temporal_order, int):
            raise SchemaViolation(f"{path}.temporal_order", "expected integer or null")
        if temporal_order < 0:
            raise SchemaViolation(f"{path}.temporal_order", f"{temporal_order} is negative")

    color = obj.get("color")
    if color is not None:
        color = _as_str(color, f"{path}.color")

    modifiers = tuple(
        _parse_modifier(m, f"{path}.secondary_modifiers[{i}]")
        for i, m in enumerate(_as_list(obj.get("secondary_modifiers", []),
                                       f"{path}.secondary_modifiers"))
    )
    sliders_raw = _as_list(_require(obj, "sliders", path), f"{path}.sliders")
    if not 1 <= len(sliders_raw) <= 3:
        raise SchemaViolation(f"{path}.sliders", f"expected 1-3 sliders, got {len(sliders_raw)}")
    sliders = tuple(
        _parse_slider(s, f"{path}.sliders[{i}]", i, default_range)
        for i, s in enumerate(sliders_raw)
    )

    edited = obj.get("edited_fields", [])
    edited_fields = tuple(
        _as_str(f, f"{path}.edited_fields[{i}]")
        for i, f in enumerate(_as_list(edited, f"{path}.edited_fields"))
    )

    confidence = _as_number(_require(obj, "confidence", path), f"{path}.confidence")
    if not 0.0 <= confidence <= 1.0:
        raise SchemaViolation(f"{path}.confidence", f"{confidence} outside [0, 1]")

    try:
        return AnimationUnit(
            id=_as_str(unit_id, f"{path}.id"),
            tag_color=color,
            roi=_parse_bbox(_require(obj, "roi_bbox", path), f"{path}.roi_bbox"),
            primary=_parse_triplet(_require(obj, "primary", path), f"{path}.primary"),
            modifiers=modifiers,
            temporal_order=temporal_order,
            confidence=confidence,
            summary=_as_str(_require(obj, "natural_language_summary", path),
                            f"{path}.natural_language_summary"),
            sliders=sliders,
            edited_fields=edited_fields,
            pin_enforced=bool(obj.get("pin_enforced", False)),
            extras=_extras(obj, _UNIT_KEYS),
        )
    except ValueError as exc:
        raise SchemaViolation(path, str(exc)) from exc


def parse_interpretation(raw: str,
                         default_slider_range: tuple[float, float] = DEFAULT_SLIDER_RANGE,
                         ) -> InterpretationResult:
    """Parse and validate a backend reply into an InterpretationResult.

    Raises NoJsonFound when no balanced object is present, DuplicateUnitId
    for repeated unit ids, and SchemaViolation (with the offending JSON
    path) for any other contract breach.
    """
    obj = extract_json_object(raw)

    units_raw = _as_list(_require(obj, "units", "$"), "$.units")
    units = tuple(
        _parse_unit(u, f"$.units[{i}]", i, default_slider_range)
        for i, u in enumerate(units_raw)
    )
    seen: set[str] = set()
    for unit in units:
        if unit.id in seen:
            raise DuplicateUnitId(unit.id)
        seen.add(unit.id)

    marks = []
    for i, m in enumerate(_as_list(obj.get("unassigned_marks", []), "$.unassigned_marks")):
        mpath = f"$.unassigned_marks[{i}]"
        mobj = _as_dict(m, mpath)
        marks.append(UnassignedMark(
            note=_as_str(_require(mobj, "note", mpath), f"{mpath}.note"),
            bbox=_parse_bbox(_require(mobj, "bbox", mpath), f"{mpath}.bbox"),
            extras=_extras(mobj, ("note", "bbox")),
        ))

    timeline = tuple(
        _as_str(v, f"$.global_timeline[{i}]")
        for i, v in enumerate(_as_list(obj.get("global_timeline", []), "$.global_timeline"))
    )

    legend = []
    for i, e in enumerate(_as_list(obj.get("legend_inferred", []), "$.legend_inferred")):
        epath = f"$.legend_inferred[{i}]"
        eobj = _as_dict(e, epath)
        legend.append(LegendEntry(
            cue=_as_str(_require(eobj, "cue", epath), f"{epath}.cue"),
            meaning=_as_str(_require(eobj, "meaning", epath), f"{epath}.meaning"),
            extras=_extras(eobj, ("cue", "meaning")),
        ))

    try:
        return InterpretationResult(
            units=units,
            unassigned_marks=tuple(marks),
            global_timeline=timeline,
            legend_inferred=tuple(legend),
            extras=_extras(obj, _RESULT_KEYS),
        )
    except ValueError as exc:
        raise SchemaViolation("$", str(exc)) from exc


def serialize_result(result: InterpretationResult, indent: int | None = None) -> str:
    """Serialize to canonical JSON (sorted keys); inverse of the parser."""
    return json.dumps(result.to_wire(), sort_keys=True, indent=indent,
                      ensure_ascii=False, separators=None if indent else (",", ":"))
