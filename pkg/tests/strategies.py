"""Hypothesis strategies generating valid interpretation values."""

from __future__ import annotations

from hypothesis import strategies as st

from notana.intent.types import (
    MODIFIER_PROPERTIES,
    MODIFIER_SCOPES,
    AnimationUnit,
    DimensionSlider,
    InterpretationResult,
    LegendEntry,
    PrimaryTriplet,
    RoiBBox,
    SecondaryModifier,
    UnassignedMark,
)

_RESERVED_KEYS = {
    "units", "unassigned_marks", "global_timeline", "legend_inferred",
    "id", "color", "roi_bbox", "primary", "secondary_modifiers",
    "temporal_order", "confidence", "natural_language_summary", "sliders",
    "edited_fields", "pin_enforced", "source", "path", "target",
    "property", "value", "intended_meaning", "scope",
    "label", "kind", "min", "max", "default", "min_label", "max_label",
    "note", "bbox", "cue", "meaning",
}

text = st.text(min_size=1, max_size=24)

json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6)
    | st.floats(allow_nan=False, allow_infinity=False, width=32) | text,
    lambda children: st.lists(children, max_size=3)
    | st.dictionaries(text, children, max_size=3),
    max_leaves=4,
)

extras = st.dictionaries(
    text.filter(lambda k: k not in _RESERVED_KEYS), json_values, max_size=2)

half_units = st.integers(0, 60).map(lambda n: n / 2)


@st.composite
def roi_bboxes(draw):
    x1, x2 = sorted((draw(half_units), draw(half_units)))
    y1, y2 = sorted((draw(half_units), draw(half_units)))
    return RoiBBox(x1, y1, x2, y2)


@st.composite
def triplets(draw):
    fields = {f: draw(text | st.none()) for f in ("source", "path", "target")}
    if not any(fields.values()):
        fields["source"] = draw(text)
    return PrimaryTriplet(**fields, extras=draw(extras))


def modifiers():
    return st.builds(
        SecondaryModifier,
        property=st.sampled_from(MODIFIER_PROPERTIES),
        value=text,
        intended_meaning=st.text(max_size=24),
        scope=st.sampled_from(MODIFIER_SCOPES),
        extras=extras,
    )


@st.composite
def sliders(draw, index: int = 0):
    kind = draw(st.sampled_from(("amplitude", "directional_bias", "timing")))
    lo_floor = 0.5 if kind == "directional_bias" else 0.0
    hi_ceil = 1.5 if kind == "directional_bias" else 4.0
    lo = draw(st.floats(lo_floor, 1.0, allow_nan=False))
    hi = draw(st.floats(1.0, hi_ceil, allow_nan=False))
    return DimensionSlider(
        id=f"s{index + 1}",
        label=draw(text),
        kind=kind,
        min=lo,
        max=hi,
        value=draw(st.floats(lo, hi, allow_nan=False)),
        min_label=draw(st.text(max_size=12)),
        max_label=draw(st.text(max_size=12)),
        extras=draw(extras),
    )


@st.composite
def units(draw, index: int = 0, with_color: bool | None = None):
    colored = draw(st.booleans()) if with_color is None else with_color
    n_sliders = draw(st.integers(1, 3))
    return AnimationUnit(
        id=f"u{index + 1}",
        tag_color=f"#c{index:05x}" if colored else None,
        roi=draw(roi_bboxes()),
        primary=draw(triplets()),
        modifiers=tuple(draw(st.lists(modifiers(), max_size=3))),
        temporal_order=draw(st.none() | st.integers(0, 9)),
        confidence=draw(st.floats(0.0, 1.0, allow_nan=False)),
        summary=draw(text),
        sliders=tuple(draw(sliders(i)) for i in range(n_sliders)),
        extras=draw(extras),
    )


@st.composite
def results(draw, min_units: int = 0, max_units: int = 5):
    n = draw(st.integers(min_units, max_units))
    unit_list = tuple(draw(units(i)) for i in range(n))
    ids = [u.id for u in unit_list]
    timeline = tuple(draw(st.permutations(ids)))[: draw(st.integers(0, n))] if n else ()
    return InterpretationResult(
        units=unit_list,
        unassigned_marks=tuple(draw(st.lists(
            st.builds(UnassignedMark, note=text, bbox=roi_bboxes(), extras=extras),
            max_size=2))),
        global_timeline=timeline,
        legend_inferred=tuple(draw(st.lists(
            st.builds(LegendEntry, cue=text, meaning=text, extras=extras),
            max_size=2))),
        extras=draw(extras),
    )
