from .ops import apply_unit_edit, bucket_confidence, pinned_assertions, set_slider
from .parse import extract_json_object, parse_interpretation, serialize_result
from .types import (
    AnimationUnit,
    ConfidenceBucket,
    DimensionSlider,
    GridCoord,
    InterpretationResult,
    LegendEntry,
    PrimaryTriplet,
    RoiBBox,
    SecondaryModifier,
    UnassignedMark,
)

__all__ = [
    "AnimationUnit",
    "ConfidenceBucket",
    "DimensionSlider",
    "GridCoord",
    "InterpretationResult",
    "LegendEntry",
    "PrimaryTriplet",
    "RoiBBox",
    "SecondaryModifier",
    "UnassignedMark",
    "apply_unit_edit",
    "bucket_confidence",
    "extract_json_object",
    "parse_interpretation",
    "pinned_assertions",
    "serialize_result",
    "set_slider",
]
