"""notana: sketch-notation animation authoring engine.

Users sketch freeform motion notations over a static drawing; the engine
grounds the canvas on a coordinate grid, asks a vision-language backend for
a structured interpretation, validates it into animation units, derives a
per-part timeline, and drives progressive keyframe generation through an
image backend. Backends are pluggable; deterministic mocks and record/replay
cassettes make the whole loop testable offline.
"""

__version__ = "0.1.0"
