"""Versioned prompt template assets.

Templates are plain-text package data; the id is the file stem. The default
interpreter template is shipped verbatim and must never be edited in place:
revisions get a new version suffix.
"""

from __future__ import annotations

from importlib import resources

INTERPRET_TEMPLATE_ID = "interpret_v1"
REINFER_SUFFIX_TEMPLATE_ID = "reinfer_suffix_v1"
DECOMPOSE_TEMPLATE_ID = "decompose_v1"
FRAME_PROMPT_TEMPLATE_ID = "frame_prompt_v1"


def load_template(template_id: str) -> str:
    path = resources.files("notana").joinpath("assets", "prompts", f"{template_id}.txt")
    return path.read_text(encoding="utf-8")
