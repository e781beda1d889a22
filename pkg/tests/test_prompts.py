"""Frame-prompt assembly: determinism, progress, slider neutrality."""

from __future__ import annotations

import pytest

from notana.errors import DanglingReference
from notana.intent import set_slider
from notana.prompts import synthesize_frame_prompts, unit_progress
from notana.timeline import (
    DecompositionEntry,
    Timeline,
    Track,
    build_timeline,
    keyframe_schedule,
)

from helpers import make_result, make_unit


@pytest.fixture
def scene():
    result = make_result(
        make_unit("u1", order=1, color="#e67e22", summary="The child runs to the right."),
        make_unit("u2", order=2, color="#27ae60", summary="The hair drags behind."),
    )
    timeline = build_timeline(result, [
        DecompositionEntry("u1", "torso", "lean forward", "torso tips into the run"),
        DecompositionEntry("u1", "legs", "stride", "legs cycle"),
        DecompositionEntry("u2", "ponytail", "lag behind", "ponytail trails"),
    ])
    return result, timeline, keyframe_schedule(timeline)


class TestSynthesis:
    def test_one_prompt_per_slot_ascending(self, scene):
        result, timeline, schedule = scene
        prompts = synthesize_frame_prompts(result, timeline, schedule)
        assert [p.index for p in prompts] == list(range(len(schedule)))
        assert [p.marker_id for p in prompts] == [s.marker_id for s in schedule]

    def test_mentions_all_units_with_progress(self, scene):
        result, timeline, schedule = scene
        prompts = synthesize_frame_prompts(result, timeline, schedule)
        for prompt in prompts:
            assert "runs to the right" in prompt.text
            assert "drags behind" in prompt.text
        assert "(motion 100% complete)" in prompts[0].text  # u1 ends at slot 0
        assert "(motion 0% complete)" in prompts[0].text    # u2 has not started

    def test_active_block_labels_and_descriptions(self, scene):
        result, timeline, schedule = scene
        prompts = synthesize_frame_prompts(result, timeline, schedule)
        assert "torso lean forward: torso tips into the run" in prompts[0].text
        assert "ponytail lag behind: ponytail trails" in prompts[1].text

    def test_deterministic(self, scene):
        result, timeline, schedule = scene
        a = synthesize_frame_prompts(result, timeline, schedule)
        b = synthesize_frame_prompts(result, timeline, schedule)
        assert [(p.text, p.inputs_digest) for p in a] == [(p.text, p.inputs_digest) for p in b]

    def test_neutral_sliders_emit_no_clause(self, scene):
        result, timeline, schedule = scene
        prompts = synthesize_frame_prompts(result, timeline, schedule)
        for prompt in prompts:
            assert "exaggerate" not in prompt.text
            assert "Motion range adjustments" not in prompt.text

    def test_neutral_equals_no_slider_text_exactly(self, scene):
        result, timeline, schedule = scene
        baseline = synthesize_frame_prompts(result, timeline, schedule)
        nudged = set_slider(result, "u1", "s1", 1.3)
        back = set_slider(nudged, "u1", "s1", 1.0)
        again = synthesize_frame_prompts(back, timeline, schedule)
        assert [p.text for p in again] == [p.text for p in baseline]

    def test_moved_slider_emits_magnitude_clause(self, scene):
        result, timeline, schedule = scene
        nudged = set_slider(result, "u2", "s1", 1.25)
        prompts = synthesize_frame_prompts(nudged, timeline, schedule)
        assert "exaggerate reach to 1.25× of the default extent" in prompts[0].text
        assert prompts[0].inputs_digest != synthesize_frame_prompts(
            result, timeline, schedule)[0].inputs_digest

    def test_monotone_progress_across_frames(self, scene):
        result, timeline, schedule = scene
        last = {}
        for slot in schedule:
            for unit in result.units:
                value = unit_progress(unit.id, timeline, slot.time)
                assert value >= last.get(unit.id, 0.0)
                last[unit.id] = value

    def test_empty_schedule(self, scene):
        result, timeline, _ = scene
        assert synthesize_frame_prompts(result, timeline, []) == []

    def test_dangling_track_unit(self, scene):
        result, timeline, schedule = scene
        broken = Timeline(
            tracks=timeline.tracks + (Track("t9", "ghost part", "ghost", None),),
            blocks=timeline.blocks,
            markers=timeline.markers,
        )
        with pytest.raises(DanglingReference):
            synthesize_frame_prompts(result, broken, schedule)
