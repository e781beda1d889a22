"""Timeline construction, editing, and scheduling tests."""

from __future__ import annotations

import random

import pytest

from notana.errors import (
    NegativeStart,
    NonPositiveDuration,
    UnknownBlock,
    UnknownTrack,
    UnknownUnitInDecomposition,
)
from notana.timeline import (
    DecompositionEntry,
    Timeline,
    add_block,
    build_timeline,
    delete_block,
    keyframe_schedule,
    mark_generated,
    move_block,
    resize_block,
)

from helpers import make_result, make_unit


def entry(unit_id: str, part: str, verb: str = "moves") -> DecompositionEntry:
    return DecompositionEntry(unit_id=unit_id, part_name=part, verb=verb,
                              description=f"{part} {verb}")


@pytest.fixture
def two_unit_timeline():
    result = make_result(make_unit("u1", order=1, color="#111111"),
                         make_unit("u2", order=2, color="#222222"))
    return build_timeline(result, [entry("u1", "body", "run"),
                                   entry("u2", "hair", "drag")])


def check_invariants(timeline: Timeline) -> None:
    track_ids = {t.id for t in timeline.tracks}
    for block in timeline.blocks:
        assert block.track_id in track_ids
        assert block.duration > 0
        assert block.start >= 0
    times = [m.time for m in timeline.markers]
    assert times == sorted(times)
    assert len(set(times)) == len(times)
    block_ends = {b.end for b in timeline.blocks}
    for marker in timeline.markers:
        if marker.status == "generated":
            assert marker.frame_ref is not None
        else:
            assert marker.time in block_ends


class TestBuild:
    def test_two_sequential_units_layout(self):
        # hand-simulated: starts 0.0/1.0, block ends 1.0/2.0, two markers
        result = make_result(make_unit("u1", order=1), make_unit("u2", order=2))
        timeline = build_timeline(result, [entry("u1", "body", "run"),
                                           entry("u2", "hair", "drag")])
        assert [b.start for b in timeline.blocks] == [0.0, 1.0]
        assert [m.time for m in timeline.markers] == [1.0, 2.0]
        assert len(timeline.markers) == 2

    def test_seven_entry_decomposition_gives_seven_tracks(self):
        result = make_result(make_unit("u1", order=1, color="#e67e22"),
                             make_unit("u2", order=2, color="#27ae60"))
        decomposition = [
            entry("u1", "torso", "lean forward"),
            entry("u1", "left leg", "stride"),
            entry("u1", "right leg", "push off"),
            entry("u1", "left arm", "swing"),
            entry("u1", "right arm", "swing back"),
            entry("u2", "ponytail", "lag behind"),
            entry("u2", "bangs", "settle"),
        ]
        timeline = build_timeline(result, decomposition)
        assert len(timeline.blocks) == 7
        assert len(timeline.tracks) == 7
        check_invariants(timeline)

    def test_same_unit_blocks_share_start(self):
        result = make_result(make_unit("u1"))
        timeline = build_timeline(result, [entry("u1", "head", "tilt up"),
                                           entry("u1", "neck", "stretch")])
        assert {b.start for b in timeline.blocks} == {0.0}
        # coincident ends dedup to one marker
        assert len(timeline.markers) == 1

    def test_marker_count_never_exceeds_block_count(self):
        rng = random.Random(9)
        for _ in range(20):
            n_units = rng.randrange(1, 4)
            units = [make_unit(f"u{i+1}", order=rng.choice([None, rng.randrange(3)]))
                     for i in range(n_units)]
            decomposition = [entry(f"u{rng.randrange(1, n_units + 1)}", f"part{k}")
                             for k in range(rng.randrange(1, 6))]
            timeline = build_timeline(make_result(*units), decomposition)
            assert len(timeline.markers) <= len(timeline.blocks)

    def test_track_color_mirrors_unit_tag_color(self):
        result = make_result(make_unit("u1", color="#abcdef"))
        timeline = build_timeline(result, [entry("u1", "head", "tilt")])
        assert timeline.tracks[0].color == "#abcdef"

    def test_block_label_is_part_and_verb(self):
        result = make_result(make_unit("u1"))
        timeline = build_timeline(result, [entry("u1", "head", "tilt up")])
        assert timeline.blocks[0].label == "head tilt up"

    def test_nulls_order_after_numbered(self):
        result = make_result(make_unit("a"), make_unit("b", order=0))
        timeline = build_timeline(result, [entry("a", "x"), entry("b", "y")])
        starts = {b.track_id: b.start for b in timeline.blocks}
        track_a = next(t.id for t in timeline.tracks if t.unit_id == "a")
        track_b = next(t.id for t in timeline.tracks if t.unit_id == "b")
        assert starts[track_b] == 0.0
        assert starts[track_a] == 1.0

    def test_global_timeline_overrides_temporal_order(self):
        result = make_result(make_unit("u1", order=1), make_unit("u2", order=2),
                             global_timeline=("u2", "u1"))
        timeline = build_timeline(result, [entry("u1", "x"), entry("u2", "y")])
        starts = {t.unit_id: None for t in timeline.tracks}
        for block in timeline.blocks:
            track = timeline.track(block.track_id)
            starts[track.unit_id] = block.start
        assert starts == {"u2": 0.0, "u1": 1.0}

    def test_unknown_unit_rejected(self):
        result = make_result(make_unit("u1"))
        with pytest.raises(UnknownUnitInDecomposition):
            build_timeline(result, [entry("ghost", "x")])

    def test_empty_result_empty_timeline(self):
        timeline = build_timeline(make_result(), [])
        assert timeline == Timeline()

    def test_pure_function(self):
        result = make_result(make_unit("u1", order=1), make_unit("u2", order=2))
        decomposition = [entry("u1", "body", "run"), entry("u2", "hair", "drag")]
        a = build_timeline(result, decomposition)
        b = build_timeline(result, decomposition)
        assert a == b
        assert a.to_wire() == b.to_wire()


class TestEdits:
    def test_move_to_same_start_is_identity(self, two_unit_timeline):
        block = two_unit_timeline.blocks[0]
        assert move_block(two_unit_timeline, block.id, block.start) == two_unit_timeline

    def test_move_carries_exclusive_marker(self, two_unit_timeline):
        block = two_unit_timeline.blocks[0]  # [0,1], marker at 1.0 exclusive
        moved = move_block(two_unit_timeline, block.id, 0.5)
        assert [m.time for m in moved.markers] == [1.5, 2.0]

    def test_move_leaves_shared_marker(self):
        result = make_result(make_unit("u1"))
        timeline = build_timeline(result, [entry("u1", "head"), entry("u1", "neck")])
        # both blocks end at 1.0, sharing one marker
        moved = move_block(timeline, timeline.blocks[0].id, 2.0)
        assert [m.time for m in moved.markers] == [1.0]

    def test_move_negative_start(self, two_unit_timeline):
        with pytest.raises(NegativeStart):
            move_block(two_unit_timeline, "b1", -0.1)

    def test_resize_zero_duration(self, two_unit_timeline):
        with pytest.raises(NonPositiveDuration):
            resize_block(two_unit_timeline, "b1", 0.0)

    def test_resize_moves_exclusive_marker(self, two_unit_timeline):
        resized = resize_block(two_unit_timeline, "b1", 2.5)
        assert [m.time for m in resized.markers] == [2.0, 2.5]

    def test_marker_merges_when_landing_on_existing(self, two_unit_timeline):
        # b1 end 1.0 -> 2.0 collides with b2's marker; dedup keeps one
        resized = resize_block(two_unit_timeline, "b1", 2.0)
        assert [m.time for m in resized.markers] == [2.0]

    def test_unknown_block(self, two_unit_timeline):
        with pytest.raises(UnknownBlock):
            move_block(two_unit_timeline, "b99", 0.0)

    def test_delete_only_block_keeps_empty_track(self, two_unit_timeline):
        deleted = delete_block(two_unit_timeline, "b1")
        assert len(deleted.tracks) == 2
        assert len(deleted.blocks) == 1
        assert [m.time for m in deleted.markers] == [2.0]
        check_invariants(deleted)

    def test_delete_keeps_shared_marker(self):
        result = make_result(make_unit("u1"))
        timeline = build_timeline(result, [entry("u1", "head"), entry("u1", "neck")])
        deleted = delete_block(timeline, timeline.blocks[0].id)
        assert [m.time for m in deleted.markers] == [1.0]

    def test_add_block_appends_marker(self, two_unit_timeline):
        added = add_block(two_unit_timeline, "t1", "body settle", 2.0, 1.0)
        assert len(added.blocks) == 3
        assert [m.time for m in added.markers] == [1.0, 2.0, 3.0]

    def test_add_block_dedups_marker(self, two_unit_timeline):
        added = add_block(two_unit_timeline, "t1", "body settle", 1.0, 1.0)
        assert [m.time for m in added.markers] == [1.0, 2.0]

    def test_add_block_unknown_track(self, two_unit_timeline):
        with pytest.raises(UnknownTrack):
            add_block(two_unit_timeline, "t99", "x", 0.0, 1.0)

    def test_edits_never_change_tracks(self, two_unit_timeline):
        edited = resize_block(move_block(two_unit_timeline, "b1", 3.0), "b2", 0.25)
        edited = delete_block(edited, "b1")
        assert edited.tracks == two_unit_timeline.tracks

    def test_generated_marker_not_moved(self, two_unit_timeline):
        pinned = mark_generated(two_unit_timeline, "k1", "f0")
        moved = move_block(pinned, "b1", 5.0)
        generated = [m for m in moved.markers if m.status == "generated"]
        assert len(generated) == 1
        assert generated[0].time == 1.0


class TestSchedule:
    def test_boundary_touch_activates_both_blocks(self, two_unit_timeline):
        schedule = keyframe_schedule(two_unit_timeline)
        assert [e.time for e in schedule] == [1.0, 2.0]
        first = schedule[0]
        assert {b.id for b in first.active_blocks} == {"b1", "b2"}

    def test_empty_timeline_empty_schedule(self):
        assert keyframe_schedule(Timeline()) == []

    def test_generated_markers_not_scheduled(self, two_unit_timeline):
        pinned = mark_generated(two_unit_timeline, "k1", "f0")
        assert [e.marker_id for e in keyframe_schedule(pinned)] == ["k2"]

    def test_brute_force_interval_oracle(self, two_unit_timeline):
        edited = add_block(two_unit_timeline, "t2", "hair settle", 0.25, 2.5)
        schedule = keyframe_schedule(edited)
        for item in schedule:
            expected = {b.id for b in edited.blocks
                        if b.start <= item.time and item.time <= b.start + b.duration}
            assert {b.id for b in item.active_blocks} == expected


class TestRandomEditScripts:
    def test_invariants_hold_after_random_edits(self):
        rng = random.Random(42)
        result = make_result(make_unit("u1", order=1, color="#111111"),
                             make_unit("u2", order=2, color="#222222"))
        timeline = build_timeline(result, [
            entry("u1", "torso", "lean"), entry("u1", "arm", "swing"),
            entry("u2", "hair", "drag"),
        ])
        for _ in range(300):
            op = rng.randrange(4)
            try:
                if op == 0 and timeline.blocks:
                    block = rng.choice(timeline.blocks)
                    timeline = move_block(timeline, block.id, rng.uniform(0, 5))
                elif op == 1 and timeline.blocks:
                    block = rng.choice(timeline.blocks)
                    timeline = resize_block(timeline, block.id, rng.uniform(0.1, 3))
                elif op == 2 and timeline.blocks:
                    timeline = delete_block(timeline, rng.choice(timeline.blocks).id)
                else:
                    track = rng.choice(timeline.tracks)
                    timeline = add_block(timeline, track.id, "extra",
                                         rng.uniform(0, 4), rng.uniform(0.1, 2))
            except (UnknownBlock,):
                pass
            check_invariants(timeline)

    def test_round_trips_through_wire(self, two_unit_timeline):
        wire = two_unit_timeline.to_wire()
        assert Timeline.from_wire(wire) == two_unit_timeline
