"""Workspace store tests: round-trips, history, integrity."""

from __future__ import annotations

import random

import pytest
from PIL import Image

from notana.digest import canonical_bytes
from notana.errors import IntegrityError, NotFound
from notana.generation import FrameRecord
from notana.store import BrushState, Workspace, WorkspaceStore, snapshot_doc
from notana.timeline import DecompositionEntry, build_timeline

from helpers import make_result, make_unit


@pytest.fixture
def store(tmp_path):
    return WorkspaceStore(tmp_path / "data")


def random_workspace(store: WorkspaceStore, rng: random.Random) -> Workspace:
    w, h = rng.choice([(48, 40), (64, 64), (40, 56)])
    workspace = store.create(w, h, workspace_id=f"ws{rng.randrange(10**9):09d}")
    drawing = Image.frombytes("RGBA", (w, h), bytes(rng.randrange(256) for _ in range(w * h * 4)))
    notation = Image.frombytes("RGBA", (w, h), bytes(rng.randrange(256) for _ in range(w * h * 4)))
    result = make_result(make_unit("u1", order=1, color="#123456"),
                         make_unit("u2", order=2, color="#654321"))
    timeline = build_timeline(result, [
        DecompositionEntry("u1", "torso", "lean"),
        DecompositionEntry("u2", "hair", "drag"),
    ])
    frame_img = Image.frombytes("RGBA", (w, h), bytes(rng.randrange(256) for _ in range(w * h * 4)))
    frames = (
        FrameRecord(frame_id="f0", marker_id="k1", index=0, status="done",
                    image=frame_img, prompt_digest="d0"),
        FrameRecord(frame_id="f1", marker_id="k2", index=1, status="pending",
                    parent_frame_id="f0", prompt_digest="d1"),
    )
    return Workspace(
        id=workspace.id,
        created_at=workspace.created_at,
        modified_at=workspace.modified_at,
        drawing_layer=drawing,
        notation_layer=notation,
        interpretation=result,
        decomposition=(DecompositionEntry("u1", "torso", "lean"),),
        timeline=timeline,
        frames=frames,
        brush_state=BrushState(mode="notation", size=7, color="#ff0000"),
    )


class TestWorkspace:
    def test_layers_must_match(self):
        with pytest.raises(ValueError):
            Workspace(id="w", created_at="t", modified_at="t",
                      drawing_layer=Image.new("RGBA", (10, 10)),
                      notation_layer=Image.new("RGBA", (11, 10)))

    def test_frame_indices_contiguous(self):
        frame = FrameRecord(frame_id="f1", marker_id="k", index=1)
        with pytest.raises(ValueError):
            Workspace(id="w", created_at="t", modified_at="t",
                      drawing_layer=Image.new("RGBA", (10, 10)),
                      notation_layer=Image.new("RGBA", (10, 10)),
                      frames=(frame,))


class TestReadWrite:
    def test_create_then_read(self, store):
        workspace = store.create(64, 48)
        loaded = store.read(workspace.id)
        assert loaded.id == workspace.id
        assert loaded.size == (64, 48)
        assert loaded.drawing_layer.tobytes() == workspace.drawing_layer.tobytes()

    def test_write_read_full_state(self, store):
        rng = random.Random(5)
        workspace = random_workspace(store, rng)
        store.write(workspace)
        loaded = store.read(workspace.id)
        assert canonical_bytes(snapshot_doc(loaded)) == canonical_bytes(snapshot_doc(workspace))

    def test_read_missing(self, store):
        with pytest.raises(NotFound):
            store.read("nope")

    def test_create_from_base_image(self, store):
        base = Image.new("RGBA", (33, 21), (1, 2, 3, 255))
        workspace = store.create(base_image=base)
        assert workspace.size == (33, 21)
        assert store.read(workspace.id).drawing_layer.getpixel((0, 0)) == (1, 2, 3, 255)


class TestHistory:
    def test_save_twice_equal_digests_two_entries(self, store):
        workspace = store.create(40, 40)
        s1 = store.save_snapshot(workspace)
        s2 = store.save_snapshot(workspace)
        assert s1.digest == s2.digest
        assert s1.snapshot_id != s2.snapshot_id
        assert len(store.list_history(workspace.id)) == 2

    def test_list_newest_first(self, store):
        workspace = store.create(40, 40)
        ids = [store.save_snapshot(workspace).snapshot_id for _ in range(3)]
        listed = [s.snapshot_id for s in store.list_history(workspace.id)]
        assert listed == list(reversed(ids))

    def test_empty_history(self, store):
        workspace = store.create(40, 40)
        assert store.list_history(workspace.id) == []

    def test_round_trip_byte_identical(self, store):
        rng = random.Random(11)
        workspace = random_workspace(store, rng)
        snapshot = store.save_snapshot(workspace)
        loaded = store.load_snapshot(workspace.id, snapshot.snapshot_id)
        assert canonical_bytes(snapshot_doc(loaded)) == canonical_bytes(snapshot_doc(workspace))

    def test_load_unknown_snapshot(self, store):
        workspace = store.create(40, 40)
        with pytest.raises(NotFound):
            store.load_snapshot(workspace.id, "s999999")

    def test_corrupted_snapshot_detected(self, store):
        workspace = store.create(40, 40)
        snapshot = store.save_snapshot(workspace)
        path = store._history_dir(workspace.id) / f"{snapshot.digest}.snap"
        data = bytearray(path.read_bytes())
        data[len(data) // 2] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(IntegrityError) as exc:
            store.load_snapshot(workspace.id, snapshot.snapshot_id)
        assert exc.value.expected == snapshot.digest

    def test_snapshots_append_only(self, store):
        workspace = store.create(40, 40)
        s1 = store.save_snapshot(workspace)
        touched = workspace.touched(lambda: "2000-01-01T00:00:00.000000Z")
        store.save_snapshot(touched)
        # first snapshot still loads intact
        loaded = store.load_snapshot(workspace.id, s1.snapshot_id)
        assert loaded.modified_at == workspace.modified_at
