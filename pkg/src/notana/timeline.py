"""Per-part timeline derived from an interpretation plus a motion decomposition.

Each animation unit is decomposed (by the interpreter backend) into primitive
per-part motions; every decomposition entry becomes a block on a per-part
track, and every block end gets a placeholder keyframe marker. Time is
measured in abstract beats; ``beat_duration_hint`` is display-only.

Timelines are immutable values: every edit returns a new timeline.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Iterable

from .errors import (
    NegativeStart,
    NonPositiveDuration,
    UnknownBlock,
    UnknownTrack,
    UnknownUnitInDecomposition,
)
from .intent.types import InterpretationResult

DEFAULT_BLOCK_BEATS = 1.0
UNIT_STAGGER_BEATS = 1.0
DEFAULT_BEAT_SECONDS = 0.5


@dataclass(frozen=True)
class DecompositionEntry:
    """One primitive motion of one unit, named by part and verb."""

    unit_id: str
    part_name: str
    verb: str
    description: str = ""

    def to_wire(self) -> dict[str, Any]:
        return {"unit_id": self.unit_id, "part_name": self.part_name,
                "verb": self.verb, "description": self.description}


@dataclass(frozen=True)
class Track:
    id: str
    part_name: str
    unit_id: str
    color: str | None

    def to_wire(self) -> dict[str, Any]:
        return {"id": self.id, "part_name": self.part_name,
                "unit_id": self.unit_id, "color": self.color}


@dataclass(frozen=True)
class Block:
    id: str
    track_id: str
    label: str
    start: float
    duration: float
    description: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "duration", float(self.duration))
        if self.duration <= 0:
            raise ValueError(f"duration {self.duration} must be positive")
        if self.start < 0:
            raise ValueError(f"start {self.start} must be non-negative")

    @property
    def end(self) -> float:
        return self.start + self.duration

    def to_wire(self) -> dict[str, Any]:
        return {"id": self.id, "track_id": self.track_id, "label": self.label,
                "start": self.start, "duration": self.duration,
                "description": self.description}


@dataclass(frozen=True)
class KeyframeMarker:
    id: str
    time: float
    status: str = "placeholder"  # placeholder | generated
    frame_ref: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "time", float(self.time))
        if self.status not in ("placeholder", "generated"):
            raise ValueError(f"bad marker status {self.status!r}")
        if self.status == "generated" and self.frame_ref is None:
            raise ValueError("generated marker needs a frame_ref")

    def to_wire(self) -> dict[str, Any]:
        return {"id": self.id, "time": self.time, "status": self.status,
                "frame_ref": self.frame_ref}


@dataclass(frozen=True)
class Timeline:
    tracks: tuple[Track, ...] = ()
    blocks: tuple[Block, ...] = ()
    markers: tuple[KeyframeMarker, ...] = ()
    beat_duration_hint: float = DEFAULT_BEAT_SECONDS

    def __post_init__(self) -> None:
        track_ids = {t.id for t in self.tracks}
        for block in self.blocks:
            if block.track_id not in track_ids:
                raise ValueError(f"block {block.id} references unknown track {block.track_id}")
        times = [m.time for m in self.markers]
        if times != sorted(times):
            raise ValueError("markers are not sorted by time")
        if len(set(times)) != len(times):
            raise ValueError("marker times are not unique")

    def track(self, track_id: str) -> Track | None:
        return next((t for t in self.tracks if t.id == track_id), None)

    def block(self, block_id: str) -> Block | None:
        return next((b for b in self.blocks if b.id == block_id), None)

    def to_wire(self) -> dict[str, Any]:
        return {
            "tracks": [t.to_wire() for t in self.tracks],
            "blocks": [b.to_wire() for b in self.blocks],
            "markers": [m.to_wire() for m in self.markers],
            "beat_duration_hint": self.beat_duration_hint,
        }

    @classmethod
    def from_wire(cls, wire: dict[str, Any]) -> "Timeline":
        return cls(
            tracks=tuple(Track(**t) for t in wire.get("tracks", [])),
            blocks=tuple(Block(**b) for b in wire.get("blocks", [])),
            markers=tuple(KeyframeMarker(**m) for m in wire.get("markers", [])),
            beat_duration_hint=wire.get("beat_duration_hint", DEFAULT_BEAT_SECONDS),
        )


def _unit_order(result: InterpretationResult) -> list[str]:
    # global_timeline wins where present; everything else falls back to
    # temporal_order ascending with nulls last, stable in listing order
    listed = [u.id for u in result.units]
    by_order = sorted(
        (u for u in result.units),
        key=lambda u: (u.temporal_order is None,
                       u.temporal_order if u.temporal_order is not None else 0,
                       listed.index(u.id)),
    )
    ordering = [uid for uid in result.global_timeline]
    ordering.extend(u.id for u in by_order if u.id not in ordering)
    return ordering


def build_timeline(result: InterpretationResult,
                   decomposition: Iterable[DecompositionEntry],
                   beat_duration_hint: float = DEFAULT_BEAT_SECONDS) -> Timeline:
    """Construct the per-part timeline for a decomposed interpretation.

    One track per (unit, part), one block per decomposition entry. Blocks of
    the same unit start together; successive units are staggered by one
    beat. Every block end gets a placeholder marker, deduplicated by exact
    time.
    """
    entries = list(decomposition)
    known = {u.id for u in result.units}
    for entry in entries:
        if entry.unit_id not in known:
            raise UnknownUnitInDecomposition(entry.unit_id)

    ordering = _unit_order(result)
    starts = {uid: i * UNIT_STAGGER_BEATS for i, uid in enumerate(ordering)}

    tracks: list[Track] = []
    track_by_key: dict[tuple[str, str], Track] = {}
    blocks: list[Block] = []
    for entry in entries:
        key = (entry.unit_id, entry.part_name)
        track = track_by_key.get(key)
        if track is None:
            unit = result.unit(entry.unit_id)
            track = Track(id=f"t{len(tracks) + 1}", part_name=entry.part_name,
                          unit_id=entry.unit_id, color=unit.tag_color)
            track_by_key[key] = track
            tracks.append(track)
        blocks.append(Block(
            id=f"b{len(blocks) + 1}",
            track_id=track.id,
            label=f"{entry.part_name} {entry.verb}",
            start=starts[entry.unit_id],
            duration=DEFAULT_BLOCK_BEATS,
            description=entry.description,
        ))

    times = sorted({b.end for b in blocks})
    markers = tuple(KeyframeMarker(id=f"k{i + 1}", time=t) for i, t in enumerate(times))
    return Timeline(tracks=tuple(tracks), blocks=tuple(blocks), markers=markers,
                    beat_duration_hint=beat_duration_hint)


def _next_id(existing: Iterable[str], prefix: str) -> str:
    top = 0
    for eid in existing:
        if eid.startswith(prefix) and eid[len(prefix):].isdigit():
            top = max(top, int(eid[len(prefix):]))
    return f"{prefix}{top + 1}"


def _retarget_marker(timeline: Timeline, blocks: tuple[Block, ...],
                     old_end: float, new_end: float | None) -> tuple[KeyframeMarker, ...]:
    """Move or drop the placeholder marker trailing an edited block.

    ``blocks`` are the post-edit blocks. The marker at ``old_end`` moves to
    ``new_end`` (or disappears when ``new_end`` is None) only when it is a
    placeholder and no other block still ends at ``old_end``.
    """
    marker = next((m for m in timeline.markers
                   if m.time == old_end and m.status == "placeholder"), None)
    if marker is None or any(b.end == old_end for b in blocks):
        return timeline.markers
    remaining = [m for m in timeline.markers if m.id != marker.id]
    if new_end is not None and not any(m.time == new_end for m in remaining):
        remaining.append(replace(marker, time=new_end))
    return tuple(sorted(remaining, key=lambda m: m.time))


def _edit_block(timeline: Timeline, block_id: str, **changes: float) -> Timeline:
    block = timeline.block(block_id)
    if block is None:
        raise UnknownBlock(block_id)
    new_block = replace(block, **changes)
    blocks = tuple(new_block if b.id == block_id else b for b in timeline.blocks)
    markers = _retarget_marker(timeline, blocks, block.end, new_block.end)
    return replace(timeline, blocks=blocks, markers=markers)


def move_block(timeline: Timeline, block_id: str, new_start: float) -> Timeline:
    if new_start < 0:
        raise NegativeStart(f"start {new_start} is negative")
    return _edit_block(timeline, block_id, start=new_start)


def resize_block(timeline: Timeline, block_id: str, new_duration: float) -> Timeline:
    if new_duration <= 0:
        raise NonPositiveDuration(f"duration {new_duration} is not positive")
    return _edit_block(timeline, block_id, duration=new_duration)


def delete_block(timeline: Timeline, block_id: str) -> Timeline:
    """Remove a block; its track stays, its exclusive trailing marker goes."""
    block = timeline.block(block_id)
    if block is None:
        raise UnknownBlock(block_id)
    blocks = tuple(b for b in timeline.blocks if b.id != block_id)
    markers = _retarget_marker(timeline, blocks, block.end, None)
    return replace(timeline, blocks=blocks, markers=markers)


def add_block(timeline: Timeline, track_id: str, label: str, start: float,
              duration: float, description: str = "") -> Timeline:
    if timeline.track(track_id) is None:
        raise UnknownTrack(track_id)
    if start < 0:
        raise NegativeStart(f"start {start} is negative")
    if duration <= 0:
        raise NonPositiveDuration(f"duration {duration} is not positive")
    block = Block(id=_next_id((b.id for b in timeline.blocks), "b"),
                  track_id=track_id, label=label, start=start,
                  duration=duration, description=description)
    blocks = timeline.blocks + (block,)
    markers = timeline.markers
    if not any(m.time == block.end for m in markers):
        marker = KeyframeMarker(id=_next_id((m.id for m in markers), "k"), time=block.end)
        markers = tuple(sorted(markers + (marker,), key=lambda m: m.time))
    return replace(timeline, blocks=blocks, markers=markers)


def mark_generated(timeline: Timeline, marker_id: str, frame_ref: str) -> Timeline:
    """Flip a placeholder marker to generated, pointing at its frame."""
    markers = tuple(
        replace(m, status="generated", frame_ref=frame_ref) if m.id == marker_id else m
        for m in timeline.markers
    )
    return replace(timeline, markers=markers)


@dataclass(frozen=True)
class ScheduleEntry:
    time: float
    marker_id: str
    active_blocks: tuple[Block, ...]


def keyframe_schedule(timeline: Timeline) -> list[ScheduleEntry]:
    """Generation slots: one per placeholder marker, in time order.

    A block is active at a marker when the marker time falls inside the
    block's closed interval [start, end], so a keyframe sitting exactly on
    a block boundary reflects that block's pose.
    """
    entries = []
    for marker in timeline.markers:
        if marker.status != "placeholder":
            continue
        active = tuple(b for b in timeline.blocks if b.start <= marker.time <= b.end)
        entries.append(ScheduleEntry(time=marker.time, marker_id=marker.id,
                                     active_blocks=active))
    return entries
