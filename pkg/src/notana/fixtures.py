"""Built-in demo scenes with scripted backend payloads.

Three end-to-end scenes run entirely offline: a running child with hair
drag (character motion), a hopping cube stack (squash and stretch), and a
water splash (particle field). Each scene provides programmatic drawing and
notation layers, the scripted interpreter payloads (interpretation +
decomposition), and the timeline adjustments that stagger the motions into
the wanted keyframe slots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

from PIL import Image, ImageDraw

from .raster import blank
from .timeline import Timeline, add_block, move_block

CANVAS = 360


@dataclass(frozen=True)
class DemoScene:
    name: str
    drawing: Callable[[], Image.Image]
    notations: Callable[[], Image.Image]
    interpretation_reply: str
    decomposition_reply: str
    # staggers blocks / extends the timeline before scheduling
    adjust_timeline: Callable[[Timeline], Timeline]


def _unit(unit_id: str, color: str, roi, source, path, target, order, summary,
          sliders, modifiers=()) -> dict:
    return {
        "id": unit_id,
        "color": color,
        "roi_bbox": roi,
        "primary": {"source": source, "path": path, "target": target},
        "secondary_modifiers": list(modifiers),
        "temporal_order": order,
        "confidence": 0.9,
        "natural_language_summary": summary,
        "sliders": sliders,
    }


def _reply(units, global_timeline=(), legend=()) -> str:
    return json.dumps({
        "units": units,
        "unassigned_marks": [],
        "global_timeline": list(global_timeline),
        "legend_inferred": list(legend),
    })


def _decomposition_reply(entries) -> str:
    return json.dumps({"decomposition": [
        {"unit_id": uid, "part_name": part, "verb": verb, "description": desc}
        for uid, part, verb, desc in entries
    ]})


# --- run: character motion with secondary hair drag -------------------------


def _run_drawing() -> Image.Image:
    image = blank(CANVAS, CANVAS, (255, 255, 255, 255))
    draw = ImageDraw.Draw(image)
    # child mid-stride: head, ponytail, torso, limbs
    draw.ellipse([150, 80, 200, 130], outline=(40, 40, 40, 255), width=3)
    draw.line([150, 95, 120, 110], fill=(40, 40, 40, 255), width=3)  # ponytail
    draw.line([175, 130, 175, 210], fill=(40, 40, 40, 255), width=3)  # torso
    draw.line([175, 150, 215, 175], fill=(40, 40, 40, 255), width=3)  # front arm
    draw.line([175, 150, 140, 180], fill=(40, 40, 40, 255), width=3)  # back arm
    draw.line([175, 210, 215, 270], fill=(40, 40, 40, 255), width=3)  # front leg
    draw.line([175, 210, 145, 275], fill=(40, 40, 40, 255), width=3)  # back leg
    draw.line([60, 280, 320, 280], fill=(120, 120, 120, 255), width=2)  # ground
    return image


def _run_notations() -> Image.Image:
    image = blank(CANVAS, CANVAS)
    draw = ImageDraw.Draw(image)
    orange = (230, 126, 34, 255)
    green = (39, 174, 96, 255)
    # long orange arrow: the primary run direction
    draw.line([90, 240, 300, 240], fill=orange, width=4)
    draw.line([300, 240, 282, 230], fill=orange, width=4)
    draw.line([300, 240, 282, 250], fill=orange, width=4)
    draw.text((150, 218), "RUN", fill=orange)
    # green arrow near the hair: the follow-through drag
    draw.arc([95, 75, 150, 115], start=140, end=320, fill=green, width=3)
    draw.line([100, 85, 108, 97], fill=green, width=3)
    draw.text((84, 118), "drag", fill=green)
    return image


_RUN_INTERPRETATION = _reply(
    units=[
        _unit(
            "body_run", "#e67e22", [5, 5, 27, 15],
            source="the child's whole body",
            path="long straight arrow sweeping to the right",
            target="several strides to the right of the current stance",
            order=1,
            summary=("The child runs to the right with a springy, brisk, bouncy "
                     "stride, covering ground quickly."),
            sliders=[
                {"id": "s1", "label": "stride length", "kind": "amplitude",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0,
                 "min_label": "shuffle", "max_label": "full sprint"},
                {"id": "s2", "label": "forward bias of the stride",
                 "kind": "directional_bias", "min": 0.5, "max": 1.5,
                 "default": 1.0, "value": 1.0},
            ],
            modifiers=[{"property": "text", "value": "RUN",
                        "intended_meaning": "names the primary motion",
                        "scope": "unit"},
                       {"property": "color", "value": "orange",
                        "intended_meaning": "primary motion group",
                        "scope": "unit"}],
        ),
        _unit(
            "hair_drag", "#27ae60", [7, 18, 13, 24],
            source="the ponytail and loose hair",
            path="small arc curling back against the run direction",
            target="hair trailing behind the head, settling late",
            order=2,
            summary=("The hair drags behind the head with a loose, floppy, "
                     "delayed follow-through as the run starts."),
            sliders=[
                {"id": "s1", "label": "drag amount", "kind": "amplitude",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0,
                 "min_label": "barely trails", "max_label": "streams out flat"},
            ],
            modifiers=[{"property": "text", "value": "drag",
                        "intended_meaning": "names the secondary motion",
                        "scope": "unit"},
                       {"property": "color", "value": "green",
                        "intended_meaning": "secondary motion group",
                        "scope": "unit"}],
        ),
    ],
    global_timeline=["body_run", "hair_drag"],
    legend=[{"cue": "orange marks", "meaning": "primary body motion"},
            {"cue": "green marks", "meaning": "secondary follow-through"}],
)

_RUN_DECOMPOSITION = _decomposition_reply([
    ("body_run", "torso", "lean forward", "the torso tips into the run"),
    ("body_run", "left leg", "stride", "left leg reaches forward for the next step"),
    ("body_run", "right leg", "push off", "right leg drives off the ground"),
    ("body_run", "left arm", "swing forward", "left arm pumps ahead"),
    ("body_run", "right arm", "swing back", "right arm counterswings"),
    ("hair_drag", "ponytail", "lag behind", "ponytail trails the head's motion"),
    ("hair_drag", "bangs", "settle down", "front hair settles a beat later"),
])


def _run_adjust(timeline: Timeline) -> Timeline:
    """Stagger the hair overlap and extend with a settle block: 3 keyframes."""
    hair_tracks = [t.id for t in timeline.tracks if t.unit_id == "hair_drag"]
    for block in list(timeline.blocks):
        if block.track_id in hair_tracks:
            timeline = move_block(timeline, block.id, 0.5)
    torso_track = next(t.id for t in timeline.tracks if t.part_name == "torso")
    return add_block(timeline, torso_track, "torso settle", 1.5, 1.0,
                     "the torso straightens as the stride evens out")


# --- cubes: squash-and-stretch object animation ------------------------------


def _cubes_drawing() -> Image.Image:
    image = blank(CANVAS, CANVAS, (255, 255, 255, 255))
    draw = ImageDraw.Draw(image)
    for i, top in enumerate((150, 200, 250)):
        draw.rectangle([140, top, 220, top + 48], outline=(40, 40, 40, 255), width=3)
    draw.line([60, 300, 320, 300], fill=(120, 120, 120, 255), width=2)
    return image


def _cubes_notations() -> Image.Image:
    image = blank(CANVAS, CANVAS)
    draw = ImageDraw.Draw(image)
    blue = (52, 152, 219, 255)
    draw.line([180, 140, 180, 90], fill=blue, width=4)   # up arrow
    draw.line([180, 90, 170, 104], fill=blue, width=4)
    draw.line([180, 90, 190, 104], fill=blue, width=4)
    draw.arc([205, 120, 280, 200], start=250, end=20, fill=blue, width=3)
    draw.text((230, 95), "hop", fill=blue)
    draw.line([120, 260, 120, 290], fill=blue, width=3)  # squash cue
    draw.text((90, 265), "sq", fill=blue)
    return image


_CUBES_INTERPRETATION = _reply(
    units=[
        _unit(
            "u1", "#3498db", [10, 4, 20, 18],
            source="the stack of three cubes",
            path="vertical launch arcing slightly right",
            target="stack airborne, stretched along the jump arc",
            order=1,
            summary=("The cube stack hops upward as one coupled body, "
                     "stretching long and thin on the way up with a snappy, "
                     "elastic feel."),
            sliders=[
                {"id": "s1", "label": "hop height", "kind": "amplitude",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0,
                 "min_label": "hop in place", "max_label": "clears own height"},
                {"id": "s2", "label": "stretch amount", "kind": "amplitude",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0},
            ],
        ),
        _unit(
            "u2", "#9b59b6", [9, 2, 21, 8],
            source="the bottom cube",
            path=None,
            target="squashed short and wide against the ground",
            order=2,
            summary=("On landing the bottom cube squashes wide while the "
                     "upper cubes settle onto it, heavy and rubbery."),
            sliders=[
                {"id": "s1", "label": "squash amount", "kind": "amplitude",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0},
            ],
        ),
    ],
    global_timeline=["u1", "u2"],
)

_CUBES_DECOMPOSITION = _decomposition_reply([
    ("u1", "top cube", "stretch up", "leads the jump, elongating first"),
    ("u1", "middle cube", "follow", "trails the top cube by a beat"),
    ("u1", "bottom cube", "launch", "pushes off the ground"),
    ("u2", "bottom cube", "squash", "absorbs the landing, short and wide"),
])


def _cubes_adjust(timeline: Timeline) -> Timeline:
    # stagger the middle cube so the coupled motion reads top-down
    middle = next(b for b in timeline.blocks if b.label == "middle cube follow")
    return move_block(timeline, middle.id, 0.5)


# --- splash: particle-field water crown --------------------------------------


def _splash_drawing() -> Image.Image:
    image = blank(CANVAS, CANVAS, (255, 255, 255, 255))
    draw = ImageDraw.Draw(image)
    draw.ellipse([80, 230, 280, 290], outline=(60, 60, 160, 255), width=3)
    draw.arc([130, 170, 230, 260], start=180, end=360, fill=(60, 60, 160, 255), width=3)
    for x in (150, 180, 210):
        draw.ellipse([x - 4, 150, x + 4, 158], outline=(60, 60, 160, 255), width=2)
    return image


def _splash_notations() -> Image.Image:
    image = blank(CANVAS, CANVAS)
    draw = ImageDraw.Draw(image)
    red = (231, 76, 60, 255)
    for x, dx in ((110, -30), (250, 30)):
        draw.line([x, 250, x + dx, 250], fill=red, width=3)  # radial rim arrows
    for x in (150, 180, 210):
        draw.line([x, 200, x, 150], fill=red, width=3)       # upward crown arrows
        draw.line([x, 150, x - 6, 160], fill=red, width=3)
    draw.text((140, 120), "SPLASH", fill=red)
    return image


_SPLASH_INTERPRETATION = _reply(
    units=[
        _unit(
            "u1", "#e74c3c", [6, 6, 24, 17],
            source="droplets around the impact rim",
            path="outward radial arrows along the water surface",
            target="rim sheet spread wide and thin",
            order=1,
            summary=("Water spreads radially outward from the impact point "
                     "in a fast, sheeting, energetic rush."),
            sliders=[
                {"id": "s1", "label": "spread radius", "kind": "amplitude",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0},
            ],
        ),
        _unit(
            "u2", "#c0392b", [10, 12, 20, 24],
            source="the central water column",
            path="straight upward arrows with flared tips",
            target="a crown of droplets at peak height before dissipating",
            order=2,
            summary=("The crown rises vertically and blossoms into droplets, "
                     "buoyant, sparkling, then dissolving."),
            sliders=[
                {"id": "s1", "label": "crown height", "kind": "amplitude",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0,
                 "min_label": "low ripple", "max_label": "tall crown"},
                {"id": "s2", "label": "dissipation tempo", "kind": "timing",
                 "min": 0.5, "max": 1.5, "default": 1.0, "value": 1.0},
            ],
        ),
    ],
    global_timeline=["u1", "u2"],
)

_SPLASH_DECOMPOSITION = _decomposition_reply([
    ("u1", "rim sheet", "spread outward", "the surface sheet races out radially"),
    ("u1", "rim droplets", "scatter", "droplets detach from the rim edge"),
    ("u2", "crown column", "rise", "the central column lifts into a crown"),
    ("u2", "crown droplets", "dissipate", "crown tips break into falling drops"),
])


def _splash_adjust(timeline: Timeline) -> Timeline:
    # let the crown droplets linger half a beat after the crown peaks
    lingering = next(b for b in timeline.blocks if b.label == "crown droplets dissipate")
    return move_block(timeline, lingering.id, 1.5)


SCENES: dict[str, DemoScene] = {
    "run": DemoScene("run", _run_drawing, _run_notations,
                     _RUN_INTERPRETATION, _RUN_DECOMPOSITION, _run_adjust),
    "cubes": DemoScene("cubes", _cubes_drawing, _cubes_notations,
                       _CUBES_INTERPRETATION, _CUBES_DECOMPOSITION, _cubes_adjust),
    "splash": DemoScene("splash", _splash_drawing, _splash_notations,
                        _SPLASH_INTERPRETATION, _SPLASH_DECOMPOSITION, _splash_adjust),
}


def scene_router(scene: DemoScene) -> Callable:
    """Route interpreter calls to the scene's scripted payloads by prompt."""

    def route(image, prompt: str) -> str:
        if "Decompose each animation unit" in prompt:
            return scene.decomposition_reply
        return scene.interpretation_reply

    return route
