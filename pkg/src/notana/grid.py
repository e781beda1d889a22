"""Spatial-grounding grid: overlay rendering and pixel/grid conversions.

The grid is 30x30 cells with its origin at the bottom-left corner, x right
and y up; rasters use the usual top-left origin with y down, so every
conversion flips the y axis. Grid coordinates snap to half cells (ties
toward zero). Non-square images keep 30x30 cells with rectangular cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, ImageDraw

from .errors import DimensionMismatch, OutOfImage
from .intent.types import GridCoord, RoiBBox
from .raster import to_rgba

DEFAULT_CELLS = 30


@dataclass(frozen=True)
class GridSpec:
    """Grid geometry bound to a concrete raster size."""

    image_width_px: int
    image_height_px: int
    cells_x: int = DEFAULT_CELLS
    cells_y: int = DEFAULT_CELLS

    def __post_init__(self) -> None:
        if self.cells_x <= 0 or self.cells_y <= 0:
            raise ValueError("cell counts must be positive")
        if self.image_width_px < self.cells_x or self.image_height_px < self.cells_y:
            raise ValueError("image must be at least one pixel per cell")

    @property
    def cell_w(self) -> float:
        return self.image_width_px / self.cells_x

    @property
    def cell_h(self) -> float:
        return self.image_height_px / self.cells_y


@dataclass(frozen=True)
class GridStyle:
    line_color: tuple[int, int, int] = (0, 0, 0)
    opacity: float = 0.35
    label_stride: int = 5


def _snap_half(value: float) -> float:
    # nearest multiple of 0.5; exact ties go toward zero
    return math.ceil(value * 2 - 0.5) / 2


def pixel_to_grid(px: float, py: float, spec: GridSpec) -> GridCoord:
    """Convert raster coordinates to the nearest half-cell grid point."""
    if not (0 <= px < spec.image_width_px and 0 <= py < spec.image_height_px):
        raise OutOfImage(f"({px}, {py}) outside {spec.image_width_px}x{spec.image_height_px}")
    gx = _snap_half(px / spec.cell_w)
    gy = _snap_half(spec.cells_y - py / spec.cell_h)
    gx = min(max(gx, 0.0), float(spec.cells_x))
    gy = min(max(gy, 0.0), float(spec.cells_y))
    return GridCoord(gx, gy)


def grid_to_pixel(coord: GridCoord, spec: GridSpec) -> tuple[int, int]:
    """Convert a grid point to raster coordinates, clamped into the image."""
    px = round(coord.x * spec.cell_w)
    py = round((spec.cells_y - coord.y) * spec.cell_h)
    return (min(max(px, 0), spec.image_width_px - 1),
            min(max(py, 0), spec.image_height_px - 1))


def roi_to_pixel_rect(roi: RoiBBox, spec: GridSpec) -> tuple[int, int, int, int]:
    """Map an ROI to a pixel rect (left, top, right, bottom), inclusive.

    Grid y_max is the top edge of the region, so it maps to the smaller
    pixel y after the axis flip.
    """
    left, bottom = grid_to_pixel(GridCoord(roi.x_min, roi.y_min), spec)
    right, top = grid_to_pixel(GridCoord(roi.x_max, roi.y_max), spec)
    return (left, top, right, bottom)


def grid_line_positions(spec: GridSpec) -> tuple[list[int], list[int]]:
    """Pixel positions of the cells_x+1 vertical and cells_y+1 horizontal lines.

    Positions are clamped into the image, so at degenerate sizes the last
    two boundaries may alias onto the same pixel column/row.
    """
    xs = [min(round(i * spec.cell_w), spec.image_width_px - 1) for i in range(spec.cells_x + 1)]
    ys = [min(round(j * spec.cell_h), spec.image_height_px - 1) for j in range(spec.cells_y + 1)]
    return xs, ys


def overlay_grid(image: Image.Image, spec: GridSpec,
                 style: GridStyle = GridStyle()) -> Image.Image:
    """Composite grid lines and axis labels over a copy of ``image``.

    Labels show grid coordinates every ``label_stride`` cells: x along the
    bottom edge, y along the left edge (grid origin is bottom-left).
    Deterministic for fixed inputs; the input raster is left untouched.
    """
    if image.size != (spec.image_width_px, spec.image_height_px):
        raise DimensionMismatch(
            f"image is {image.size}, spec wants "
            f"({spec.image_width_px}, {spec.image_height_px})")
    base = to_rgba(image)
    alpha = int(round(min(max(style.opacity, 0.0), 1.0) * 255))
    overlay = Image.new("RGBA", base.size, (0, 0, 0, 0))
    draw = ImageDraw.Draw(overlay)
    color = (*style.line_color, 255)

    xs, ys = grid_line_positions(spec)
    for x in xs:
        draw.line([(x, 0), (x, base.height - 1)], fill=color, width=1)
    for y in ys:
        draw.line([(0, y), (base.width - 1, y)], fill=color, width=1)

    if style.label_stride > 0:
        for i in range(0, spec.cells_x + 1, style.label_stride):
            x = min(xs[i] + 2, base.width - 1)
            draw.text((x, base.height - 12), str(i), fill=color)
        for j in range(0, spec.cells_y + 1, style.label_stride):
            y = min(max(ys[spec.cells_y - j] - 10, 0), base.height - 1)
            draw.text((2, y), str(j), fill=color)

    # scale the whole overlay by the requested opacity before compositing
    if alpha < 255:
        arr = np.asarray(overlay, dtype=np.uint16)
        arr[..., 3] = (arr[..., 3] * alpha + 127) // 255
        overlay = Image.fromarray(arr.astype(np.uint8), "RGBA")
    return Image.alpha_composite(base, overlay)
