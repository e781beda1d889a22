"""Raster helpers: deterministic PNG I/O and straight-alpha compositing.

All engine rasters are RGBA `PIL.Image.Image` values treated as immutable:
functions always return new images and never write into their inputs.
Compositing uses exact integer arithmetic (round half up) so results are
bit-reproducible across platforms.
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionMismatch


def blank(width: int, height: int, color: tuple[int, int, int, int] = (0, 0, 0, 0)) -> Image.Image:
    return Image.new("RGBA", (width, height), color)


def to_rgba(image: Image.Image) -> Image.Image:
    return image if image.mode == "RGBA" else image.convert("RGBA")


def png_bytes(image: Image.Image) -> bytes:
    buf = io.BytesIO()
    to_rgba(image).save(buf, format="PNG")
    return buf.getvalue()


def from_png_bytes(data: bytes) -> Image.Image:
    image = Image.open(io.BytesIO(data))
    image.load()
    return to_rgba(image)


def load_png(path: str | Path) -> Image.Image:
    return from_png_bytes(Path(path).read_bytes())


def save_png(image: Image.Image, path: str | Path) -> None:
    Path(path).write_bytes(png_bytes(image))


def _div_round_half_up(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    # (num/den) rounded half away from zero, for non-negative operands
    return (2 * num + den) // (2 * den)


def alpha_over(dst: Image.Image, src: Image.Image) -> Image.Image:
    """Composite ``src`` over ``dst`` (straight alpha, 8-bit).

    out_a = sa + da*(255-sa)/255
    out_c = (sc*sa*255 + dc*da*(255-sa)) / (sa*255 + da*(255-sa))
    """
    if dst.size != src.size:
        raise DimensionMismatch(f"layer sizes differ: {dst.size} vs {src.size}")
    d = np.asarray(to_rgba(dst), dtype=np.int64)
    s = np.asarray(to_rgba(src), dtype=np.int64)
    da, sa = d[..., 3], s[..., 3]
    out_a_num = sa * 255 + da * (255 - sa)  # alpha scaled by 255
    out_a = _div_round_half_up(out_a_num, np.full_like(out_a_num, 255))
    c_num = s[..., :3] * (sa * 255)[..., None] + d[..., :3] * (da * (255 - sa))[..., None]
    den = np.where(out_a_num == 0, 1, out_a_num)
    out_c = _div_round_half_up(c_num, den[..., None])
    out_c = np.where(out_a_num[..., None] == 0, 0, out_c)
    out = np.concatenate([out_c, out_a[..., None]], axis=-1).astype(np.uint8)
    return Image.fromarray(out, "RGBA")


def scale_alpha(image: Image.Image, opacity: float) -> Image.Image:
    """Return a copy with every alpha value scaled by ``opacity`` in [0, 1]."""
    a = np.asarray(to_rgba(image), dtype=np.int64).copy()
    num = a[..., 3] * int(round(opacity * 255))
    a[..., 3] = _div_round_half_up(num, np.full_like(num, 255))
    return Image.fromarray(a.astype(np.uint8), "RGBA")
