"""Deterministic scripted backends for offline runs and tests.

The mock image backend is a "digest stamper": it copies its input and
embeds the SHA-256 of the prompt into reserved pixel rows, so a frame's
ancestry (base -> f0 -> f1 -> ...) can be decoded straight from the output
raster without any model in the loop.
"""

from __future__ import annotations

import hashlib
from typing import Callable, Sequence

from PIL import Image

from ..errors import TransportError

STAMP_MAGIC = 0x5A
STAMP_ROW_MAGIC = 0xA5
DIGEST_BYTES = 32


def stamp_digest(image: Image.Image, digest: bytes) -> Image.Image:
    """Append one digest stamp to a copy of ``image``.

    Pixel (0,0) holds the stamp count; stamp i occupies row i+1, with the
    32 digest bytes in the red channel of the first 32 pixels.
    """
    if len(digest) != DIGEST_BYTES:
        raise ValueError(f"digest must be {DIGEST_BYTES} bytes")
    if image.width < DIGEST_BYTES or image.height < 2:
        raise TransportError(
            f"raster {image.size} too small to stamp (needs >= {DIGEST_BYTES}x2)")
    out = image.convert("RGBA").copy()
    count = read_stamp_count(out)
    row = count + 1
    if row >= out.height:
        raise TransportError(f"no stamp rows left in raster of height {out.height}")
    out.putpixel((0, 0), (count + 1, STAMP_MAGIC, 0, 255))
    for x in range(DIGEST_BYTES):
        out.putpixel((x, row), (digest[x], STAMP_ROW_MAGIC, count % 256, 255))
    return out


def read_stamp_count(image: Image.Image) -> int:
    r, g, _, _ = image.convert("RGBA").getpixel((0, 0))
    return r if g == STAMP_MAGIC else 0


def read_stamps(image: Image.Image) -> list[str]:
    """Decode the stamped prompt digests, oldest first."""
    rgba = image.convert("RGBA")
    digests = []
    for i in range(read_stamp_count(rgba)):
        row = i + 1
        raw = bytes(rgba.getpixel((x, row))[0] for x in range(DIGEST_BYTES))
        digests.append(raw.hex())
    return digests


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class StampImageBackend:
    """Copies the input raster and stamps the prompt digest onto it."""

    def generate(self, image: Image.Image, prompt: str) -> Image.Image:
        return stamp_digest(image, hashlib.sha256(prompt.encode("utf-8")).digest())


class ScriptedInterpreter:
    """Replies from a fixed script, or through a routing function.

    ``script`` entries are consumed in call order; when a ``router`` is
    given it receives (image, prompt) and returns the reply, which keeps
    fixtures deterministic under pipeline retries.
    """

    def __init__(self, script: Sequence[str] = (),
                 router: Callable[[Image.Image, str], str] | None = None) -> None:
        self._script = list(script)
        self._router = router
        self.calls: list[str] = []

    def interpret(self, image: Image.Image, prompt: str) -> str:
        self.calls.append(prompt)
        if self._router is not None:
            return self._router(image, prompt)
        if not self._script:
            raise TransportError("scripted interpreter ran out of replies")
        return self._script.pop(0)


class FailingImageBackend:
    """Fails at one scheduled call index; succeeds (by stamping) otherwise."""

    def __init__(self, fail_at: int) -> None:
        self.fail_at = fail_at
        self._inner = StampImageBackend()
        self._calls = 0

    def generate(self, image: Image.Image, prompt: str) -> Image.Image:
        index = self._calls
        self._calls += 1
        if index == self.fail_at:
            raise TransportError(f"scripted failure at call {index}")
        return self._inner.generate(image, prompt)
