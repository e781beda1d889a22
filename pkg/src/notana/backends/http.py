"""Live HTTP adapters for interpreter and image backends.

The wire contract is a single JSON POST: {model, prompt, image_b64} out,
{text} or {image_b64} back. Adapters translate transport only; prompt
semantics live upstream. Transport failures retry with exponential backoff
(base 1 s, factor 2) up to max_retries.
"""

from __future__ import annotations

import base64
import logging
import os
import time
from typing import Callable

import httpx
from PIL import Image

from ..digest import request_digest
from ..errors import AuthMissing, BackendTimeout, TransportError
from ..raster import from_png_bytes, png_bytes
from .cassette import Cassette
from .config import BackendConfig

logger = logging.getLogger(__name__)


def _credential(config: BackendConfig) -> str:
    value = os.environ.get(config.credential_env)
    if not value:
        raise AuthMissing(config.credential_env)
    return value


def _post_with_retries(config: BackendConfig, payload: dict,
                       transport: httpx.BaseTransport | None,
                       sleep: Callable[[float], None]) -> dict:
    key = _credential(config)
    last_error: Exception | None = None
    for attempt in range(config.max_retries + 1):
        if attempt:
            delay = 1.0 * (2 ** (attempt - 1))
            logger.debug("retrying %s in %.1fs (attempt %d)", config.endpoint, delay, attempt)
            sleep(delay)
        try:
            with httpx.Client(transport=transport, timeout=config.timeout_s) as client:
                response = client.post(
                    config.endpoint,
                    json=payload,
                    headers={"Authorization": f"Bearer {key}"},
                )
            if response.status_code >= 500:
                last_error = TransportError(f"server error {response.status_code}")
                continue
            if response.status_code >= 400:
                raise TransportError(f"request rejected: {response.status_code} {response.text}")
            return response.json()
        except httpx.TimeoutException as exc:
            last_error = BackendTimeout(str(exc))
        except httpx.TransportError as exc:
            last_error = TransportError(str(exc))
    raise last_error if last_error else TransportError("no response")


def _image_payload(config: BackendConfig, image: Image.Image, prompt: str) -> dict:
    return {
        "model": config.model,
        "prompt": prompt,
        "image_b64": base64.b64encode(png_bytes(image)).decode("ascii"),
    }


class HttpInterpreter:
    def __init__(self, config: BackendConfig,
                 transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep) -> None:
        self.config = config
        self.transport = transport
        self.sleep = sleep

    def interpret(self, image: Image.Image, prompt: str) -> str:
        reply = _post_with_retries(self.config, _image_payload(self.config, image, prompt),
                                   self.transport, self.sleep)
        if "text" not in reply:
            raise TransportError("reply has no 'text' field")
        return reply["text"]


class HttpImageBackend:
    def __init__(self, config: BackendConfig,
                 transport: httpx.BaseTransport | None = None,
                 sleep: Callable[[float], None] = time.sleep) -> None:
        self.config = config
        self.transport = transport
        self.sleep = sleep

    def generate(self, image: Image.Image, prompt: str) -> Image.Image:
        reply = _post_with_retries(self.config, _image_payload(self.config, image, prompt),
                                   self.transport, self.sleep)
        if "image_b64" not in reply:
            raise TransportError("reply has no 'image_b64' field")
        return from_png_bytes(base64.b64decode(reply["image_b64"]))


class ReplayInterpreter:
    """Serves recorded replies; never opens a socket."""

    def __init__(self, config: BackendConfig) -> None:
        self.cassette = Cassette(config.cassette_dir)

    def interpret(self, image: Image.Image, prompt: str) -> str:
        digest = request_digest(png_bytes(image), prompt)
        return self.cassette.read(digest).decode("utf-8")


class ReplayImageBackend:
    def __init__(self, config: BackendConfig) -> None:
        self.cassette = Cassette(config.cassette_dir)

    def generate(self, image: Image.Image, prompt: str) -> Image.Image:
        digest = request_digest(png_bytes(image), prompt)
        return from_png_bytes(self.cassette.read(digest))


class RecordingInterpreter:
    def __init__(self, config: BackendConfig, inner: HttpInterpreter) -> None:
        self.cassette = Cassette(config.cassette_dir)
        self.inner = inner
        self.config = config

    def interpret(self, image: Image.Image, prompt: str) -> str:
        digest = request_digest(png_bytes(image), prompt)
        reply = self.inner.interpret(image, prompt)
        self.cassette.write(digest, reply.encode("utf-8"),
                            {"kind": "interpreter", "model": self.config.model})
        return reply


class RecordingImageBackend:
    def __init__(self, config: BackendConfig, inner: HttpImageBackend) -> None:
        self.cassette = Cassette(config.cassette_dir)
        self.inner = inner
        self.config = config

    def generate(self, image: Image.Image, prompt: str) -> Image.Image:
        digest = request_digest(png_bytes(image), prompt)
        result = self.inner.generate(image, prompt)
        self.cassette.write(digest, png_bytes(result),
                            {"kind": "image", "model": self.config.model})
        return result


def make_interpreter(config: BackendConfig,
                     transport: httpx.BaseTransport | None = None,
                     sleep: Callable[[float], None] = time.sleep):
    if config.kind != "interpreter":
        raise ValueError(f"config kind is {config.kind!r}, wanted interpreter")
    if config.mode == "replay":
        return ReplayInterpreter(config)
    live = HttpInterpreter(config, transport, sleep)
    if config.mode == "record":
        return RecordingInterpreter(config, live)
    return live


def make_image_backend(config: BackendConfig,
                       transport: httpx.BaseTransport | None = None,
                       sleep: Callable[[float], None] = time.sleep):
    if config.kind != "image":
        raise ValueError(f"config kind is {config.kind!r}, wanted image")
    if config.mode == "replay":
        return ReplayImageBackend(config)
    live = HttpImageBackend(config, transport, sleep)
    if config.mode == "record":
        return RecordingImageBackend(config, live)
    return live
