"""Canonical JSON serialization and content digests.

Digests are SHA-256 over canonical bytes (sorted keys, compact separators)
and are used for cassette keys, prompt input hashes, and snapshot integrity.
They are integrity checks, not security boundaries.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def canonical_dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_bytes(obj: Any) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def digest_of(obj: Any) -> str:
    return sha256_hex(canonical_bytes(obj))


def request_digest(image_png: bytes, prompt: str) -> str:
    """Stable key for one (image, prompt) backend request."""
    h = hashlib.sha256()
    h.update(image_png)
    h.update(b"\x00")
    h.update(prompt.encode("utf-8"))
    return h.hexdigest()
