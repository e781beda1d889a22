"""Digest-keyed record/replay cassettes.

One file per entry named by the request digest, body = raw reply bytes,
plus an index manifest with entry metadata. Cassettes are the project's
testing backbone: replaying them never touches the network.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..errors import CassetteMiss

INDEX_NAME = "index.json"


class Cassette:
    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)

    def _index_path(self) -> Path:
        return self.directory / INDEX_NAME

    def _load_index(self) -> dict[str, Any]:
        if self._index_path().exists():
            return json.loads(self._index_path().read_text())
        return {"entries": {}}

    def read(self, digest: str) -> bytes:
        path = self.directory / digest
        if not path.exists():
            raise CassetteMiss(digest)
        return path.read_bytes()

    def write(self, digest: str, reply: bytes, meta: dict[str, Any] | None = None) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        (self.directory / digest).write_bytes(reply)
        index = self._load_index()
        index["entries"][digest] = meta or {}
        self._index_path().write_text(json.dumps(index, indent=2, sort_keys=True))

    def __contains__(self, digest: str) -> bool:
        return (self.directory / digest).exists()
