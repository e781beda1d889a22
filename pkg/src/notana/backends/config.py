"""Backend client configuration.

Model names and endpoints are config values, never code structure, so any
OpenAI-style interpreter or image endpoint can be swapped in. Credentials
come only from environment variables and are never persisted.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

DEFAULT_INTERPRETER_KEY_ENV = "NOTANA_INTERPRETER_KEY"
DEFAULT_IMAGE_KEY_ENV = "NOTANA_IMAGE_KEY"

MODES = ("live", "record", "replay")
KINDS = ("interpreter", "image")


@dataclass(frozen=True)
class BackendConfig:
    kind: str
    endpoint: str = ""
    model: str = ""
    credential_env: str = ""
    timeout_s: float = 60.0
    max_retries: int = 2
    mode: str = "live"
    cassette_dir: Path | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind {self.kind!r} not one of {KINDS}")
        if self.mode not in MODES:
            raise ValueError(f"mode {self.mode!r} not one of {MODES}")
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")
        if self.mode in ("record", "replay") and self.cassette_dir is None:
            raise ValueError(f"{self.mode} mode requires a cassette_dir")
        if not self.credential_env:
            default = (DEFAULT_INTERPRETER_KEY_ENV if self.kind == "interpreter"
                       else DEFAULT_IMAGE_KEY_ENV)
            object.__setattr__(self, "credential_env", default)
        if self.cassette_dir is not None and not isinstance(self.cassette_dir, Path):
            object.__setattr__(self, "cassette_dir", Path(self.cassette_dir))

    @classmethod
    def from_dict(cls, kind: str, data: dict[str, Any]) -> "BackendConfig":
        known = {"endpoint", "model", "credential_env", "timeout_s",
                 "max_retries", "mode", "cassette_dir"}
        return cls(kind=kind, **{k: v for k, v in data.items() if k in known})
