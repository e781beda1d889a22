from .cassette import Cassette
from .config import BackendConfig
from .http import (
    HttpImageBackend,
    HttpInterpreter,
    ReplayImageBackend,
    ReplayInterpreter,
    make_image_backend,
    make_interpreter,
)
from .mock import (
    FailingImageBackend,
    ScriptedInterpreter,
    StampImageBackend,
    prompt_digest,
    read_stamps,
    stamp_digest,
)

__all__ = [
    "BackendConfig",
    "Cassette",
    "FailingImageBackend",
    "HttpImageBackend",
    "HttpInterpreter",
    "ReplayImageBackend",
    "ReplayInterpreter",
    "ScriptedInterpreter",
    "StampImageBackend",
    "make_image_backend",
    "make_interpreter",
    "prompt_digest",
    "read_stamps",
    "stamp_digest",
]
