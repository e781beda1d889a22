"""Exception hierarchy shared across the engine.

Every error callers are expected to handle has its own class; the API
service maps these onto stable machine codes (see service.ERROR_CODES).
"""

from __future__ import annotations


class NotanaError(Exception):
    """Base class for all engine errors."""


# --- intent model ---------------------------------------------------------


class NoJsonFound(NotanaError):
    """Backend reply contained no balanced JSON object."""


class SchemaViolation(NotanaError):
    """A parsed value failed validation at a specific path."""

    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class DuplicateUnitId(NotanaError):
    def __init__(self, unit_id: str) -> None:
        super().__init__(f"duplicate unit id {unit_id!r}")
        self.unit_id = unit_id


class OutOfRange(NotanaError):
    """A numeric argument fell outside its documented domain."""


class UnknownUnit(NotanaError):
    def __init__(self, unit_id: str) -> None:
        super().__init__(f"no unit with id {unit_id!r}")
        self.unit_id = unit_id


class UnknownSlider(NotanaError):
    def __init__(self, slider_id: str) -> None:
        super().__init__(f"no slider with id {slider_id!r}")
        self.slider_id = slider_id


class EmptyTriplet(NotanaError):
    """An edit would clear all three of source, path, and target."""


# --- grid grounding -------------------------------------------------------


class DimensionMismatch(NotanaError):
    """Raster dimensions disagree with the grid spec or with each other."""


class OutOfImage(NotanaError):
    """Pixel coordinates fell outside the raster."""


# --- interpretation pipeline ----------------------------------------------


class BackendUnavailable(NotanaError):
    """A backend call failed after transport retries were exhausted.

    When raised mid-generation, ``index`` is the frame that failed and
    ``records`` carries the partial per-frame results.
    """

    def __init__(self, message: str, index: int | None = None,
                 records: list | None = None) -> None:
        super().__init__(message)
        self.index = index
        self.records = records


class InterpretationInvalid(NotanaError):
    """Backend replies stayed unparseable after repair retries."""

    def __init__(self, raw: str, violations: list[str]) -> None:
        super().__init__(f"unparseable after retries: {violations[-1] if violations else 'no reply'}")
        self.raw = raw
        self.violations = violations


class NothingPinned(NotanaError):
    """Re-inference requested but no unit carries an edit flag."""


# --- timeline engine ------------------------------------------------------


class UnknownUnitInDecomposition(NotanaError):
    def __init__(self, unit_id: str) -> None:
        super().__init__(f"decomposition references unknown unit {unit_id!r}")
        self.unit_id = unit_id


class UnknownTrack(NotanaError):
    def __init__(self, track_id: str) -> None:
        super().__init__(f"no track with id {track_id!r}")
        self.track_id = track_id


class UnknownBlock(NotanaError):
    def __init__(self, block_id: str) -> None:
        super().__init__(f"no block with id {block_id!r}")
        self.block_id = block_id


class NonPositiveDuration(NotanaError):
    pass


class NegativeStart(NotanaError):
    pass


# --- prompt synthesis -----------------------------------------------------


class DanglingReference(NotanaError):
    """A schedule entry references a block or unit that no longer exists."""


# --- generation orchestrator ----------------------------------------------


class GenerationRejected(NotanaError):
    def __init__(self, index: int, reason: str) -> None:
        super().__init__(f"frame {index} rejected: {reason}")
        self.index = index
        self.reason = reason


class ParentNotReady(NotanaError):
    """Regeneration requested for a frame whose parent is not done."""


class FrameNotReady(NotanaError):
    """Onion skin requested over a frame that has no image yet."""


# --- backend gateway ------------------------------------------------------


class BackendTimeout(NotanaError):
    pass


class AuthMissing(NotanaError):
    def __init__(self, env_var: str) -> None:
        super().__init__(f"credential env var {env_var!r} is not set")
        self.env_var = env_var


class TransportError(NotanaError):
    pass


class CassetteMiss(NotanaError):
    def __init__(self, digest: str) -> None:
        super().__init__(f"no cassette entry for digest {digest}")
        self.digest = digest


# --- workspace store ------------------------------------------------------


class StorageFull(NotanaError):
    pass


class SerializationError(NotanaError):
    pass


class NotFound(NotanaError):
    pass


class IntegrityError(NotanaError):
    def __init__(self, expected: str, actual: str) -> None:
        super().__init__(f"snapshot digest mismatch: expected {expected}, got {actual}")
        self.expected = expected
        self.actual = actual
