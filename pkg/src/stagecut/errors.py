"""Error types shared across the pipeline; each carries the stage it came from."""

from __future__ import annotations


class StagecutError(Exception):
    """Base error with a stage tag so the CLI and service can report it uniformly."""

    stage = "pipeline"

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        if stage is not None:
            self.stage = stage

    @property
    def message(self) -> str:
        return str(self)


class BundleValidationError(StagecutError):
    """A bundle file is missing, malformed, or violates an invariant."""

    stage = "ingest"


class CapacityError(StagecutError):
    """Input exceeds a configured capacity limit (e.g. actor count)."""

    stage = "model"


class LlmError(StagecutError):
    """Dialogue stage failure: no cache in offline mode, network/auth, empty or unparseable response."""

    stage = "dialogue"
