"""Exception types shared across the package."""

from __future__ import annotations


class ModelLakeError(Exception):
    """Base class for all package-specific errors."""


class IngestError(ModelLakeError):
    """A record in an input file is malformed or violates a data invariant."""


class MissingCardError(ModelLakeError):
    """A card id was requested that is not present in the corpus."""


class MissingTableError(ModelLakeError):
    """A table id was requested that is not present in the lake."""


class AnchorNotFoundError(ModelLakeError):
    """No card in the semantic ranking has an associated table in the lake."""


class ProviderError(ModelLakeError):
    """A remote provider call failed or returned an unusable payload."""


class ConstraintError(ModelLakeError):
    """A query could not be mapped to a usable attribute constraint."""
