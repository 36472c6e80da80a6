"""Search over a lake of model cards and their evidence tables."""

from __future__ import annotations

from .errors import (
    AnchorNotFoundError,
    ConstraintError,
    IngestError,
    MissingCardError,
    MissingTableError,
    ModelLakeError,
    ProviderError,
)
from .lake import (
    Cell,
    Corpus,
    EvidenceTable,
    ModelCard,
    TableLake,
    emit_cards,
    emit_tables,
    filter_compact,
    ingest_cards,
    ingest_tables,
    normalize_token,
    normalize_value,
    parse_cell,
    parse_markdown_tables,
    resolve_links,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorNotFoundError",
    "Cell",
    "ConstraintError",
    "Corpus",
    "EvidenceTable",
    "IngestError",
    "MissingCardError",
    "MissingTableError",
    "ModelCard",
    "ModelLakeError",
    "ProviderError",
    "TableLake",
    "__version__",
    "emit_cards",
    "emit_tables",
    "filter_compact",
    "ingest_cards",
    "ingest_tables",
    "normalize_token",
    "normalize_value",
    "parse_cell",
    "parse_markdown_tables",
    "resolve_links",
]
