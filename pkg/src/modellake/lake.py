"""Data model for the card corpus and the table lake.

A model card is a text document with optional tags and links to evidence
tables.  An evidence table is a small rectangular grid with a header row.
Cells are typed at ingest time: numeric-looking strings become ints or
floats, everything else stays a string, and missing cells are None.

Cards and tables are treated as immutable once constructed; every
transformation in this module returns new objects.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import IngestError, MissingCardError, MissingTableError

logger = logging.getLogger(__name__)

Cell = str | int | float | None

# Unicode-aware alphanumeric runs; underscores split like punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+")

# Optional sign, digits, optional decimal part, optional trailing percent.
_NUMERIC_CELL_RE = re.compile(r"^[+-]?\d+(\.\d+)?%?$")

# Rows-by-columns ceiling for tables kept in the compact working set.
COMPACT_MAX_ROWS = 200
COMPACT_MAX_COLS = 100


def normalize_token(text: str) -> list[str]:
    """Lowercase ``text`` and split it into alphanumeric tokens.

    Punctuation, whitespace and underscores act as separators and never
    appear in the output, so the function is idempotent on its own output.
    """
    return _TOKEN_RE.findall(text.lower())


def cell_text(cell: Cell) -> str:
    """Render a cell for display and token extraction. None renders empty."""
    if cell is None:
        return ""
    return str(cell)


def normalize_value(cell: Cell) -> str | None:
    """Canonical form of a cell value: lowercased tokens joined by spaces.

    None stays None so that null-ness survives normalization.  A non-null
    cell with no alphanumeric content normalizes to the empty string.
    """
    if cell is None:
        return None
    return " ".join(normalize_token(cell_text(cell)))


def parse_cell(raw: str) -> Cell:
    """Type a raw cell string: int, float, trimmed string, or None if blank.

    A trailing percent sign is dropped and the numeric value kept as-is,
    so "85.2%" parses to 85.2.
    """
    text = raw.strip()
    if not text:
        return None
    if _NUMERIC_CELL_RE.match(text):
        body = text[:-1] if text.endswith("%") else text
        if "." in body:
            return float(body)
        return int(body)
    return text


@dataclass
class ModelCard:
    """A model description document.

    id: unique non-empty identifier.
    text: full card body.
    tags: free-form labels, e.g. "base_model:org/name" or "4-bit".
    table_ids: ids of evidence tables extracted from this card.
    """

    id: str
    text: str
    tags: list[str] = field(default_factory=list)
    table_ids: list[str] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "tags": list(self.tags),
            "table_ids": list(self.table_ids),
        }


@dataclass
class EvidenceTable:
    """A rectangular table with one header row.

    headers: column names, length equals the column count (>= 1).
    rows: data rows; every row has exactly len(headers) cells.
    card_ids: ids of the cards this table appeared in.
    """

    id: str
    headers: list[str]
    rows: list[list[Cell]]
    card_ids: list[str] = field(default_factory=list)

    def n_rows(self) -> int:
        return len(self.rows)

    def n_cols(self) -> int:
        return len(self.headers)

    def column(self, index: int) -> list[Cell]:
        return [row[index] for row in self.rows]

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "headers": list(self.headers),
            "rows": [list(row) for row in self.rows],
            "card_ids": list(self.card_ids),
        }


def _validate_table(table: EvidenceTable) -> None:
    if not table.id:
        raise IngestError("table with empty id")
    if not table.headers:
        raise IngestError(f"table {table.id!r} has no columns")
    width = len(table.headers)
    for i, row in enumerate(table.rows):
        if len(row) != width:
            raise IngestError(
                f"table {table.id!r} row {i} has {len(row)} cells, expected {width}"
            )


class Corpus:
    """Ordered, id-indexed collection of model cards."""

    def __init__(self, cards: Iterable[ModelCard] = ()):
        self._cards: list[ModelCard] = []
        self._by_id: dict[str, ModelCard] = {}
        for card in cards:
            if not card.id:
                raise IngestError("card with empty id")
            if card.id in self._by_id:
                raise IngestError(f"duplicate card id {card.id!r}")
            self._cards.append(card)
            self._by_id[card.id] = card

    def __len__(self) -> int:
        return len(self._cards)

    def __iter__(self) -> Iterator[ModelCard]:
        return iter(self._cards)

    def __contains__(self, card_id: str) -> bool:
        return card_id in self._by_id

    def get(self, card_id: str) -> ModelCard:
        try:
            return self._by_id[card_id]
        except KeyError:
            raise MissingCardError(f"unknown card id {card_id!r}") from None

    def ids(self) -> list[str]:
        return [card.id for card in self._cards]


class TableLake:
    """Ordered, id-indexed collection of evidence tables."""

    def __init__(self, tables: Iterable[EvidenceTable] = ()):
        self._tables: list[EvidenceTable] = []
        self._by_id: dict[str, EvidenceTable] = {}
        for table in tables:
            _validate_table(table)
            if table.id in self._by_id:
                raise IngestError(f"duplicate table id {table.id!r}")
            self._tables.append(table)
            self._by_id[table.id] = table

    def __len__(self) -> int:
        return len(self._tables)

    def __iter__(self) -> Iterator[EvidenceTable]:
        return iter(self._tables)

    def __contains__(self, table_id: str) -> bool:
        return table_id in self._by_id

    def get(self, table_id: str) -> EvidenceTable:
        try:
            return self._by_id[table_id]
        except KeyError:
            raise MissingTableError(f"unknown table id {table_id!r}") from None

    def ids(self) -> list[str]:
        return [table.id for table in self._tables]


def _card_from_record(record: object, where: str) -> ModelCard:
    if not isinstance(record, dict):
        raise IngestError(f"{where}: card record is not an object")
    try:
        card_id = record["id"]
        text = record["text"]
    except KeyError as exc:
        raise IngestError(f"{where}: card record missing field {exc.args[0]!r}") from None
    if not isinstance(card_id, str) or not card_id:
        raise IngestError(f"{where}: card id must be a non-empty string")
    if not isinstance(text, str):
        raise IngestError(f"{where}: card {card_id!r} text must be a string")
    tags = record.get("tags", [])
    table_ids = record.get("table_ids", [])
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise IngestError(f"{where}: card {card_id!r} tags must be a list of strings")
    if not isinstance(table_ids, list) or not all(isinstance(t, str) for t in table_ids):
        raise IngestError(f"{where}: card {card_id!r} table_ids must be a list of strings")
    return ModelCard(id=card_id, text=text, tags=list(tags), table_ids=list(table_ids))


def _table_from_record(record: object, where: str) -> EvidenceTable:
    if not isinstance(record, dict):
        raise IngestError(f"{where}: table record is not an object")
    try:
        table_id = record["id"]
        headers = record["headers"]
        rows = record["rows"]
    except KeyError as exc:
        raise IngestError(f"{where}: table record missing field {exc.args[0]!r}") from None
    if not isinstance(table_id, str) or not table_id:
        raise IngestError(f"{where}: table id must be a non-empty string")
    if not isinstance(headers, list) or not all(isinstance(h, str) for h in headers):
        raise IngestError(f"{where}: table {table_id!r} headers must be a list of strings")
    if not isinstance(rows, list):
        raise IngestError(f"{where}: table {table_id!r} rows must be a list")
    typed_rows: list[list[Cell]] = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise IngestError(f"{where}: table {table_id!r} row {i} is not a list")
        cells: list[Cell] = []
        for cell in row:
            if cell is None or isinstance(cell, (int, float, str)):
                if isinstance(cell, bool):
                    raise IngestError(f"{where}: table {table_id!r} row {i} has a boolean cell")
                cells.append(cell)
            else:
                raise IngestError(f"{where}: table {table_id!r} row {i} has an unsupported cell type")
        typed_rows.append(cells)
    card_ids = record.get("card_ids", [])
    if not isinstance(card_ids, list) or not all(isinstance(c, str) for c in card_ids):
        raise IngestError(f"{where}: table {table_id!r} card_ids must be a list of strings")
    table = EvidenceTable(id=table_id, headers=list(headers), rows=typed_rows, card_ids=list(card_ids))
    _validate_table(table)
    return table


def _read_jsonl(path: Path) -> Iterator[tuple[str, object]]:
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            try:
                yield where, json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{where}: invalid JSON: {exc}") from None


def ingest_cards(path: str | Path) -> Corpus:
    """Load a corpus from a JSONL file, one card object per line."""
    return Corpus(_card_from_record(rec, where) for where, rec in _read_jsonl(Path(path)))


def ingest_tables(path: str | Path) -> TableLake:
    """Load a table lake from a JSONL file, one table object per line."""
    return TableLake(_table_from_record(rec, where) for where, rec in _read_jsonl(Path(path)))


def emit_cards(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for card in corpus:
            handle.write(json.dumps(card.to_record(), ensure_ascii=False) + "\n")


def emit_tables(lake: TableLake, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for table in lake:
            handle.write(json.dumps(table.to_record(), ensure_ascii=False) + "\n")


def resolve_links(corpus: Corpus, lake: TableLake) -> tuple[Corpus, TableLake, list[str]]:
    """Drop dangling cross-references between cards and tables.

    Card links to unknown tables are removed, table links to unknown cards
    are removed, and a table left with no owning card is dropped entirely.
    Every repair is reported as a warning string and logged.
    """
    warnings: list[str] = []

    cards: list[ModelCard] = []
    for card in corpus:
        kept = [tid for tid in card.table_ids if tid in lake]
        for tid in card.table_ids:
            if tid not in lake:
                warnings.append(f"card {card.id!r} links missing table {tid!r}")
        cards.append(ModelCard(id=card.id, text=card.text, tags=list(card.tags), table_ids=kept))

    tables: list[EvidenceTable] = []
    for table in lake:
        kept = [cid for cid in table.card_ids if cid in corpus]
        for cid in table.card_ids:
            if cid not in corpus:
                warnings.append(f"table {table.id!r} links missing card {cid!r}")
        if not kept:
            warnings.append(f"table {table.id!r} has no resolvable card and was dropped")
            continue
        tables.append(EvidenceTable(id=table.id, headers=list(table.headers),
                                    rows=[list(r) for r in table.rows], card_ids=kept))

    new_lake = TableLake(tables)
    # Re-filter card links against the possibly reduced lake.
    final_cards = []
    for card in cards:
        kept = [tid for tid in card.table_ids if tid in new_lake]
        if len(kept) != len(card.table_ids):
            for tid in card.table_ids:
                if tid not in new_lake:
                    warnings.append(f"card {card.id!r} link to dropped table {tid!r} removed")
        final_cards.append(ModelCard(id=card.id, text=card.text, tags=list(card.tags), table_ids=kept))

    for message in warnings:
        logger.warning("%s", message)
    return Corpus(final_cards), new_lake, warnings


def filter_compact(lake: TableLake) -> TableLake:
    """Keep tables with fewer than 200 rows and fewer than 100 columns."""
    kept = [t for t in lake if t.n_rows() < COMPACT_MAX_ROWS and t.n_cols() < COMPACT_MAX_COLS]
    dropped = len(lake) - len(kept)
    if dropped:
        logger.info("compact filter dropped %d of %d tables", dropped, len(lake))
    return TableLake(kept)


_SEPARATOR_CELL_RE = re.compile(r"^:?-+:?$")


def _split_row(line: str) -> list[str]:
    body = line.strip()
    if body.startswith("|"):
        body = body[1:]
    if body.endswith("|"):
        body = body[:-1]
    return [cell.strip() for cell in body.split("|")]


def _is_separator(line: str) -> bool:
    cells = _split_row(line)
    return bool(cells) and all(_SEPARATOR_CELL_RE.match(c) for c in cells)


def parse_markdown_tables(text: str, card_id: str | None = None) -> list[EvidenceTable]:
    """Extract pipe tables from markdown text.

    A table is a header line, a separator line of dashes, and at least one
    data row.  Cells are trimmed and typed with parse_cell.  Ragged data
    rows are padded with None or truncated to the header width.  Blocks
    without a separator line are ignored.
    """
    lines = text.splitlines()
    tables: list[EvidenceTable] = []
    prefix = card_id if card_id is not None else "inline"
    i = 0
    while i < len(lines) - 1:
        line = lines[i]
        if "|" in line and not _is_separator(line) and _is_separator(lines[i + 1]):
            headers = _split_row(line)
            rows: list[list[Cell]] = []
            j = i + 2
            while j < len(lines) and "|" in lines[j] and not _is_separator(lines[j]):
                raw = _split_row(lines[j])
                cells = [parse_cell(c) for c in raw[: len(headers)]]
                cells.extend([None] * (len(headers) - len(cells)))
                rows.append(cells)
                j += 1
            if headers and rows:
                table_id = f"{prefix}::t{len(tables)}"
                tables.append(EvidenceTable(
                    id=table_id,
                    headers=headers,
                    rows=rows,
                    card_ids=[card_id] if card_id is not None else [],
                ))
            i = j
        else:
            i += 1
    return tables
