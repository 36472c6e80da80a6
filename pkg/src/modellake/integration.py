"""Orientation-aware table integration.

Tables carrying the same facts sometimes appear transposed: what one table
lists as a header row another lists as its first column.  Integration
first checks a 2x2 token-overlap matrix between the running view and each
incoming table, undoes a detected transposition, then folds the table in
by aligning columns, outer-unioning rows, and merging rows that share a
first-column key.

Overlap axes: axis 0 of a table is the token set of its headers excluding
the first header, and axis 1 is the token set of its first-column values.
The first header is the corner cell: transposing keeps it in header
position on both orientations, so counting it would make every table
overlap its own transpose on the header axis and the transpose check
could never fire.  Numeric first-column cells are excluded as weak
identifiers.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

from .discovery import Column, DiscoveryConfig, column_alignment
from .lake import Cell, EvidenceTable, cell_text, normalize_token, normalize_value

logger = logging.getLogger(__name__)


@dataclass
class OverlapMatrix:
    """m[i][j] = count of distinct shared tokens between axis i of the first
    table and axis j of the second (0 = header row, 1 = first column)."""

    m: list[list[int]]


@dataclass
class IntegratedTable:
    """A comparison view folded together from several source tables.

    provenance parallels rows: each non-null cell holds the id of the table
    it came from, and each null-filled cell holds None.
    """

    headers: list[str]
    rows: list[list[Cell]]
    provenance: list[list[str | None]]
    source_ids: list[str] = field(default_factory=list)

    def n_rows(self) -> int:
        return len(self.rows)

    def n_cols(self) -> int:
        return len(self.headers)

    def column(self, index: int) -> list[Cell]:
        return [row[index] for row in self.rows]

    def null_cell_count(self) -> int:
        return sum(1 for row in self.rows for cell in row if cell is None)

    def to_record(self) -> dict:
        return {
            "headers": list(self.headers),
            "rows": [list(row) for row in self.rows],
            "provenance": [list(row) for row in self.provenance],
            "source_ids": list(self.source_ids),
            "null_cells": self.null_cell_count(),
        }


def from_table(table: EvidenceTable) -> IntegratedTable:
    rows = [list(row) for row in table.rows]
    provenance: list[list[str | None]] = [
        [table.id if cell is not None else None for cell in row] for row in rows
    ]
    return IntegratedTable(headers=list(table.headers), rows=rows,
                           provenance=provenance, source_ids=[table.id])


def _header_axis(headers: list[str]) -> set[str]:
    tokens: set[str] = set()
    for header in headers[1:]:
        tokens.update(normalize_token(header))
    return tokens


def _first_column_axis(rows: list[list[Cell]]) -> set[str]:
    tokens: set[str] = set()
    for row in rows:
        if not row:
            continue
        cell = row[0]
        if cell is None or isinstance(cell, (int, float)):
            continue
        tokens.update(normalize_token(cell_text(cell)))
    return tokens


def overlap_matrix(first: EvidenceTable | IntegratedTable,
                   second: EvidenceTable | IntegratedTable) -> OverlapMatrix:
    """Distinct-token overlap between the header/first-column axes of two tables."""
    axes_a = (_header_axis(first.headers), _first_column_axis(first.rows))
    axes_b = (_header_axis(second.headers), _first_column_axis(second.rows))
    return OverlapMatrix(m=[[len(axes_a[i] & axes_b[j]) for j in range(2)] for i in range(2)])


def detect_transpose(matrix: OverlapMatrix) -> bool:
    """True when the header axis of the first table shows up as the first
    column of the second and neither header axis self-overlaps."""
    m = matrix.m
    return (m[0][1] > 0) and (m[0][0] == 0) and (m[1][1] == 0)


def transpose(table: EvidenceTable) -> EvidenceTable:
    """Pivot a table: first-column values become headers, headers become the
    first column.  The corner header stays in place.  The id is kept since
    the result is a derived view of the same table."""
    if table.n_cols() < 2:
        raise ValueError(f"table {table.id!r} has a single column; nothing to pivot")
    headers = [table.headers[0]] + [cell_text(row[0]) for row in table.rows]
    rows: list[list[Cell]] = []
    for j in range(1, table.n_cols()):
        rows.append([table.headers[j]] + [row[j] for row in table.rows])
    return EvidenceTable(id=table.id, headers=headers, rows=rows,
                         card_ids=list(table.card_ids))


def _match_columns(view: IntegratedTable, table: EvidenceTable,
                   config: DiscoveryConfig | None) -> dict[int, int]:
    """Map table column index -> view column index, one-to-one.

    Exact normalized-header matches are taken first, then any remaining
    column_alignment match; within each pass, columns pair in index order.
    """
    view_cols = [Column(view.headers[i], view.column(i)) for i in range(view.n_cols())]
    table_cols = [Column(table.headers[j], table.column(j)) for j in range(table.n_cols())]
    mapping: dict[int, int] = {}
    taken: set[int] = set()

    for j, tcol in enumerate(table_cols):
        th = normalize_value(tcol.header)
        if not th:
            continue
        for i, vcol in enumerate(view_cols):
            if i in taken:
                continue
            if normalize_value(vcol.header) == th:
                mapping[j] = i
                taken.add(i)
                break

    for j, tcol in enumerate(table_cols):
        if j in mapping:
            continue
        for i, vcol in enumerate(view_cols):
            if i in taken:
                continue
            if column_alignment(vcol, tcol, config):
                mapping[j] = i
                taken.add(i)
                break

    return mapping


def _row_key(row: list[Cell]) -> str | None:
    key = normalize_value(row[0]) if row else None
    return key if key else None


def _merge_target(view_rows: list[list[Cell]], incoming: list[Cell]) -> int | None:
    """First view row with the same key whose non-null cells all agree."""
    key = _row_key(incoming)
    if key is None:
        return None
    for idx, row in enumerate(view_rows):
        if _row_key(row) != key:
            continue
        conflict = False
        for a, b in zip(row, incoming):
            if a is not None and b is not None and normalize_value(a) != normalize_value(b):
                conflict = True
                break
        if not conflict:
            return idx
    return None


def integrate_pair(view: IntegratedTable, table: EvidenceTable,
                   config: DiscoveryConfig | None = None) -> IntegratedTable:
    """Fold one table into the view.

    Aligned table columns share the view's columns; unaligned ones are
    appended.  Table rows land as new rows unless an existing row shares
    their normalized first-column key without any conflicting non-null
    cell, in which case they merge, earlier values winning.  Conflicting
    rows stay separate so no evidence is overwritten.
    """
    mapping = _match_columns(view, table, config)
    appended = [j for j in range(table.n_cols()) if j not in mapping]

    headers = list(view.headers) + [table.headers[j] for j in appended]
    width = len(headers)
    for j, out_col in zip(appended, range(view.n_cols(), width)):
        mapping[j] = out_col

    rows = [list(row) + [None] * (width - view.n_cols()) for row in view.rows]
    provenance = [list(row) + [None] * (width - view.n_cols()) for row in view.provenance]

    for src_row in table.rows:
        incoming: list[Cell] = [None] * width
        for j, cell in enumerate(src_row):
            incoming[mapping[j]] = cell
        target = _merge_target(rows, incoming)
        if target is None:
            rows.append(incoming)
            provenance.append([table.id if cell is not None else None for cell in incoming])
        else:
            for col in range(width):
                if rows[target][col] is None and incoming[col] is not None:
                    rows[target][col] = incoming[col]
                    provenance[target][col] = table.id

    return IntegratedTable(headers=headers, rows=rows, provenance=provenance,
                           source_ids=list(view.source_ids) + [table.id])


def integrate_all(anchor: EvidenceTable, retrieved: list[EvidenceTable],
                  config: DiscoveryConfig | None = None) -> IntegratedTable:
    """Fold retrieved tables into the anchor in order, undoing transposed
    orientations detected via the overlap matrix."""
    view = from_table(anchor)
    for table in retrieved:
        matrix = overlap_matrix(view, table)
        incoming = table
        if detect_transpose(matrix):
            if table.n_cols() >= 2:
                logger.info("table %r integrates transposed against the current view", table.id)
                incoming = transpose(table)
            else:
                logger.warning("table %r looks transposed but has one column; kept as-is", table.id)
        view = integrate_pair(view, incoming, config)
    return view


def to_markdown(view: IntegratedTable) -> str:
    """Pipe-table rendering; null cells render empty."""
    lines = ["| " + " | ".join(view.headers) + " |"]
    lines.append("| " + " | ".join("---" for _ in view.headers) + " |")
    for row in view.rows:
        lines.append("| " + " | ".join(cell_text(cell) for cell in row) + " |")
    return "\n".join(lines) + "\n"


def to_csv(view: IntegratedTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(view.headers)
    for row in view.rows:
        writer.writerow([cell_text(cell) for cell in row])
    return buffer.getvalue()
