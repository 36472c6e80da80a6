"""Table discovery operators: keyword, joinable, unionable.

All three take an anchor table and score every other table in the lake,
returning the top k by descending score with ties broken by ascending
table id.  Scores are integers, zero-scored candidates are dropped, and
the anchor itself is never returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

from .lake import Cell, EvidenceTable, TableLake, cell_text, normalize_token, normalize_value

logger = logging.getLogger(__name__)

JACCARD_THRESHOLD = 0.2

OPERATORS = ("keyword", "joinable", "unionable")


@dataclass
class DiscoveryConfig:
    jaccard_threshold: float = JACCARD_THRESHOLD


@dataclass
class ScoredTable:
    table_id: str
    score: int
    operator: str


class Column(NamedTuple):
    header: str
    values: list[Cell]


def columns_of(table: EvidenceTable) -> list[Column]:
    return [Column(table.headers[j], table.column(j)) for j in range(table.n_cols())]


def is_numeric_column(values: list[Cell]) -> bool:
    """True when every non-null cell is numeric and at least one exists."""
    non_null = [v for v in values if v is not None]
    return bool(non_null) and all(isinstance(v, (int, float)) for v in non_null)


def distinct_values(values: list[Cell]) -> set[str]:
    """Normalized distinct non-null values; token-less values are excluded."""
    out = set()
    for v in values:
        norm = normalize_value(v)
        if norm:
            out.add(norm)
    return out


def _rank(scores: dict[str, int], k: int, operator: str) -> list[ScoredTable]:
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [ScoredTable(table_id=tid, score=s, operator=operator) for tid, s in ordered[:k]]


def _anchor_token_set(anchor: EvidenceTable) -> set[str]:
    tokens: set[str] = set()
    for header in anchor.headers:
        tokens.update(normalize_token(header))
    if anchor.n_cols() >= 1:
        for cell in anchor.column(0):
            if cell is not None:
                tokens.update(normalize_token(cell_text(cell)))
    return tokens


def keyword_search(anchor: EvidenceTable, lake: TableLake, k: int,
                   config: DiscoveryConfig | None = None) -> list[ScoredTable]:
    """Score candidates by occurrences of anchor header and key-column tokens.

    The query token set is drawn from the anchor's headers and first-column
    values; every header and cell token occurrence in a candidate that hits
    the set counts one point.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    query_tokens = _anchor_token_set(anchor)
    if not query_tokens:
        logger.warning("anchor table %r yields no keyword tokens", anchor.id)
        return []
    scores: dict[str, int] = {}
    for candidate in lake:
        if candidate.id == anchor.id:
            continue
        count = 0
        for header in candidate.headers:
            count += sum(1 for tok in normalize_token(header) if tok in query_tokens)
        for row in candidate.rows:
            for cell in row:
                if cell is None:
                    continue
                count += sum(1 for tok in normalize_token(cell_text(cell)) if tok in query_tokens)
        if count > 0:
            scores[candidate.id] = count
    return _rank(scores, k, "keyword")


def joinable_search(anchor: EvidenceTable, lake: TableLake, k: int,
                    config: DiscoveryConfig | None = None) -> list[ScoredTable]:
    """Score candidates by distinct-value overlap with the anchor key column.

    The anchor key is its first column.  Numeric-only columns never act as
    keys on either side.  A candidate scores the best overlap among its
    columns.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    key_values = anchor.column(0)
    if is_numeric_column(key_values):
        logger.warning("anchor table %r has a numeric key column; no join candidates", anchor.id)
        return []
    keys = distinct_values(key_values)
    if not keys:
        return []
    scores: dict[str, int] = {}
    for candidate in lake:
        if candidate.id == anchor.id:
            continue
        best = 0
        for column in columns_of(candidate):
            if is_numeric_column(column.values):
                continue
            overlap = len(keys & distinct_values(column.values))
            best = max(best, overlap)
        if best > 0:
            scores[candidate.id] = best
    return _rank(scores, k, "joinable")


def column_alignment(a: Column, b: Column, config: DiscoveryConfig | None = None) -> bool:
    """Two columns align on equal normalized non-empty headers, or on a
    distinct-value Jaccard overlap of at least the configured threshold.

    Numeric-only columns can align by header only, so measurement columns
    with coincidentally close values never fuse by content.
    """
    cfg = config if config is not None else DiscoveryConfig()
    ha = normalize_value(a.header)
    hb = normalize_value(b.header)
    if ha and ha == hb:
        return True
    if is_numeric_column(a.values) or is_numeric_column(b.values):
        return False
    va = distinct_values(a.values)
    vb = distinct_values(b.values)
    if not va or not vb:
        return False
    jaccard = len(va & vb) / len(va | vb)
    return jaccard >= cfg.jaccard_threshold


def _max_alignment(anchor_cols: list[Column], cand_cols: list[Column],
                   config: DiscoveryConfig | None) -> int:
    """Size of a maximum one-to-one column matching under column_alignment."""
    adjacency = [
        [j for j, cc in enumerate(cand_cols) if column_alignment(ac, cc, config)]
        for ac in anchor_cols
    ]
    match_of: list[int | None] = [None] * len(cand_cols)

    def augment(i: int, seen: set[int]) -> bool:
        for j in adjacency[i]:
            if j in seen:
                continue
            seen.add(j)
            if match_of[j] is None or augment(match_of[j], seen):
                match_of[j] = i
                return True
        return False

    size = 0
    for i in range(len(anchor_cols)):
        if augment(i, set()):
            size += 1
    return size


def unionable_search(anchor: EvidenceTable, lake: TableLake, k: int,
                     config: DiscoveryConfig | None = None) -> list[ScoredTable]:
    """Score candidates by how many anchor columns can be matched one-to-one
    to candidate columns under column_alignment."""
    if k < 1:
        raise ValueError("k must be at least 1")
    anchor_cols = columns_of(anchor)
    scores: dict[str, int] = {}
    for candidate in lake:
        if candidate.id == anchor.id:
            continue
        size = _max_alignment(anchor_cols, columns_of(candidate), config)
        if size > 0:
            scores[candidate.id] = size
    return _rank(scores, k, "unionable")


def discover(anchor: EvidenceTable, lake: TableLake, operator: str, k: int,
             config: DiscoveryConfig | None = None) -> list[ScoredTable]:
    if operator == "keyword":
        return keyword_search(anchor, lake, k, config)
    if operator == "joinable":
        return joinable_search(anchor, lake, k, config)
    if operator == "unionable":
        return unionable_search(anchor, lake, k, config)
    raise ValueError(f"unknown operator {operator!r}; expected one of {OPERATORS}")
