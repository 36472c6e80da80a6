"""Retrieval pipelines over the corpus and the lake.

run_unstructured ranks cards by a text-only method.  run_structured routes
the query through tables: it anchors on the best table-bearing card, runs
a discovery operator from the anchor's tables, maps every discovered table
back to its best owning card, and reranks those cards semantically.

Both pipelines order by descending score with ties broken by ascending
card id, so the top-k list for any k is a prefix of the list for k' > k.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .discovery import OPERATORS, DiscoveryConfig, discover
from .errors import AnchorNotFoundError
from .lake import EvidenceTable, ModelCard, TableLake
from .text_index import SEMANTIC_METHODS, TextIndex

logger = logging.getLogger(__name__)

DEFAULT_DISCOVERY_K = 20


@dataclass
class PipelineConfig:
    semantic_method: str = "dense"
    operator: str = "unionable"
    k: int = 10
    discovery_k: int = DEFAULT_DISCOVERY_K
    anchor_count: int = 1
    discovery: DiscoveryConfig = field(default_factory=DiscoveryConfig)

    def __post_init__(self) -> None:
        if self.semantic_method not in SEMANTIC_METHODS:
            raise ValueError(f"unknown semantic method {self.semantic_method!r}")
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.discovery_k < self.k:
            raise ValueError("discovery_k must be at least k")
        if self.anchor_count < 1:
            raise ValueError("anchor_count must be at least 1")


@dataclass
class RankedCard:
    card_id: str
    score: float
    table_ids: list[str] = field(default_factory=list)


@dataclass
class RetrievalResult:
    query: str
    method: str
    semantic_method: str
    k: int
    cards: list[RankedCard]
    anchor_card_ids: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def card_ids(self) -> list[str]:
        return [c.card_id for c in self.cards]

    def to_record(self) -> dict:
        return {
            "query": self.query,
            "method": self.method,
            "semantic_method": self.semantic_method,
            "k": self.k,
            "cards": [
                {"card_id": c.card_id, "score": c.score, "table_ids": list(c.table_ids)}
                for c in self.cards
            ],
            "anchor_card_ids": list(self.anchor_card_ids),
            "warnings": list(self.warnings),
        }


def run_unstructured(index: TextIndex, query: str, method: str, k: int) -> RetrievalResult:
    """Text-only retrieval: dense, sparse, or hybrid over card text."""
    if k < 1:
        raise ValueError("k must be at least 1")
    scored = index.search(query, method, k)
    cards = [RankedCard(card_id=sc.card_id, score=sc.score) for sc in scored]
    return RetrievalResult(query=query, method=method, semantic_method=method, k=k, cards=cards)


def _tables_in_lake(card: ModelCard, lake: TableLake) -> list[str]:
    return [tid for tid in card.table_ids if tid in lake]


def select_anchors(index: TextIndex, lake: TableLake, query: str,
                   method: str, count: int = 1) -> list[ModelCard]:
    """The highest-ranked cards under ``method`` that own at least one table
    still present in ``lake``.  Raises AnchorNotFoundError when none qualify."""
    anchors: list[ModelCard] = []
    for scored in index.ranking(query, method):
        card = index.corpus.get(scored.card_id)
        if _tables_in_lake(card, lake):
            anchors.append(card)
            if len(anchors) >= count:
                break
    if not anchors:
        raise AnchorNotFoundError(
            f"no card in the {method} ranking for {query!r} has a table in the lake"
        )
    return anchors


def map_table_to_card(index: TextIndex, table: EvidenceTable, query: str,
                      method: str) -> str:
    """The owning card of ``table`` that scores best against ``query``.

    Ties break by ascending card id.  Cards referenced by the table but
    missing from the corpus are skipped; at least one must remain.
    """
    best_id: str | None = None
    best_score = 0.0
    for card_id in table.card_ids:
        if card_id not in index.corpus:
            continue
        score = index.score_card(query, card_id, method)
        if best_id is None or score > best_score or (score == best_score and card_id < best_id):
            best_id = card_id
            best_score = score
    if best_id is None:
        raise AnchorNotFoundError(f"table {table.id!r} has no owning card in the corpus")
    return best_id


def run_structured(index: TextIndex, lake: TableLake, query: str,
                   config: PipelineConfig | None = None) -> RetrievalResult:
    """Table-routed retrieval.

    Stages: pick anchor cards semantically, seed with their tables, discover
    related tables with the configured operator, map each discovered table to
    its best owning card, then rerank the mapped cards semantically and
    truncate to k.  Each result card carries the discovered tables that
    mapped to it.
    """
    cfg = config if config is not None else PipelineConfig()
    warnings: list[str] = []

    anchors = select_anchors(index, lake, query, cfg.semantic_method, cfg.anchor_count)
    anchor_ids = [card.id for card in anchors]

    seed_ids: list[str] = []
    seen_seed: set[str] = set()
    for card in anchors:
        for tid in _tables_in_lake(card, lake):
            if tid not in seen_seed:
                seen_seed.add(tid)
                seed_ids.append(tid)

    retrieved_ids: list[str] = []
    seen_tables: set[str] = set()
    for seed_id in seed_ids:
        seed = lake.get(seed_id)
        for scored in discover(seed, lake, cfg.operator, cfg.discovery_k, cfg.discovery):
            if scored.table_id not in seen_tables:
                seen_tables.add(scored.table_id)
                retrieved_ids.append(scored.table_id)
    if not retrieved_ids:
        warnings.append(f"{cfg.operator} discovery returned no tables")

    # First-seen order keeps the card list deterministic before reranking.
    tables_by_card: dict[str, list[str]] = {}
    for tid in retrieved_ids:
        card_id = map_table_to_card(index, lake.get(tid), query, cfg.semantic_method)
        tables_by_card.setdefault(card_id, []).append(tid)

    rescored = [
        RankedCard(card_id=cid,
                   score=index.score_card(query, cid, cfg.semantic_method),
                   table_ids=tids)
        for cid, tids in tables_by_card.items()
    ]
    rescored.sort(key=lambda rc: (-rc.score, rc.card_id))
    return RetrievalResult(
        query=query,
        method=cfg.operator,
        semantic_method=cfg.semantic_method,
        k=cfg.k,
        cards=rescored[: cfg.k],
        anchor_card_ids=anchor_ids,
        warnings=warnings,
    )
