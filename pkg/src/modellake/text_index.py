"""Text-only retrieval over the card corpus.

Three methods share one index: dense (cosine over embeddings), sparse
(BM25 over normalized tokens), and hybrid (sparse candidate pool reranked
densely).  All rankings break score ties by ascending card id, so results
are total orders and top-k lists are prefixes of larger-k lists.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .lake import Corpus, normalize_token
from .providers import EmbeddingProvider, default_embedding_provider

logger = logging.getLogger(__name__)

BM25_K1 = 1.2
BM25_B = 0.75
HYBRID_POOL = 100

SEMANTIC_METHODS = ("dense", "sparse", "hybrid")


@dataclass
class ScoredCard:
    card_id: str
    score: float
    method: str


@dataclass
class TextIndexConfig:
    k1: float = BM25_K1
    b: float = BM25_B
    hybrid_pool: int = HYBRID_POOL


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; zero when either vector has zero norm."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def _rank(scores: dict[str, float], k: int, method: str) -> list[ScoredCard]:
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return [ScoredCard(card_id=cid, score=s, method=method) for cid, s in ordered[:k]]


class TextIndex:
    """Embeddings plus BM25 statistics for one corpus snapshot."""

    def __init__(self, corpus: Corpus, provider: EmbeddingProvider | None = None,
                 config: TextIndexConfig | None = None):
        self.corpus = corpus
        self.provider = provider if provider is not None else default_embedding_provider()
        self.config = config if config is not None else TextIndexConfig()

        self._ids = corpus.ids()
        texts = [corpus.get(cid).text for cid in self._ids]
        self._embeddings = dict(zip(self._ids, self.provider.embed_batch(texts)))

        self._doc_tokens = {cid: normalize_token(corpus.get(cid).text) for cid in self._ids}
        self._doc_len = {cid: len(toks) for cid, toks in self._doc_tokens.items()}
        total = sum(self._doc_len.values())
        self._avgdl = total / len(self._ids) if self._ids else 0.0
        self._tf = {cid: Counter(toks) for cid, toks in self._doc_tokens.items()}
        self._postings: dict[str, list[str]] = {}
        for cid in self._ids:
            for token in self._tf[cid]:
                self._postings.setdefault(token, []).append(cid)

    def embedding(self, card_id: str) -> np.ndarray:
        return self._embeddings[card_id]

    def embed_query(self, query: str) -> np.ndarray:
        return self.provider.embed_batch([query])[0]

    def _dense_scores(self, query: str) -> dict[str, float]:
        q = self.embed_query(query)
        return {cid: cosine(q, self._embeddings[cid]) for cid in self._ids}

    def _sparse_scores(self, query: str) -> dict[str, float]:
        """BM25 with k1/b from config and idf = ln(1 + (N - df + 0.5) / (df + 0.5))."""
        n = len(self._ids)
        scores: dict[str, float] = {}
        if n == 0:
            return scores
        for token in normalize_token(query):
            docs = self._postings.get(token)
            if not docs:
                continue
            df = len(docs)
            idf = math.log(1.0 + (n - df + 0.5) / (df + 0.5))
            for cid in docs:
                tf = self._tf[cid][token]
                denom = tf + self.config.k1 * (
                    1.0 - self.config.b + self.config.b * self._doc_len[cid] / self._avgdl
                )
                scores[cid] = scores.get(cid, 0.0) + idf * (tf * (self.config.k1 + 1.0)) / denom
        return {cid: s for cid, s in scores.items() if s > 0.0}

    def search_dense(self, query: str, k: int) -> list[ScoredCard]:
        if k < 1:
            raise ValueError("k must be at least 1")
        return _rank(self._dense_scores(query), k, "dense")

    def search_sparse(self, query: str, k: int) -> list[ScoredCard]:
        """Rank by BM25; cards with no query-token overlap are omitted."""
        if k < 1:
            raise ValueError("k must be at least 1")
        return _rank(self._sparse_scores(query), k, "sparse")

    def search_hybrid(self, query: str, k: int, pool: int | None = None) -> list[ScoredCard]:
        """Sparse top-pool candidates reranked by dense cosine."""
        if k < 1:
            raise ValueError("k must be at least 1")
        pool = pool if pool is not None else self.config.hybrid_pool
        if pool < k:
            raise ValueError(f"hybrid pool {pool} is smaller than k {k}")
        candidates = self.search_sparse(query, pool)
        q = self.embed_query(query)
        rescored = {
            sc.card_id: cosine(q, self._embeddings[sc.card_id]) for sc in candidates
        }
        return _rank(rescored, k, "hybrid")

    def search(self, query: str, method: str, k: int) -> list[ScoredCard]:
        if method == "dense":
            return self.search_dense(query, k)
        if method == "sparse":
            return self.search_sparse(query, k)
        if method == "hybrid":
            return self.search_hybrid(query, k)
        raise ValueError(f"unknown method {method!r}; expected one of {SEMANTIC_METHODS}")

    def ranking(self, query: str, method: str) -> list[ScoredCard]:
        """Full ordering under a method.

        Sparse covers only cards with token overlap, and hybrid is capped at
        its candidate pool, so both may rank fewer cards than the corpus.
        """
        n = len(self._ids)
        if n == 0:
            return []
        if method == "hybrid":
            pool = self.config.hybrid_pool
            return self.search_hybrid(query, min(n, pool), pool=pool)
        return self.search(query, method, n)

    def score_card(self, query: str, card_id: str, method: str) -> float:
        """Method score for one card; dense cosine doubles as the hybrid score."""
        if card_id not in self._embeddings:
            raise KeyError(f"unknown card id {card_id!r}")
        if method in ("dense", "hybrid"):
            return cosine(self.embed_query(query), self._embeddings[card_id])
        if method == "sparse":
            return self._sparse_scores(query).get(card_id, 0.0)
        raise ValueError(f"unknown method {method!r}; expected one of {SEMANTIC_METHODS}")
