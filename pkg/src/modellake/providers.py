"""Embedding and completion providers.

Remote backends are optional and configured through environment variables;
when they are absent every consumer falls back to a deterministic local
implementation so the whole system runs offline.  Every completion call is
recorded in an audit record carrying the prompt, the raw provider output,
and the post-processed result.

Environment variables:
    MODELLAKE_EMBED_URL / MODELLAKE_EMBED_KEY   remote embedding endpoint
    MODELLAKE_COMPLETE_URL / MODELLAKE_COMPLETE_KEY   remote completion endpoint
"""

from __future__ import annotations

import itertools
import logging
import os
import zlib
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .errors import ProviderError

logger = logging.getLogger(__name__)

DEFAULT_EMBED_DIM = 256

_audit_counter = itertools.count(1)


@dataclass
class AuditRecord:
    """Trace of one provider-backed decision."""

    prompt_input: str
    provider_output: str
    post_processed: str
    provider_name: str
    audit_id: int = field(default_factory=lambda: next(_audit_counter))

    def to_record(self) -> dict:
        return {
            "audit_id": self.audit_id,
            "provider_name": self.provider_name,
            "prompt_input": self.prompt_input,
            "provider_output": self.provider_output,
            "post_processed": self.post_processed,
        }


class EmbeddingProvider(Protocol):
    """Maps texts to unit-norm float vectors of a fixed dimension."""

    dim: int

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        ...


class CompletionProvider(Protocol):
    """Maps a prompt to a text completion."""

    name: str

    def complete(self, prompt: str) -> str:
        ...


class HashingEmbeddingProvider:
    """Deterministic local embedding via hashed character trigrams.

    Each trigram of the raw text is hashed with crc32 into one of ``dim``
    buckets; bucket counts are L2-normalized.  Texts shorter than three
    characters contribute themselves as a single gram.  The empty string
    maps to the zero vector, the only input that does.
    """

    def __init__(self, dim: int = DEFAULT_EMBED_DIM):
        if dim < 1:
            raise ValueError("embedding dimension must be positive")
        self.dim = dim

    def _grams(self, text: str) -> list[str]:
        if len(text) >= 3:
            return [text[i : i + 3] for i in range(len(text) - 2)]
        return [text] if text else []

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        out = []
        for text in texts:
            counts = np.zeros(self.dim, dtype=np.float64)
            for gram in self._grams(text):
                counts[zlib.crc32(gram.encode("utf-8")) % self.dim] += 1.0
            norm = float(np.linalg.norm(counts))
            if norm > 0.0:
                counts /= norm
            out.append(counts)
        return out


class RemoteEmbeddingProvider:
    """Embedding via an HTTP endpoint returning {"embeddings": [[...], ...]}."""

    def __init__(self, url: str, api_key: str | None = None, dim: int = DEFAULT_EMBED_DIM,
                 timeout: float = 30.0):
        self.url = url
        self.api_key = api_key
        self.dim = dim
        self.timeout = timeout

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        import httpx

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(self.url, json={"texts": list(texts)},
                                  headers=headers, timeout=self.timeout)
            response.raise_for_status()
            payload = response.json()
        except Exception as exc:
            raise ProviderError(f"embedding endpoint failed: {exc}") from exc
        vectors = payload.get("embeddings")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ProviderError("embedding endpoint returned a malformed payload")
        out = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=np.float64)
            if arr.shape != (self.dim,):
                raise ProviderError(
                    f"embedding endpoint returned shape {arr.shape}, expected ({self.dim},)"
                )
            norm = float(np.linalg.norm(arr))
            if norm > 0.0:
                arr = arr / norm
            out.append(arr)
        return out


class RemoteCompletionProvider:
    """Completion via an HTTP endpoint returning {"completion": "..."}."""

    name = "remote"

    def __init__(self, url: str, api_key: str | None = None, timeout: float = 60.0):
        self.url = url
        self.api_key = api_key
        self.timeout = timeout

    def complete(self, prompt: str) -> str:
        import httpx

        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(self.url, json={"prompt": prompt},
                                  headers=headers, timeout=self.timeout)
            response.raise_for_status()
            payload = response.json()
        except Exception as exc:
            raise ProviderError(f"completion endpoint failed: {exc}") from exc
        completion = payload.get("completion")
        if not isinstance(completion, str):
            raise ProviderError("completion endpoint returned a malformed payload")
        return completion


def default_embedding_provider(dim: int = DEFAULT_EMBED_DIM) -> EmbeddingProvider:
    """Remote provider when MODELLAKE_EMBED_URL is set, hashing fallback otherwise."""
    url = os.environ.get("MODELLAKE_EMBED_URL")
    if url:
        logger.info("using remote embedding provider at %s", url)
        return RemoteEmbeddingProvider(url, os.environ.get("MODELLAKE_EMBED_KEY"), dim=dim)
    return HashingEmbeddingProvider(dim=dim)


def default_completion_provider() -> CompletionProvider | None:
    """Remote provider when MODELLAKE_COMPLETE_URL is set, None otherwise.

    A None return tells callers to use their deterministic local fallback.
    """
    url = os.environ.get("MODELLAKE_COMPLETE_URL")
    if url:
        logger.info("using remote completion provider at %s", url)
        return RemoteCompletionProvider(url, os.environ.get("MODELLAKE_COMPLETE_KEY"))
    return None
