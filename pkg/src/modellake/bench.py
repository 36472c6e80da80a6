"""Benchmark harness: query preparation, multi-method runs, and reports.

Queries written for literature search are first rewritten into model
search wording, then labeled with one of six intents.  Each query runs
under every method and budget; the result set is scored by distinct
matching nuggets, and methods are ranked per (query, budget) with tied
scores sharing the better rank.  Reports are CSV and byte-stable across
reruns.
"""

from __future__ import annotations

import csv
import json
import logging
import re
import statistics
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import IngestError, ProviderError
from .lake import TableLake
from .nuggets import NuggetStore, map_query, score_candidate_set
from .pipeline import DEFAULT_DISCOVERY_K, PipelineConfig, run_structured, run_unstructured
from .providers import CompletionProvider
from .text_index import TextIndex

logger = logging.getLogger(__name__)

INTENTS = ("evidence-based", "comparison", "experience", "reason", "instruction", "debate")

DEFAULT_METHODS = ("dense", "sparse", "hybrid", "keyword", "joinable", "unionable")
UNSTRUCTURED_METHODS = ("dense", "sparse", "hybrid")
STRUCTURED_METHODS = ("keyword", "joinable", "unionable")
DEFAULT_BUDGETS = (1, 3, 5, 10)

# Literature wording -> model-search wording, applied on word boundaries
# with capitalization carried over.
REWRITE_MAP = {
    "paper": "model",
    "papers": "models",
    "study": "method",
    "studies": "methods",
    "publication": "approach",
    "publications": "approaches",
    "article": "model",
    "articles": "models",
    "literature": "models",
}

_REWRITE_RE = re.compile(r"\b(" + "|".join(sorted(REWRITE_MAP, key=len, reverse=True)) + r")\b",
                         re.IGNORECASE)

# Keyword rules checked in order; first hit wins, default evidence-based.
_INTENT_RULES: tuple[tuple[str, frozenset[str], tuple[str, ...]], ...] = (
    ("comparison", frozenset({"compare", "compared", "compares", "comparing", "comparison",
                              "versus", "vs", "better", "best", "outperform",
                              "outperforms"}), ()),
    ("instruction", frozenset({"steps", "guide", "tutorial", "instructions"}),
     ("how do i", "how to", "how can i", "how should i")),
    ("reason", frozenset({"why", "reason", "reasons", "because", "explain"}), ()),
    ("experience", frozenset({"experience", "experiences", "tried", "opinion",
                              "opinions", "feedback", "impressions"}), ()),
    ("debate", frozenset({"debate", "should", "pros", "cons", "worth", "controversial"}), ()),
)


@dataclass
class BenchmarkQuery:
    id: str
    text: str
    rewritten: str
    intent: str

    def __post_init__(self) -> None:
        if self.intent not in INTENTS:
            raise ValueError(f"unknown intent label {self.intent!r}")


@dataclass
class BenchmarkRow:
    query_id: str
    method: str
    k: int
    score: int
    rank: int = 0
    failed: bool = False


@dataclass
class SummaryRow:
    method: str
    k: int
    mean: float
    median: float
    rank_share: list[float] = field(default_factory=list)


def _prompt(name: str) -> str:
    return resources.files("modellake").joinpath(f"prompts/{name}.txt").read_text(encoding="utf-8")


def _carry_case(source: str, target: str) -> str:
    if source.isupper():
        return target.upper()
    if source[:1].isupper():
        return target[:1].upper() + target[1:]
    return target


def rewrite_query(text: str, provider: CompletionProvider | None = None) -> str:
    """Swap literature wording for model wording; nothing else changes."""
    if provider is not None:
        output = provider.complete(_prompt("query_rewrite").format(query=text)).strip()
        if not output:
            raise ProviderError("query rewriter returned empty output")
        return output
    return _REWRITE_RE.sub(lambda m: _carry_case(m.group(0), REWRITE_MAP[m.group(0).lower()]), text)


def classify_query(text: str, provider: CompletionProvider | None = None) -> str:
    """One of the six intent labels, by provider or by keyword rules."""
    if provider is not None:
        output = provider.complete(_prompt("intent_classify").format(query=text)).strip().lower()
        if output not in INTENTS:
            raise ProviderError(f"intent classifier returned unknown label {output!r}")
        return output
    lowered = text.lower()
    tokens = set(re.findall(r"[^\W_]+", lowered))
    for label, keywords, phrases in _INTENT_RULES:
        if tokens & keywords or any(phrase in lowered for phrase in phrases):
            return label
    return "evidence-based"


def load_queries(path: str | Path) -> list[tuple[str, str]]:
    """Read (id, text) pairs from a JSONL query file."""
    out: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            if not isinstance(record, dict) or "id" not in record or "text" not in record:
                raise IngestError(f"{path}:{lineno}: query record needs id and text")
            qid = str(record["id"])
            if qid in seen:
                raise IngestError(f"{path}:{lineno}: duplicate query id {qid!r}")
            seen.add(qid)
            out.append((qid, str(record["text"])))
    return out


def prepare_queries(pairs: list[tuple[str, str]],
                    provider: CompletionProvider | None = None) -> list[BenchmarkQuery]:
    return [
        BenchmarkQuery(id=qid, text=text,
                       rewritten=rewrite_query(text, provider),
                       intent=classify_query(text, provider))
        for qid, text in pairs
    ]


def _retrieve_ids(index: TextIndex, lake: TableLake, query: str, method: str, k: int,
                  semantic_for_structured: str, discovery_k: int) -> list[str]:
    if method in UNSTRUCTURED_METHODS:
        return run_unstructured(index, query, method, k).card_ids()
    config = PipelineConfig(semantic_method=semantic_for_structured, operator=method,
                            k=k, discovery_k=max(discovery_k, k))
    return run_structured(index, lake, query, config).card_ids()


def run_benchmark(index: TextIndex, lake: TableLake, store: NuggetStore,
                  queries: list[BenchmarkQuery],
                  methods: tuple[str, ...] = DEFAULT_METHODS,
                  budgets: tuple[int, ...] = DEFAULT_BUDGETS,
                  semantic_for_structured: str = "dense",
                  discovery_k: int = DEFAULT_DISCOVERY_K,
                  provider: CompletionProvider | None = None) -> list[BenchmarkRow]:
    """One row per (query, method, budget).

    A failing cell is recorded with score 0 and flagged rather than
    aborting the run, so per-query comparisons stay total.  Structured
    methods anchor with ``semantic_for_structured``.
    """
    rows: list[BenchmarkRow] = []
    for query in queries:
        try:
            constraint = map_query(query.rewritten, provider)
        except Exception as exc:
            logger.warning("query %s: constraint mapping failed: %s", query.id, exc)
            constraint = None
        for method in methods:
            for k in budgets:
                failed = False
                score = 0
                if constraint is None:
                    failed = True
                else:
                    try:
                        ids = _retrieve_ids(index, lake, query.rewritten, method, k,
                                            semantic_for_structured, discovery_k)
                        score = score_candidate_set(ids, constraint, store)
                    except Exception as exc:
                        logger.warning("query %s method %s k %d failed: %s",
                                       query.id, method, k, exc)
                        failed = True
                rows.append(BenchmarkRow(query_id=query.id, method=method, k=k,
                                         score=score, failed=failed))

    by_cell: dict[tuple[str, int], list[BenchmarkRow]] = {}
    for row in rows:
        by_cell.setdefault((row.query_id, row.k), []).append(row)
    for cell_rows in by_cell.values():
        for row in cell_rows:
            row.rank = 1 + sum(1 for other in cell_rows if other.score > row.score)
    return rows


def aggregate(rows: list[BenchmarkRow],
              methods: tuple[str, ...] = DEFAULT_METHODS) -> list[SummaryRow]:
    """Mean/median score and rank-share distribution per method and budget."""
    if not rows:
        raise ValueError("no benchmark rows to aggregate")
    budgets = sorted({row.k for row in rows})
    n_methods = len(methods)
    out: list[SummaryRow] = []
    for method in methods:
        for k in budgets:
            cell = [row for row in rows if row.method == method and row.k == k]
            if not cell:
                continue
            scores = [row.score for row in cell]
            share = [sum(1 for row in cell if row.rank == r) / len(cell)
                     for r in range(1, n_methods + 1)]
            out.append(SummaryRow(method=method, k=k,
                                  mean=sum(scores) / len(scores),
                                  median=float(statistics.median(scores)),
                                  rank_share=share))
    return out


def write_report(rows: list[BenchmarkRow], path: str | Path) -> None:
    ordered = sorted(rows, key=lambda r: (r.query_id, r.k, r.method))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["query_id", "method", "k", "score", "rank"])
        for row in ordered:
            writer.writerow([row.query_id, row.method, row.k, row.score, row.rank])


def write_summary(summaries: list[SummaryRow], path: str | Path) -> None:
    if not summaries:
        raise ValueError("no summary rows to write")
    n_ranks = len(summaries[0].rank_share)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["method", "k", "mean", "median"]
                        + [f"rank_share_{r}" for r in range(1, n_ranks + 1)])
        for summary in summaries:
            writer.writerow([summary.method, summary.k,
                             f"{summary.mean:.6f}", f"{summary.median:.6f}"]
                            + [f"{share:.6f}" for share in summary.rank_share])


def run_and_report(index: TextIndex, lake: TableLake, store: NuggetStore,
                   queries: list[BenchmarkQuery], out_dir: str | Path,
                   methods: tuple[str, ...] = DEFAULT_METHODS,
                   budgets: tuple[int, ...] = DEFAULT_BUDGETS,
                   semantic_for_structured: str = "dense") -> list[BenchmarkRow]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_benchmark(index, lake, store, queries, methods, budgets,
                         semantic_for_structured)
    write_report(rows, out / "report.csv")
    write_summary(aggregate(rows, methods), out / "summary.csv")
    return rows
