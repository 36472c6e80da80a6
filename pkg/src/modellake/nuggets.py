"""Atomic evidence units extracted from model cards, and query constraints.

A nugget is a six-attribute tuple (model, base_model, model_variant,
dataset, metric_name, metric_value) plus a card_id recording where it was
extracted.  Values are stored in display form; deduplication and matching
both work on the normalized six-attribute projection, so "Pass@1" and
"pass 1" are the same evidence.

Query mapping turns free text into per-attribute constraints: irrelevant,
required_nonnull, or must_contain with normalized terms.  Extraction and
mapping use the completion provider when configured and an auditable
deterministic fallback otherwise.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .discovery import is_numeric_column
from .errors import ConstraintError, MissingCardError, ProviderError
from .lake import Corpus, EvidenceTable, ModelCard, TableLake, cell_text, normalize_token, normalize_value
from .providers import AuditRecord, CompletionProvider

logger = logging.getLogger(__name__)

NUGGET_ATTRS = ("model", "base_model", "model_variant", "dataset", "metric_name", "metric_value")

IRRELEVANT = "irrelevant"
REQUIRED_NONNULL = "required_nonnull"
MUST_CONTAIN = "must_contain"

_CONSTRAINT_KINDS = (IRRELEVANT, REQUIRED_NONNULL, MUST_CONTAIN)

# Single-token benchmark and dataset names recognized by the fallback mapper.
BENCHMARK_LEXICON = frozenset({
    "mmlu", "gsm8k", "humaneval", "hellaswag", "livecodebench", "truthfulqa",
    "winogrande", "arc", "boolq", "piqa", "mbpp", "squad", "glue", "imagenet",
    "wikitext", "agieval", "math", "codecontests", "aqua",
})

# Metric names the fallback mapper constrains on when mentioned.
METRIC_LEXICON = frozenset({
    "accuracy", "f1", "bleu", "rouge", "perplexity", "precision", "recall",
})

_QUANT_TOKENS = frozenset({"quantization", "quantized", "quantize", "awq", "gptq", "gguf"})
_QUANT_TAG_RE = re.compile(r"^(\d+)[-_ ]?bits?$", re.IGNORECASE)
_BITS_TOKEN_RE = re.compile(r"^(\d+)bits?$")
_LINEAGE_TOKENS = frozenset({"finetuned", "finetune", "finetunes", "lineage", "derivative"})


@dataclass
class Nugget:
    model: str | None = None
    base_model: str | None = None
    model_variant: str | None = None
    dataset: str | None = None
    metric_name: str | None = None
    metric_value: str | None = None
    card_id: str = ""

    def __post_init__(self) -> None:
        if all(getattr(self, attr) is None for attr in NUGGET_ATTRS):
            raise ValueError("nugget must have at least one non-null attribute")

    def projection(self) -> tuple[str | None, ...]:
        """Normalized six-attribute identity used for dedup and matching."""
        return tuple(normalize_value(getattr(self, attr)) for attr in NUGGET_ATTRS)

    def to_record(self) -> dict:
        record = {attr: getattr(self, attr) for attr in NUGGET_ATTRS}
        record["card_id"] = self.card_id
        return record


@dataclass
class AttributeRule:
    kind: str = IRRELEVANT
    terms: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.kind not in _CONSTRAINT_KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind == MUST_CONTAIN and not self.terms:
            raise ValueError("must_contain rule needs at least one term")
        if self.kind != MUST_CONTAIN and self.terms:
            raise ValueError(f"{self.kind} rule takes no terms")


@dataclass
class QueryConstraint:
    attributes: dict[str, AttributeRule]
    raw_query: str
    audit: AuditRecord

    def __post_init__(self) -> None:
        missing = [attr for attr in NUGGET_ATTRS if attr not in self.attributes]
        if missing:
            raise ValueError(f"constraint missing attributes: {missing}")
        if all(rule.kind == IRRELEVANT for rule in self.attributes.values()):
            raise ConstraintError(f"query {self.raw_query!r} maps to no attribute constraints")

    def to_record(self) -> dict:
        return {
            "raw_query": self.raw_query,
            "attributes": {
                attr: {"kind": rule.kind, "terms": list(rule.terms)}
                for attr, rule in self.attributes.items()
            },
            "audit_id": self.audit.audit_id,
        }


def _projection_matches(projection: tuple[str | None, ...], constraint: QueryConstraint) -> bool:
    for attr, value in zip(NUGGET_ATTRS, projection):
        rule = constraint.attributes[attr]
        if rule.kind == IRRELEVANT:
            continue
        if value is None:
            return False
        if rule.kind == MUST_CONTAIN:
            tokens = set(value.split())
            if not all(term in tokens for term in rule.terms):
                return False
    return True


def matches(nugget: Nugget, constraint: QueryConstraint) -> bool:
    """Per-attribute conjunction: irrelevant passes, required_nonnull needs a
    value, must_contain needs every term among the value's tokens."""
    return _projection_matches(nugget.projection(), constraint)


class NuggetStore:
    """Append-only nugget sets keyed by card id."""

    def __init__(self) -> None:
        self._by_card: dict[str, list[Nugget]] = {}

    def has_card(self, card_id: str) -> bool:
        return card_id in self._by_card

    def add_card(self, card_id: str, nuggets: list[Nugget]) -> None:
        if card_id in self._by_card:
            raise ValueError(f"card {card_id!r} already has extracted nuggets")
        self._by_card[card_id] = list(nuggets)

    def nuggets_for(self, card_id: str) -> list[Nugget]:
        try:
            return list(self._by_card[card_id])
        except KeyError:
            raise MissingCardError(f"no nuggets extracted for card {card_id!r}") from None

    def card_ids(self) -> list[str]:
        return list(self._by_card)

    def __len__(self) -> int:
        return sum(len(n) for n in self._by_card.values())

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            for card_id in self._by_card:
                for nugget in self._by_card[card_id]:
                    handle.write(json.dumps(nugget.to_record(), ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "NuggetStore":
        store = cls()
        grouped: dict[str, list[Nugget]] = {}
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                card_id = record.pop("card_id", "")
                grouped.setdefault(card_id, []).append(Nugget(card_id=card_id, **record))
        for card_id, nuggets in grouped.items():
            store.add_card(card_id, nuggets)
        return store


def _prompt(name: str) -> str:
    return resources.files("modellake").joinpath(f"prompts/{name}.txt").read_text(encoding="utf-8")


def _tables_markdown(tables: list[EvidenceTable]) -> str:
    parts = []
    for table in tables:
        lines = ["| " + " | ".join(table.headers) + " |",
                 "| " + " | ".join("---" for _ in table.headers) + " |"]
        for row in table.rows:
            lines.append("| " + " | ".join(cell_text(c) for c in row) + " |")
        parts.append("\n".join(lines))
    return "\n\n".join(parts)


def _extract_with_provider(card: ModelCard, tables: list[EvidenceTable],
                           provider: CompletionProvider) -> list[Nugget]:
    prompt = _prompt("nugget_extraction").format(
        card_id=card.id,
        card_text=card.text,
        tags=", ".join(card.tags),
        tables=_tables_markdown(tables),
    )
    output = provider.complete(prompt)
    try:
        records = json.loads(output)
        nuggets = []
        for record in records:
            values = {attr: record.get(attr) for attr in NUGGET_ATTRS}
            for attr, value in values.items():
                if value is not None and not isinstance(value, str):
                    values[attr] = str(value)
            nuggets.append(Nugget(card_id=card.id, **values))
    except (ValueError, TypeError, AttributeError) as exc:
        raise ProviderError(f"extractor returned unparseable nuggets for {card.id!r}: {exc}") from exc
    return nuggets


def _nuggets_from_tags(card: ModelCard) -> list[Nugget]:
    out: list[Nugget] = []
    for tag in card.tags:
        tag = tag.strip()
        if not tag:
            continue
        lowered = tag.lower()
        if ":" in tag:
            key, _, value = tag.partition(":")
            key = key.strip().lower()
            value = value.strip()
            if not value:
                continue
            if key == "base_model":
                out.append(Nugget(model=card.id, base_model=value, card_id=card.id))
            elif key == "variant":
                out.append(Nugget(model=card.id, model_variant=value, card_id=card.id))
            elif key == "dataset":
                out.append(Nugget(model=card.id, dataset=value, card_id=card.id))
            continue
        bits = _QUANT_TAG_RE.match(lowered)
        if bits:
            out.append(Nugget(model=card.id, model_variant="quantization",
                              metric_name="quantization bits", metric_value=tag,
                              card_id=card.id))
        elif any(token in _QUANT_TOKENS for token in normalize_token(lowered)):
            out.append(Nugget(model=card.id, model_variant="quantization", card_id=card.id))
    return out


def _nuggets_from_table(card: ModelCard, table: EvidenceTable) -> list[Nugget]:
    """Leaderboard reading: first column keys the row, numeric columns are
    metrics, one nugget per (row, metric column) with a non-null cell."""
    if table.n_cols() < 2:
        return []
    metric_cols = [j for j in range(1, table.n_cols()) if is_numeric_column(table.column(j))]
    out: list[Nugget] = []
    for row in table.rows:
        key = row[0]
        dataset = cell_text(key).strip() or None
        for j in metric_cols:
            cell = row[j]
            if cell is None:
                continue
            out.append(Nugget(
                model=card.id,
                dataset=dataset,
                metric_name=table.headers[j].strip(),
                metric_value=cell_text(cell),
                card_id=card.id,
            ))
    return out


def extract_nuggets(card: ModelCard, tables: list[EvidenceTable],
                    provider: CompletionProvider | None = None) -> list[Nugget]:
    """All nuggets for one card.

    With a provider, the full card is handed to the prompt-based extractor
    and transport errors propagate.  The fallback reads card tags
    (base_model:/variant:/dataset: prefixes, quantization markers) and
    leaderboard-style tables, and never errors.
    """
    if provider is not None:
        return _extract_with_provider(card, tables, provider)
    nuggets = _nuggets_from_tags(card)
    for table in tables:
        nuggets.extend(_nuggets_from_table(card, table))
    return nuggets


def build_store(corpus: Corpus, lake: TableLake,
                provider: CompletionProvider | None = None) -> NuggetStore:
    """Extract nuggets for every card, feeding each card its lake tables."""
    store = NuggetStore()
    for card in corpus:
        tables = [lake.get(tid) for tid in card.table_ids if tid in lake]
        store.add_card(card.id, extract_nuggets(card, tables, provider))
    return store


def _map_with_provider(query: str, provider: CompletionProvider) -> QueryConstraint:
    prompt = _prompt("query_mapping").format(query=query)
    output = provider.complete(prompt)
    try:
        payload = json.loads(output)
        attributes = {}
        for attr in NUGGET_ATTRS:
            spec = payload.get(attr, {"kind": IRRELEVANT})
            terms = spec.get("terms", [])
            normalized: list[str] = []
            for term in terms:
                normalized.extend(normalize_token(str(term)))
            attributes[attr] = AttributeRule(kind=spec.get("kind", IRRELEVANT), terms=normalized)
    except (ValueError, TypeError, AttributeError) as exc:
        raise ProviderError(f"query mapper returned an unparseable constraint: {exc}") from exc
    audit = AuditRecord(prompt_input=prompt, provider_output=output,
                        post_processed=json.dumps({a: {"kind": r.kind, "terms": r.terms}
                                                   for a, r in attributes.items()}),
                        provider_name=provider.name)
    return QueryConstraint(attributes=attributes, raw_query=query, audit=audit)


def _find_bits(tokens: list[str]) -> str | None:
    for i, token in enumerate(tokens):
        compact = _BITS_TOKEN_RE.match(token)
        if compact:
            return compact.group(1)
        if token.isdigit() and i + 1 < len(tokens) and tokens[i + 1] in ("bit", "bits"):
            return token
    return None


def map_query(query: str, provider: CompletionProvider | None = None) -> QueryConstraint:
    """Map free text to per-attribute constraints.

    Fallback lexicon: benchmark names constrain dataset, metric names
    constrain metric_name, quantization wording constrains model_variant
    (and metric_value when a bit width is named), lineage wording requires
    base_model.  A query hitting nothing maps to the broad form: dataset
    and metric_name required_nonnull.
    """
    if provider is not None:
        return _map_with_provider(query, provider)

    tokens = normalize_token(query)
    if not tokens:
        raise ConstraintError("empty query: no attribute constraint derivable")

    attributes = {attr: AttributeRule() for attr in NUGGET_ATTRS}

    bench_terms = list(dict.fromkeys(t for t in tokens if t in BENCHMARK_LEXICON))
    if bench_terms:
        attributes["dataset"] = AttributeRule(kind=MUST_CONTAIN, terms=bench_terms)

    metric_terms = list(dict.fromkeys(t for t in tokens if t in METRIC_LEXICON))
    if metric_terms:
        attributes["metric_name"] = AttributeRule(kind=MUST_CONTAIN, terms=metric_terms)

    bits = _find_bits(tokens)
    if bits or any(t in _QUANT_TOKENS for t in tokens):
        attributes["model_variant"] = AttributeRule(kind=MUST_CONTAIN, terms=["quantization"])
        if bits:
            attributes["metric_value"] = AttributeRule(kind=MUST_CONTAIN, terms=[bits, "bit"])

    has_base_model = any(tokens[i] == "base" and tokens[i + 1] == "model"
                         for i in range(len(tokens) - 1))
    if has_base_model or any(t in _LINEAGE_TOKENS for t in tokens):
        attributes["base_model"] = AttributeRule(kind=REQUIRED_NONNULL)

    if all(rule.kind == IRRELEVANT for rule in attributes.values()):
        attributes["dataset"] = AttributeRule(kind=REQUIRED_NONNULL)
        attributes["metric_name"] = AttributeRule(kind=REQUIRED_NONNULL)

    post = json.dumps({attr: {"kind": rule.kind, "terms": rule.terms}
                       for attr, rule in attributes.items()})
    audit = AuditRecord(prompt_input=query, provider_output="",
                        post_processed=post, provider_name="lexicon-fallback")
    return QueryConstraint(attributes=attributes, raw_query=query, audit=audit)


def score_candidate_set(card_ids: list[str], constraint: QueryConstraint,
                        store: NuggetStore) -> int:
    """Count distinct matching six-attribute projections across the set.

    Union first (set semantics over projections), then filter by the
    constraint, then count, so evidence shared by several retrieved cards
    is counted once.
    """
    projections: set[tuple[str | None, ...]] = set()
    for card_id in dict.fromkeys(card_ids):
        for nugget in store.nuggets_for(card_id):
            projections.add(nugget.projection())
    return sum(1 for projection in projections if _projection_matches(projection, constraint))
