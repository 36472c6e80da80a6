"""Read-only HTTP service over a built index directory.

An index directory is produced offline by the ingest CLI: cards.jsonl,
tables.jsonl, and a meta.json format stamp.  The service loads it once,
builds the text index and nugget store in memory, and serves immutable
state; no endpoint mutates anything.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query

from .discovery import OPERATORS, discover
from .errors import (
    AnchorNotFoundError,
    ConstraintError,
    IngestError,
    MissingCardError,
    MissingTableError,
)
from .integration import integrate_all
from .lake import (
    Corpus,
    TableLake,
    emit_cards,
    emit_tables,
    filter_compact,
    ingest_cards,
    ingest_tables,
    resolve_links,
)
from .nuggets import NuggetStore, build_store, map_query, score_candidate_set
from .pipeline import PipelineConfig, run_structured, run_unstructured
from .providers import default_completion_provider, default_embedding_provider
from .text_index import SEMANTIC_METHODS, TextIndex

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass
class ServiceConfig:
    index_dir: Path
    host: str = "127.0.0.1"
    port: int = 8000
    pipeline_defaults: PipelineConfig = field(default_factory=PipelineConfig)


@dataclass
class LakeState:
    corpus: Corpus
    lake: TableLake
    index: TextIndex
    store: NuggetStore
    meta: dict


def build_index(cards_path: str | Path, tables_path: str | Path,
                out_dir: str | Path) -> dict:
    """Ingest, compact-filter, resolve links, and write an index directory."""
    corpus = ingest_cards(cards_path)
    lake = ingest_tables(tables_path)
    compact = filter_compact(lake)
    corpus, compact, warnings = resolve_links(corpus, compact)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    emit_cards(corpus, out / "cards.jsonl")
    emit_tables(compact, out / "tables.jsonl")
    meta = {
        "format_version": FORMAT_VERSION,
        "cards": len(corpus),
        "tables": len(compact),
        "dropped_tables": len(lake) - len(compact),
        "link_warnings": len(warnings),
    }
    with open(out / "meta.json", "w", encoding="utf-8") as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return meta


def load_state(index_dir: str | Path) -> LakeState:
    index_path = Path(index_dir)
    meta_path = index_path / "meta.json"
    if not meta_path.exists():
        raise IngestError(f"{index_path} is not an index directory (missing meta.json)")
    with open(meta_path, encoding="utf-8") as handle:
        meta = json.load(handle)
    if meta.get("format_version") != FORMAT_VERSION:
        raise IngestError(
            f"index format {meta.get('format_version')!r} unsupported, expected {FORMAT_VERSION}"
        )
    corpus = ingest_cards(index_path / "cards.jsonl")
    lake = ingest_tables(index_path / "tables.jsonl")
    index = TextIndex(corpus, provider=default_embedding_provider())
    store = build_store(corpus, lake, provider=default_completion_provider())
    return LakeState(corpus=corpus, lake=lake, index=index, store=store, meta=meta)


def _split_ids(raw: str) -> list[str]:
    return [part for part in (p.strip() for p in raw.split(",")) if part]


def create_app(state: LakeState, defaults: PipelineConfig | None = None) -> FastAPI:
    app = FastAPI(title="modellake", version="0.1.0")
    base = defaults if defaults is not None else PipelineConfig()

    @app.get("/health")
    def health() -> dict:
        return {
            "status": "ok",
            "cards": len(state.corpus),
            "tables": len(state.lake),
            "format_version": state.meta.get("format_version", FORMAT_VERSION),
        }

    @app.get("/search")
    def search(q: str = Query(...), method: str = Query("dense"),
               k: int = Query(10)) -> dict:
        if method not in SEMANTIC_METHODS:
            raise HTTPException(status_code=400,
                                detail=f"unknown method {method!r}; expected one of {SEMANTIC_METHODS}")
        if k < 1:
            raise HTTPException(status_code=400, detail="k must be at least 1")
        result = run_unstructured(state.index, q, method, k)
        return {
            "query": q,
            "method": method,
            "k": k,
            "results": [{"card_id": c.card_id, "score": c.score} for c in result.cards],
        }

    @app.get("/pipeline")
    def pipeline(q: str = Query(...), semantic: str | None = Query(None),
                 operator: str | None = Query(None), k: int | None = Query(None),
                 discovery_k: int | None = Query(None),
                 anchors: int | None = Query(None)) -> dict:
        try:
            config = PipelineConfig(
                semantic_method=semantic if semantic is not None else base.semantic_method,
                operator=operator if operator is not None else base.operator,
                k=k if k is not None else base.k,
                discovery_k=discovery_k if discovery_k is not None else base.discovery_k,
                anchor_count=anchors if anchors is not None else base.anchor_count,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        try:
            result = run_structured(state.index, state.lake, q, config)
        except AnchorNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return result.to_record()

    @app.get("/card/{card_id:path}")
    def card(card_id: str) -> dict:
        try:
            return state.corpus.get(card_id).to_record()
        except MissingCardError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.get("/table/{table_id:path}")
    def table(table_id: str) -> dict:
        try:
            return state.lake.get(table_id).to_record()
        except MissingTableError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.get("/discover")
    def discover_tables(anchor: str = Query(...), operator: str = Query("unionable"),
                        k: int = Query(10)) -> dict:
        if operator not in OPERATORS:
            raise HTTPException(status_code=400,
                                detail=f"unknown operator {operator!r}; expected one of {OPERATORS}")
        if k < 1:
            raise HTTPException(status_code=400, detail="k must be at least 1")
        try:
            anchor_table = state.lake.get(anchor)
        except MissingTableError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        scored = discover(anchor_table, state.lake, operator, k)
        return {
            "anchor_table": anchor,
            "operator": operator,
            "k": k,
            "results": [{"table_id": s.table_id, "score": s.score} for s in scored],
        }

    @app.get("/integrate")
    def integrate(anchor: str = Query(...), tables: str = Query("")) -> dict:
        try:
            anchor_table = state.lake.get(anchor)
            retrieved = [state.lake.get(tid) for tid in _split_ids(tables)]
        except MissingTableError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        view = integrate_all(anchor_table, retrieved)
        record = view.to_record()
        record["anchor"] = anchor
        record["tables"] = _split_ids(tables)
        return record

    @app.get("/nuggets/score")
    def nuggets_score(q: str = Query(...), cards: str = Query("")) -> dict:
        card_ids = _split_ids(cards)
        try:
            constraint = map_query(q)
        except ConstraintError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        try:
            score = score_candidate_set(card_ids, constraint, state.store)
        except MissingCardError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        record = constraint.to_record()
        return {
            "query": q,
            "cards": card_ids,
            "score": score,
            "constraint": record["attributes"],
            "audit_id": record["audit_id"],
        }

    return app


def serve(config: ServiceConfig) -> None:
    import uvicorn

    state = load_state(config.index_dir)
    app = create_app(state, config.pipeline_defaults)
    logger.info("serving index %s on %s:%d", config.index_dir, config.host, config.port)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
