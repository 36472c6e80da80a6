"""Command line interface.

Subcommands: ingest, search, discover, pipeline, integrate, nuggets,
bench, serve.  Commands that read an index take --index-dir; JSON output
via --format json matches the HTTP service bodies field for field.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .bench import (
    DEFAULT_BUDGETS,
    DEFAULT_METHODS,
    aggregate,
    load_queries,
    prepare_queries,
    run_benchmark,
    write_report,
    write_summary,
)
from .discovery import OPERATORS, discover
from .errors import ModelLakeError
from .integration import integrate_all, to_csv, to_markdown
from .nuggets import map_query, score_candidate_set
from .pipeline import PipelineConfig, run_structured, run_unstructured
from .service import ServiceConfig, build_index, load_state, serve
from .text_index import SEMANTIC_METHODS

logger = logging.getLogger(__name__)


def _print_json(record: dict) -> None:
    print(json.dumps(record, indent=2, ensure_ascii=False))


def _cmd_ingest(args: argparse.Namespace) -> int:
    meta = build_index(args.cards, args.tables, args.out)
    _print_json(meta)
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    state = load_state(args.index_dir)
    result = run_unstructured(state.index, args.q, args.method, args.k)
    record = {
        "query": args.q,
        "method": args.method,
        "k": args.k,
        "results": [{"card_id": c.card_id, "score": c.score} for c in result.cards],
    }
    if args.format == "json":
        _print_json(record)
    else:
        for entry in record["results"]:
            print(f"{entry['card_id']}\t{entry['score']:.6f}")
    return 0


def _cmd_discover(args: argparse.Namespace) -> int:
    state = load_state(args.index_dir)
    anchor = state.lake.get(args.anchor_table)
    scored = discover(anchor, state.lake, args.operator, args.k)
    record = {
        "anchor_table": args.anchor_table,
        "operator": args.operator,
        "k": args.k,
        "results": [{"table_id": s.table_id, "score": s.score} for s in scored],
    }
    if args.format == "json":
        _print_json(record)
    else:
        for entry in record["results"]:
            print(f"{entry['table_id']}\t{entry['score']}")
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    state = load_state(args.index_dir)
    config = PipelineConfig(semantic_method=args.semantic, operator=args.operator,
                            k=args.k, discovery_k=max(args.discovery_k, args.k),
                            anchor_count=args.anchors)
    result = run_structured(state.index, state.lake, args.q, config)
    record = result.to_record()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            json.dump(record, handle, indent=2, ensure_ascii=False)
            handle.write("\n")
    if args.format == "json" or not args.out:
        if args.format == "json":
            _print_json(record)
        else:
            for card in record["cards"]:
                tables = ",".join(card["table_ids"])
                print(f"{card['card_id']}\t{card['score']:.6f}\t{tables}")
    return 0


def _cmd_integrate(args: argparse.Namespace) -> int:
    state = load_state(args.index_dir)
    anchor = state.lake.get(args.anchor_table)
    ids = [part for part in (p.strip() for p in args.tables.split(",")) if part]
    retrieved = [state.lake.get(tid) for tid in ids]
    view = integrate_all(anchor, retrieved)
    if args.format == "csv":
        print(to_csv(view), end="")
    else:
        print(to_markdown(view), end="")
    return 0


def _cmd_nuggets_extract(args: argparse.Namespace) -> int:
    state = load_state(args.index_dir)
    if args.card:
        card_ids = [args.card]
    else:
        card_ids = state.store.card_ids()
    lines = []
    for card_id in card_ids:
        for nugget in state.store.nuggets_for(card_id):
            lines.append(json.dumps(nugget.to_record(), ensure_ascii=False))
    payload = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(payload)
        print(f"wrote {len(lines)} nuggets to {args.out}")
    else:
        print(payload, end="")
    return 0


def _cmd_nuggets_score(args: argparse.Namespace) -> int:
    state = load_state(args.index_dir)
    with open(args.result, encoding="utf-8") as handle:
        record = json.load(handle)
    card_ids = [card["card_id"] for card in record.get("cards", [])]
    constraint = map_query(args.q)
    score = score_candidate_set(card_ids, constraint, state.store)
    _print_json({
        "query": args.q,
        "cards": card_ids,
        "score": score,
        "constraint": constraint.to_record()["attributes"],
        "audit_id": constraint.audit.audit_id,
    })
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    state = load_state(args.index_dir)
    budgets = tuple(int(part) for part in args.budgets.split(","))
    methods = tuple(args.methods.split(",")) if args.methods else DEFAULT_METHODS
    queries = prepare_queries(load_queries(args.queries))
    rows = run_benchmark(state.index, state.lake, state.store, queries,
                         methods=methods, budgets=budgets,
                         semantic_for_structured=args.semantic)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(rows, out / "report.csv")
    write_summary(aggregate(rows, methods), out / "summary.csv")
    failed = sum(1 for row in rows if row.failed)
    print(f"wrote {len(rows)} rows to {out}/report.csv ({failed} failed cells)")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    serve(ServiceConfig(index_dir=Path(args.index_dir), host=args.host, port=args.port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modellake",
                                     description="Search over a lake of model cards and evidence tables.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build an index directory from card and table files")
    p.add_argument("--cards", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("search", help="text-only retrieval over cards")
    p.add_argument("--q", required=True)
    p.add_argument("--method", choices=SEMANTIC_METHODS, default="dense")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--index-dir", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("discover", help="table discovery from an anchor table")
    p.add_argument("--anchor-table", required=True)
    p.add_argument("--operator", choices=OPERATORS, default="unionable")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--index-dir", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("pipeline", help="table-routed retrieval")
    p.add_argument("--q", required=True)
    p.add_argument("--semantic", choices=SEMANTIC_METHODS, default="dense")
    p.add_argument("--operator", choices=OPERATORS, default="unionable")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--discovery-k", type=int, default=20)
    p.add_argument("--anchors", type=int, default=1)
    p.add_argument("--index-dir", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="also write the JSON result to this file")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("integrate", help="orientation-aware table integration")
    p.add_argument("--anchor-table", required=True)
    p.add_argument("--tables", default="", help="comma-separated table ids")
    p.add_argument("--format", choices=("csv", "markdown"), default="markdown")
    p.add_argument("--index-dir", required=True)
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("nuggets", help="nugget extraction and scoring")
    nested = p.add_subparsers(dest="nuggets_command", required=True)
    pe = nested.add_parser("extract", help="print extracted nuggets")
    pe.add_argument("--card", help="single card id; omit for all cards")
    pe.add_argument("--out", help="write line-delimited records here")
    pe.add_argument("--index-dir", required=True)
    pe.set_defaults(func=_cmd_nuggets_extract)
    ps = nested.add_parser("score", help="score a saved retrieval result")
    ps.add_argument("--result", required=True, help="JSON file from pipeline --out")
    ps.add_argument("--q", required=True)
    ps.add_argument("--index-dir", required=True)
    ps.set_defaults(func=_cmd_nuggets_score)

    p = sub.add_parser("bench", help="run the benchmark harness")
    p.add_argument("--queries", required=True)
    p.add_argument("--budgets", default=",".join(str(b) for b in DEFAULT_BUDGETS))
    p.add_argument("--methods", default="")
    p.add_argument("--semantic", choices=SEMANTIC_METHODS, default="dense",
                   help="anchoring method for structured rows")
    p.add_argument("--out", required=True)
    p.add_argument("--index-dir", required=True)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--index-dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def cli_dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelLakeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return cli_dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())
