"""Synthetic corpora for tests, demos, and the benchmark stand-in.

Three families live here: seeded random lakes for oracle-equivalence
checks, a hand-written card mirroring a public quantized-model card with
a base-model tag and one leaderboard row, and a five-theme separation
lake built so benchmark evidence is spread across unionable tables of
distinct cards.

Separation lake layout (25 cards, 40 tables): each theme has one overview
card holding two seed tables, two table-less discussion cards whose text
closely echoes the theme query, and two results cards holding three
evidence tables each.  All tables of a theme share one two-column schema
(benchmark name, metric) with cell values unique lake-wide, and schemas
differ across themes, so a unionable walk from the overview card's seed
tables reaches exactly the theme's evidence tables.  Dense retrieval
favors the wordy discussion cards, which carry no evidence at all.

Run ``python -m modellake.fixtures --out DIR`` to write the separation
lake and the 25-query stand-in file in the ingestable formats.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .lake import Cell, Corpus, EvidenceTable, ModelCard, TableLake

logger = logging.getLogger(__name__)

_TEXT_POOL = (
    "model benchmark dataset evaluation accuracy training inference latency "
    "tokens quantized transformer decoder encoder language vision speech "
    "robust scaling checkpoint release weights open fine tuned instruct chat "
    "reasoning code math knowledge retrieval summary translation ranking"
).split()

_HEADER_POOL = (
    "model", "benchmark", "dataset", "accuracy", "f1", "latency", "task",
    "size", "split", "score", "epoch", "rank", "params", "speed",
)

_VALUE_POOL = (
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "theta", "kappa",
    "lambda", "sigma", "omega", "orion", "vega", "lyra", "atlas", "nova",
    "pixel", "quartz", "raven", "sable",
)


def random_table(rng: random.Random, table_id: str, card_ids: list[str] | None = None,
                 max_rows: int = 20, max_cols: int = 10) -> EvidenceTable:
    n_cols = rng.randint(1, max_cols)
    n_rows = rng.randint(1, max_rows)
    headers = [rng.choice(_HEADER_POOL) for _ in range(n_cols)]
    numeric = [rng.random() < 0.4 for _ in range(n_cols)]
    rows: list[list[Cell]] = []
    for _ in range(n_rows):
        row: list[Cell] = []
        for j in range(n_cols):
            if rng.random() < 0.1:
                row.append(None)
            elif numeric[j]:
                row.append(round(rng.uniform(0, 100), 2) if rng.random() < 0.5
                           else rng.randint(0, 100))
            else:
                row.append(rng.choice(_VALUE_POOL))
        rows.append(row)
    return EvidenceTable(id=table_id, headers=headers, rows=rows,
                         card_ids=list(card_ids or []))


def random_lake(rng: random.Random, n_tables: int,
                max_rows: int = 20, max_cols: int = 10) -> TableLake:
    return TableLake(
        random_table(rng, f"t{i:03d}", max_rows=max_rows, max_cols=max_cols)
        for i in range(n_tables)
    )


def random_corpus_with_lake(rng: random.Random, n_cards: int,
                            n_tables: int) -> tuple[Corpus, TableLake]:
    """Cards with random text; tables randomly owned by one or two cards.
    At least one card always ends up with a table."""
    card_ids = [f"c{i:02d}" for i in range(n_cards)]
    texts = {
        cid: " ".join(rng.choices(_TEXT_POOL, k=rng.randint(5, 25)))
        for cid in card_ids
    }
    table_ids_by_card: dict[str, list[str]] = {cid: [] for cid in card_ids}
    tables = []
    for i in range(n_tables):
        owners = rng.sample(card_ids, rng.randint(1, min(2, n_cards)))
        table = random_table(rng, f"t{i:03d}", owners)
        tables.append(table)
        for owner in owners:
            table_ids_by_card[owner].append(table.id)
    cards = [
        ModelCard(id=cid, text=texts[cid], tags=[], table_ids=table_ids_by_card[cid])
        for cid in card_ids
    ]
    return Corpus(cards), TableLake(tables)


def random_query(rng: random.Random) -> str:
    return " ".join(rng.choices(_TEXT_POOL, k=rng.randint(2, 6)))


def kimi_card() -> tuple[ModelCard, list[EvidenceTable]]:
    """A quantized instruct model card: base-model lineage in tags, a 4-bit
    marker, and a leaderboard table with a LiveCodeBench v6 Pass@1 row."""
    card_id = "luisra/Kimi-K2-Instruct-4bit"
    table = EvidenceTable(
        id=f"{card_id}::t0",
        headers=["Benchmark", "Pass@1"],
        rows=[
            ["LiveCodeBench v6", 0.537],
            ["AIME 2025", 0.498],
        ],
        card_ids=[card_id],
    )
    card = ModelCard(
        id=card_id,
        text=(
            "4-bit quantized build of the Kimi-K2-Instruct model for local "
            "inference. Evaluation scores are carried over from the upstream "
            "release and reported below."
        ),
        tags=["base_model:moonshotai/Kimi-K2-Instruct", "4-bit"],
        table_ids=[table.id],
    )
    return card, [table]


@dataclass
class SeparationTheme:
    key: str
    topic: str
    benchmark_token: str
    benchmarks: list[str]
    headers: list[str]
    query_text: str


@dataclass
class SeparationFixture:
    corpus: Corpus
    lake: TableLake
    themes: list[SeparationTheme]
    queries: list[tuple[str, str]] = field(default_factory=list)


_THEMES = (
    SeparationTheme(
        key="code", topic="code generation", benchmark_token="humaneval",
        benchmarks=["HumanEval", "MBPP", "CodeContests"],
        headers=["Code Benchmark", "Pass Rate"],
        query_text="Could you recommend papers evaluated on HumanEval for code generation?",
    ),
    SeparationTheme(
        key="knowledge", topic="broad knowledge exams", benchmark_token="mmlu",
        benchmarks=["MMLU", "AGIEval", "ARC Challenge"],
        headers=["Knowledge Benchmark", "Exam Score"],
        query_text="Which publications report results evaluated on MMLU for broad knowledge exams?",
    ),
    SeparationTheme(
        key="arith", topic="grade school arithmetic", benchmark_token="gsm8k",
        benchmarks=["GSM8K", "AQuA", "SVAMP"],
        headers=["Word Problem Benchmark", "Solve Rate"],
        query_text="Are there studies evaluated on GSM8K for grade school arithmetic?",
    ),
    SeparationTheme(
        key="commonsense", topic="commonsense completion", benchmark_token="hellaswag",
        benchmarks=["HellaSwag", "WinoGrande", "PIQA"],
        headers=["Commonsense Benchmark", "Choice Score"],
        query_text="Looking for literature evaluated on HellaSwag for commonsense completion.",
    ),
    SeparationTheme(
        key="qa", topic="question answering truthfulness", benchmark_token="truthfulqa",
        benchmarks=["TruthfulQA", "BoolQ", "NaturalQA"],
        headers=["QA Benchmark", "Truth Score"],
        query_text="Recommend articles evaluated on TruthfulQA for question answering truthfulness.",
    ),
)


def separation_fixture() -> SeparationFixture:
    cards: list[ModelCard] = []
    tables: list[EvidenceTable] = []
    value_counter = 0

    def next_value() -> float:
        nonlocal value_counter
        value_counter += 1
        return round(0.30 + 0.003 * value_counter, 3)

    def theme_table(card_id: str, index: int, theme: SeparationTheme) -> EvidenceTable:
        table = EvidenceTable(
            id=f"{card_id}::t{index}",
            headers=list(theme.headers),
            rows=[[name, next_value()] for name in theme.benchmarks],
            card_ids=[card_id],
        )
        tables.append(table)
        return table

    queries: list[tuple[str, str]] = []
    for theme in _THEMES:
        echo = theme.query_text.rstrip("?.").lower()

        overview_id = f"{theme.key}-overview"
        seed_tables = [theme_table(overview_id, i, theme) for i in range(2)]
        cards.append(ModelCard(
            id=overview_id,
            text=(
                f"{echo}. This overview recommends models evaluated on "
                f"{theme.benchmarks[0]} for {theme.topic} and keeps the "
                f"tracked results below."
            ),
            tags=[],
            table_ids=[t.id for t in seed_tables],
        ))

        for i in range(2):
            cards.append(ModelCard(
                id=f"{theme.key}-chat-{i}",
                text=(
                    f"{echo}? Community thread {i} asking: {echo}. People "
                    f"recommend models evaluated on {theme.benchmarks[0]} "
                    f"for {theme.topic} but nobody posted numbers."
                ),
                tags=[],
                table_ids=[],
            ))

        for j in range(2):
            results_id = f"{theme.key}-results-{j}"
            result_tables = [theme_table(results_id, n, theme) for n in range(3)]
            cards.append(ModelCard(
                id=results_id,
                text=f"Nightly sweep export {j}. Raw harness logs, runs archived.",
                tags=[],
                table_ids=[t.id for t in result_tables],
            ))

        queries.append((f"q-{theme.key}", theme.query_text))

    return SeparationFixture(corpus=Corpus(cards), lake=TableLake(tables),
                             themes=list(_THEMES), queries=queries)


def synthetic_queries() -> list[tuple[str, str]]:
    """25 stand-in queries in the benchmark file shape, intent-diverse."""
    out = list(separation_fixture().queries)
    extra = [
        ("q-cmp-1", "Which model is better on MMLU, an instruct model or a chat model?"),
        ("q-cmp-2", "Compare papers evaluated on HumanEval versus MBPP."),
        ("q-cmp-3", "Is a quantized model better than the base model on GSM8K?"),
        ("q-ins-1", "How do I evaluate a model on HellaSwag step by step?"),
        ("q-ins-2", "How to reproduce TruthfulQA numbers? A guide would help."),
        ("q-rea-1", "Why do models lose accuracy under 4-bit quantization?"),
        ("q-rea-2", "Explain the reason quantized models regress on GSM8K."),
        ("q-exp-1", "What experiences do people have with models evaluated on MMLU?"),
        ("q-exp-2", "Any feedback from teams who tried 4-bit quantized models?"),
        ("q-deb-1", "Should I trust leaderboard results for picking models? Pros and cons."),
        ("q-deb-2", "Is it worth running GSM8K privately? Debate welcome."),
        ("q-evd-1", "Could you recommend studies with strong HumanEval results?"),
        ("q-evd-2", "Recommend literature on quantized 4-bit models with GSM8K scores."),
        ("q-evd-3", "Which publications evaluate on TruthfulQA and report results?"),
        ("q-evd-4", "Papers about models fine tuned from a base model with MMLU numbers."),
        ("q-evd-5", "Looking for articles evaluated on HellaSwag commonsense completion."),
        ("q-evd-6", "Models evaluated on AGIEval exams."),
        ("q-evd-7", "Models with PIQA results in the WinoGrande family of tasks."),
        ("q-evd-8", "Which models report BoolQ and TruthfulQA together?"),
        ("q-vag-1", "Strong general purpose models with reported results."),
    ]
    out.extend(extra)
    assert len(out) == 25
    return out


def write_fixture_files(out_dir: str | Path) -> dict:
    """Write the separation lake and the stand-in queries in ingestable form."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    fixture = separation_fixture()
    kimi, kimi_tables = kimi_card()

    cards_path = out / "cards.jsonl"
    tables_path = out / "tables.jsonl"
    queries_path = out / "queries.jsonl"

    with open(cards_path, "w", encoding="utf-8") as handle:
        for card in fixture.corpus:
            handle.write(json.dumps(card.to_record(), ensure_ascii=False) + "\n")
        handle.write(json.dumps(kimi.to_record(), ensure_ascii=False) + "\n")
    with open(tables_path, "w", encoding="utf-8") as handle:
        for table in fixture.lake:
            handle.write(json.dumps(table.to_record(), ensure_ascii=False) + "\n")
        for table in kimi_tables:
            handle.write(json.dumps(table.to_record(), ensure_ascii=False) + "\n")
    with open(queries_path, "w", encoding="utf-8") as handle:
        for qid, text in synthetic_queries():
            handle.write(json.dumps({"id": qid, "text": text}, ensure_ascii=False) + "\n")

    return {
        "cards": len(fixture.corpus) + 1,
        "tables": len(fixture.lake) + len(kimi_tables),
        "queries": len(synthetic_queries()),
        "out_dir": str(out),
    }


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m modellake.fixtures",
        description="Write the demo lake and stand-in benchmark queries.",
    )
    parser.add_argument("--out", required=True, help="output directory")
    args = parser.parse_args(argv)
    summary = write_fixture_files(args.out)
    print(json.dumps(summary, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
