from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from modellake.errors import IngestError, MissingTableError
from modellake.lake import (
    COMPACT_MAX_COLS,
    COMPACT_MAX_ROWS,
    Corpus,
    EvidenceTable,
    ModelCard,
    TableLake,
    emit_cards,
    emit_tables,
    filter_compact,
    ingest_cards,
    ingest_tables,
    normalize_token,
    normalize_value,
    parse_cell,
    parse_markdown_tables,
    resolve_links,
)


def test_normalize_token_rule_application():
    assert normalize_token("LiveCodeBench v6") == ["livecodebench", "v6"]
    assert normalize_token("") == []
    assert normalize_token("Pass@1") == ["pass", "1"]
    assert normalize_token("snake_case_name") == ["snake", "case", "name"]


@given(st.text(max_size=80))
def test_normalize_token_idempotent_and_clean(text):
    tokens = normalize_token(text)
    assert all(tok and " " not in tok for tok in tokens)
    assert normalize_token(" ".join(tokens)) == tokens


def test_normalize_value_preserves_nullness():
    assert normalize_value(None) is None
    assert normalize_value("Pass@1") == "pass 1"
    assert normalize_value(0.537) == "0 537"
    assert normalize_value("!!!") == ""


def test_parse_cell_typing():
    assert parse_cell("12") == 12 and isinstance(parse_cell("12"), int)
    assert parse_cell("-3") == -3
    assert parse_cell("+4") == 4
    assert parse_cell("0.537") == 0.537 and isinstance(parse_cell("0.537"), float)
    assert parse_cell("85.2%") == 85.2
    assert parse_cell("7%") == 7
    assert parse_cell(" text ") == "text"
    assert parse_cell("1.2.3") == "1.2.3"
    assert parse_cell("") is None
    assert parse_cell("   ") is None


@given(st.integers(min_value=-10**9, max_value=10**9))
def test_parse_cell_int_round_trip(value):
    assert parse_cell(str(value)) == value


@given(st.floats(min_value=-10**6, max_value=10**6, allow_nan=False).map(lambda f: round(f, 4)))
def test_parse_cell_float_round_trip(value):
    parsed = parse_cell(repr(float(value)))
    assert parsed == pytest.approx(float(value))


def _write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")


def test_ingest_cards_round_trip(tmp_path):
    path = tmp_path / "cards.jsonl"
    _write_jsonl(path, [
        {"id": "a", "text": "first card", "tags": ["x"], "table_ids": []},
        {"id": "b", "text": "second card"},
    ])
    corpus = ingest_cards(path)
    assert len(corpus) == 2
    assert corpus.get("a").tags == ["x"]
    assert corpus.get("b").table_ids == []

    out = tmp_path / "roundtrip.jsonl"
    emit_cards(corpus, out)
    again = ingest_cards(out)
    assert [c.to_record() for c in again] == [c.to_record() for c in corpus]


def test_ingest_cards_duplicate_id_named(tmp_path):
    path = tmp_path / "cards.jsonl"
    _write_jsonl(path, [{"id": "a", "text": "x"}, {"id": "a", "text": "y"}])
    with pytest.raises(IngestError, match="'a'"):
        ingest_cards(path)


def test_ingest_cards_malformed_names_line(tmp_path):
    path = tmp_path / "cards.jsonl"
    path.write_text('{"id": "a", "text": "ok"}\n{"id": "b"}\n', encoding="utf-8")
    with pytest.raises(IngestError, match=":2"):
        ingest_cards(path)


def test_ingest_tables_round_trip(tmp_path):
    path = tmp_path / "tables.jsonl"
    _write_jsonl(path, [
        {"id": "t1", "headers": ["model", "acc"],
         "rows": [["m1", 0.5], ["m2", None]], "card_ids": ["a"]},
    ])
    lake = ingest_tables(path)
    assert len(lake) == 1
    assert lake.get("t1").rows[1] == ["m2", None]

    out = tmp_path / "roundtrip.jsonl"
    emit_tables(lake, out)
    again = ingest_tables(out)
    assert [t.to_record() for t in again] == [t.to_record() for t in lake]


def test_ingest_tables_ragged_row_names_table(tmp_path):
    path = tmp_path / "tables.jsonl"
    _write_jsonl(path, [
        {"id": "bad", "headers": ["a", "b"], "rows": [["x", 1, 2]], "card_ids": ["c"]},
    ])
    with pytest.raises(IngestError, match="'bad'"):
        ingest_tables(path)


def _table(table_id, n_rows, n_cols):
    return EvidenceTable(
        id=table_id,
        headers=[f"h{j}" for j in range(n_cols)],
        rows=[[f"v{i}" for _ in range(n_cols)] for i in range(n_rows)],
        card_ids=["c"],
    )


def test_filter_compact_boundary():
    lake = TableLake([
        _table("keep", COMPACT_MAX_ROWS - 1, COMPACT_MAX_COLS - 1),
        _table("too-tall", COMPACT_MAX_ROWS, COMPACT_MAX_COLS - 1),
        _table("too-wide", COMPACT_MAX_ROWS - 1, COMPACT_MAX_COLS),
    ])
    kept = filter_compact(lake)
    assert kept.ids() == ["keep"]


def test_filter_compact_idempotent_order_preserving():
    lake = TableLake([_table(f"t{i}", 2, 2) for i in range(5)] + [_table("big", 250, 3)])
    once = filter_compact(lake)
    twice = filter_compact(once)
    assert once.ids() == twice.ids() == [f"t{i}" for i in range(5)]


def test_resolve_links_drops_dangling_and_warns():
    corpus = Corpus([
        ModelCard(id="a", text="x", table_ids=["t1", "ghost"]),
        ModelCard(id="b", text="y", table_ids=[]),
    ])
    lake = TableLake([
        EvidenceTable(id="t1", headers=["h"], rows=[["v"]], card_ids=["a", "missing"]),
        EvidenceTable(id="orphan", headers=["h"], rows=[["v"]], card_ids=["missing"]),
    ])
    new_corpus, new_lake, warnings = resolve_links(corpus, lake)
    assert new_corpus.get("a").table_ids == ["t1"]
    assert new_lake.get("t1").card_ids == ["a"]
    assert "orphan" not in new_lake
    assert any("ghost" in w for w in warnings)
    assert any("orphan" in w for w in warnings)
    with pytest.raises(MissingTableError):
        new_lake.get("orphan")


MARKDOWN = """Intro text without pipes.

| Model | Accuracy |
| --- | --- |
| alpha | 85.2% |
| beta | 0.5 |

Broken block follows (no separator):
| x | y |
| 1 | 2 |

| Benchmark | Score | Extra |
|:---|---:|---|
| MMLU | 61 | ok |
"""


def test_parse_markdown_tables_well_formed_blocks():
    tables = parse_markdown_tables(MARKDOWN, card_id="card-1")
    assert len(tables) == 2
    first, second = tables
    assert first.headers == ["Model", "Accuracy"]
    assert first.rows == [["alpha", 85.2], ["beta", 0.5]]
    assert first.card_ids == ["card-1"]
    assert first.id == "card-1::t0"
    assert second.headers == ["Benchmark", "Score", "Extra"]
    assert second.rows == [["MMLU", 61, "ok"]]


def test_parse_markdown_tables_no_pipes():
    assert parse_markdown_tables("plain prose, nothing tabular") == []


def test_parse_markdown_ragged_rows_padded_and_truncated():
    text = "| a | b |\n| --- | --- |\n| 1 |\n| 1 | 2 | 3 |\n"
    (table,) = parse_markdown_tables(text)
    assert table.rows == [[1, None], [1, 2]]


def test_corpus_rejects_duplicates_and_empty_ids():
    with pytest.raises(IngestError):
        Corpus([ModelCard(id="", text="x")])
    with pytest.raises(IngestError, match="'dup'"):
        Corpus([ModelCard(id="dup", text="x"), ModelCard(id="dup", text="y")])


def test_lake_rejects_ragged_direct_construction():
    with pytest.raises(IngestError, match="'t'"):
        TableLake([EvidenceTable(id="t", headers=["a", "b"], rows=[["only-one"]], card_ids=["c"])])
