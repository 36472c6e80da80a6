from __future__ import annotations

import random

import pytest

from modellake.discovery import (
    Column,
    DiscoveryConfig,
    column_alignment,
    columns_of,
    discover,
    distinct_values,
    is_numeric_column,
    joinable_search,
    keyword_search,
    unionable_search,
)
from modellake.fixtures import random_lake
from modellake.lake import EvidenceTable, TableLake

from oracles import OPERATOR_REFS, max_matching_ref


def _table(tid, headers, rows):
    return EvidenceTable(id=tid, headers=headers, rows=rows)


@pytest.fixture
def bench_anchor():
    return _table("anchor", ["Benchmark", "Score"], [["mmlu", 71.2], ["gsm8k", 64.0]])


def test_is_numeric_column():
    assert is_numeric_column([1, 2.5, 3])
    assert is_numeric_column([None, 4])
    assert not is_numeric_column(["a", 2])
    assert not is_numeric_column([None, None])
    assert not is_numeric_column([])


def test_distinct_values_normalizes_and_drops_blank():
    assert distinct_values(["MMLU", "mmlu ", None, "  ", "%%"]) == {"mmlu"}
    assert distinct_values([0.537, "0.537"]) == {"0 537"}


def test_keyword_exact_copy_ranks_first(bench_anchor):
    copy = _table("copy", ["Benchmark", "Score"], [["mmlu", 71.2], ["gsm8k", 64.0]])
    other = _table("other", ["Dataset", "Value"], [["mmlu", 1.0]])
    lake = TableLake([bench_anchor, copy, other])
    result = keyword_search(bench_anchor, lake, k=5)
    assert result[0].table_id == "copy"
    assert {sc.table_id for sc in result} == {"copy", "other"}


def test_keyword_counts_every_occurrence(bench_anchor):
    # "mmlu" hits three times (header, two cells); "results" is not a query token.
    cand = _table("cand", ["mmlu results"], [["mmlu"], ["about mmlu again"]])
    lake = TableLake([bench_anchor, cand])
    result = keyword_search(bench_anchor, lake, k=1)
    assert result[0].score == 3


def test_keyword_empty_anchor_tokens_returns_empty(caplog):
    anchor = _table("blank", ["%%"], [[None], ["  "]])
    lake = TableLake([anchor, _table("x", ["a"], [["b"]])])
    with caplog.at_level("WARNING"):
        assert keyword_search(anchor, lake, k=3) == []
    assert any("blank" in rec.message for rec in caplog.records)


def test_keyword_numeric_key_values_participate():
    anchor = _table("a", ["Rank"], [[1], [2]])
    cand = _table("b", ["Place"], [["1"], ["2"], ["3"]])
    lake = TableLake([anchor, cand])
    result = keyword_search(anchor, lake, k=1)
    assert result and result[0].score == 2


def test_joinable_identical_key_column_scores_distinct_count(bench_anchor):
    cand = _table("same-keys", ["Benchmark", "Trend"],
                  [["mmlu", "up"], ["gsm8k", "down"]])
    lake = TableLake([bench_anchor, cand])
    result = joinable_search(bench_anchor, lake, k=5)
    assert [(sc.table_id, sc.score) for sc in result] == [("same-keys", 2)]


def test_joinable_best_column_wins(bench_anchor):
    cand = _table("multi", ["Note", "Name"],
                  [["mmlu", "mmlu"], ["none", "gsm8k"], ["none", "extra"]])
    lake = TableLake([bench_anchor, cand])
    result = joinable_search(bench_anchor, lake, k=5)
    assert result[0].score == 2


def test_joinable_numeric_anchor_key_refused(caplog):
    anchor = _table("nums", ["Id", "Name"], [[1, "a"], [2, "b"]])
    lake = TableLake([anchor, _table("x", ["Id"], [["1"], ["2"]])])
    with caplog.at_level("WARNING"):
        assert joinable_search(anchor, lake, k=3) == []
    assert any("nums" in rec.message for rec in caplog.records)


def test_joinable_numeric_candidate_columns_skipped(bench_anchor):
    cand = _table("numeric-only", ["A", "B"], [[1, 2], [3, 4]])
    lake = TableLake([bench_anchor, cand])
    assert joinable_search(bench_anchor, lake, k=3) == []


def test_scores_three_two_two_zero_ordering():
    anchor = _table("anchor", ["Name"], [["a"], ["b"], ["c"]])
    t3 = _table("t3", ["Name"], [["a"], ["b"], ["c"]])
    t2a = _table("t2a", ["Name"], [["a"], ["b"]])
    t2b = _table("t2b", ["Name"], [["b"], ["c"]])
    t0 = _table("t0", ["Name"], [["zz"]])
    lake = TableLake([anchor, t3, t2a, t2b, t0])
    result = joinable_search(anchor, lake, k=10)
    assert [(sc.table_id, sc.score) for sc in result] == [("t3", 3), ("t2a", 2), ("t2b", 2)]
    top2 = joinable_search(anchor, lake, k=2)
    assert [(sc.table_id, sc.score) for sc in top2] == [("t3", 3), ("t2a", 2)]


def test_column_alignment_header_equality():
    a = Column("  Benchmark ", ["x"])
    b = Column("benchmark", [1.0])
    assert column_alignment(a, b)
    # Empty headers never match each other; disjoint values close the Jaccard route.
    assert not column_alignment(Column("", ["x"]), Column("", ["y"]))


def test_column_alignment_jaccard_example():
    a = Column("left", ["a", "b", "c", "d"])
    b = Column("right", ["c", "d", "e"])
    # overlap 2, union 5 -> 0.4
    assert column_alignment(a, b)
    assert not column_alignment(a, b, DiscoveryConfig(jaccard_threshold=0.5))


def test_column_alignment_numeric_values_never_fuse_by_content():
    a = Column("left", [1, 2, 3])
    b = Column("right", [1, 2, 3])
    assert not column_alignment(a, b)
    assert column_alignment(Column("share", [1, 2]), Column("share", [9, 9]))


def test_unionable_schema_copy_scores_column_count():
    anchor = _table("anchor", ["A", "B", "C", "D"],
                    [["a1", 1, "c1", "d1"], ["a2", 2, "c2", "d2"]])
    copy = _table("copy", ["A", "B", "C", "D"],
                  [["zz", 9, "yy", "xx"]])
    lake = TableLake([anchor, copy])
    result = unionable_search(anchor, lake, k=1)
    assert result[0].score == 4


def test_unionable_uses_maximum_matching_not_greedy():
    # Anchor col0 aligns with both candidate columns; anchor col1 aligns only
    # with candidate col0.  A greedy scan pairing col0 first would score 1.
    anchor = _table("anchor", ["c1", "c2"], [
        ["x1", "x1"], ["x2", "x2"], ["x3", "y1"], ["x4", "y2"], ["x5", "y3"],
    ])
    cand = _table("cand", ["d1", "d2"], [
        ["x1", "x3"], ["x2", "x4"], ["x3", "x5"], ["x4", "z1"], ["x5", "z2"],
    ])
    a_cols = columns_of(anchor)
    c_cols = columns_of(cand)
    assert column_alignment(a_cols[0], c_cols[0])
    assert column_alignment(a_cols[0], c_cols[1])
    assert column_alignment(a_cols[1], c_cols[0])
    assert not column_alignment(a_cols[1], c_cols[1])
    lake = TableLake([anchor, cand])
    result = unionable_search(anchor, lake, k=1)
    assert result[0].score == 2


def test_anchor_never_returned_and_k_validated(bench_anchor):
    lake = TableLake([bench_anchor])
    for op in ("keyword", "joinable", "unionable"):
        assert discover(bench_anchor, lake, op, k=3) == []
        with pytest.raises(ValueError):
            discover(bench_anchor, lake, op, k=0)
    with pytest.raises(ValueError):
        discover(bench_anchor, lake, "fuzzy", k=1)


def test_operators_match_reference_on_random_lakes():
    for seed in range(6):
        rng = random.Random(seed)
        lake = random_lake(rng, n_tables=rng.randint(5, 15))
        tables = list(lake)
        anchor = tables[rng.randrange(len(tables))]
        for op, ref in OPERATOR_REFS.items():
            for k in (1, 3, 10):
                got = [(sc.table_id, sc.score) for sc in discover(anchor, lake, op, k)]
                want = ref(anchor, tables, k)
                assert got == want, f"seed={seed} op={op} k={k}"


def test_max_matching_reference_cross_check(monkeypatch):
    import modellake.discovery as disc

    rng = random.Random(41)
    for _ in range(50):
        n_a, n_c = rng.randint(1, 6), rng.randint(1, 6)
        adjacency = [
            [j for j in range(n_c) if rng.random() < 0.4] for _ in range(n_a)
        ]
        pairs = {(i, j) for i in range(n_a) for j in adjacency[i]}
        cols_a = [Column(f"a{i}", [f"v{i}"]) for i in range(n_a)]
        cols_c = [Column(f"c{j}", [f"w{j}"]) for j in range(n_c)]
        monkeypatch.setattr(
            disc, "column_alignment",
            lambda a, b, cfg=None, pairs=pairs: (int(a.header[1:]), int(b.header[1:])) in pairs,
        )
        got = disc._max_alignment(cols_a, cols_c, None)
        assert got == max_matching_ref(adjacency, n_c)
