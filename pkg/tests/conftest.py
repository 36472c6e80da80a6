from __future__ import annotations

import time

import pytest

from modellake.fixtures import kimi_card, separation_fixture
from modellake.lake import Corpus, EvidenceTable, ModelCard, TableLake
from modellake.nuggets import build_store
from modellake.text_index import TextIndex

SESSION_START = time.monotonic()


def pytest_collection_modifyitems(config, items):
    # The wall-clock budget check must observe the whole session.
    items.sort(key=lambda item: item.name == "test_offline_fallback_runtime_budget")


@pytest.fixture(scope="session")
def separation():
    return separation_fixture()


@pytest.fixture(scope="session")
def separation_index(separation):
    return TextIndex(separation.corpus)


@pytest.fixture(scope="session")
def separation_store(separation):
    return build_store(separation.corpus, separation.lake)


@pytest.fixture()
def kimi():
    return kimi_card()


@pytest.fixture()
def tiny_corpus():
    cards = [
        ModelCard(id="c-cats", text="cat sat on the mat", table_ids=["t-pets"]),
        ModelCard(id="c-dogs", text="dog and cat play", table_ids=[]),
        ModelCard(id="c-birds", text="birds fly high", table_ids=["t-birds"]),
    ]
    tables = [
        EvidenceTable(id="t-pets", headers=["animal", "count"],
                      rows=[["cat", 2], ["dog", 1]], card_ids=["c-cats"]),
        EvidenceTable(id="t-birds", headers=["animal", "count"],
                      rows=[["sparrow", 5], ["crow", 3]], card_ids=["c-birds"]),
    ]
    return Corpus(cards), TableLake(tables)
