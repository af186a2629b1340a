from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

FIXTURE = Path(str(resources.files("sentilex") / "data" / "fixture"))

ACCEPTANCE_RESULTS: list[str] = []


@pytest.fixture(scope="session")
def fixture_dir() -> Path:
    return FIXTURE


@pytest.fixture(scope="session")
def dictionary():
    from sentilex.ingest import parse_dictionary

    return parse_dictionary(FIXTURE / "dictionary.xml")


@pytest.fixture(scope="session")
def corpus():
    from sentilex.ingest import load_corpus

    return load_corpus(FIXTURE / "corpus.tsv")


@pytest.fixture(scope="session")
def seeds():
    from sentilex.ingest import load_seed_mapping

    return load_seed_mapping(FIXTURE / "seeds.tsv")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
