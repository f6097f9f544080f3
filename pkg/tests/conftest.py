import json
from pathlib import Path

import numpy as np
import pytest

from stagecirc import document
from stagecirc.circuit import Circuit, parse_ref

CORPUS_DIR = Path(__file__).resolve().parent.parent / "src" / "stagecirc" / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

CORPUS_NAMES = sorted(p.stem for p in CORPUS_DIR.glob("*.json") if not p.stem.endswith(".expected"))

_criteria: dict[str, tuple[bool, str]] = {}


def wire(pairs):
    return {parse_ref(c): parse_ref(p) for c, p in pairs}


def load_corpus(name) -> Circuit:
    return document.load(CORPUS_DIR / f"{name}.json")


def load_expected(name) -> dict:
    return json.loads((CORPUS_DIR / f"{name}.expected.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def bell():
    return load_corpus("bell")


@pytest.fixture
def criterion():
    """Record a one-line verdict for the acceptance summary."""

    def record(number, passed, detail):
        _criteria[number] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria, key=int):
        passed, detail = _criteria[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
