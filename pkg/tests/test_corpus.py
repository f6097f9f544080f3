"""The shipped corpus against its frozen oracle fixtures."""

import numpy as np
import pytest

from conftest import CORPUS_NAMES, load_corpus, load_expected
from stagecirc.booleval import computed_function
from stagecirc.circuit import check_balanced, check_quantum
from stagecirc.quantumsim import circuit_unitary, exit_labels

EXPECTED_NAMES = ["bell", "cnot_ladder", "fredkin", "ghz3", "half_adder", "identity", "not",
                  "toffoli"]


def test_corpus_contents():
    assert CORPUS_NAMES == EXPECTED_NAMES


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_matches_fixture(name):
    c = load_corpus(name)
    expected = load_expected(name)
    if c.kind == "boolean":
        assert computed_function(c) == expected["truth_table"]
    else:
        u = expected["unitary"]
        ref = np.array([[complex(re, im) for re, im in row] for row in u["matrix"]])
        assert exit_labels(c) == u["rows"]
        assert u["columns"] == ["in:" + w for w in sorted(c.inputs)]
        assert np.max(np.abs(circuit_unitary(c) - ref)) <= 1e-10


def test_reversible_members_are_balanced():
    for name in ("identity", "not", "toffoli", "fredkin", "cnot_ladder"):
        assert check_balanced(load_corpus(name)).ok, name
    for name in ("bell", "ghz3"):
        assert check_quantum(load_corpus(name)).ok


def test_ghz_fixture_values():
    ref = load_expected("ghz3")["unitary"]["matrix"]
    first_column = [complex(*row[0]) for row in ref]
    s = 1 / np.sqrt(2)
    assert np.allclose(first_column, [s, 0, 0, 0, 0, 0, 0, s], atol=1e-15)
