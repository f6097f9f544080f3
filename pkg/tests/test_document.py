import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import CORPUS_DIR, CORPUS_NAMES, load_corpus
from stagecirc.circuit import OutputNode
from stagecirc.document import (
    DocumentError,
    DocumentSemanticError,
    DocumentSyntaxError,
    parse,
    serialize,
    to_data,
)
from stagecirc.generate import random_boolean_circuit, random_quantum_circuit

IDENTITY = """{
  "kind": "boolean",
  "inputs": ["w"],
  "outputs": ["w"],
  "gates": [],
  "wires": [{"consumer": "out:w", "producer": "in:w"}]
}"""


def test_identity_document():
    c = parse(IDENTITY)
    assert c.kind == "boolean" and not c.gates
    assert c.provider[OutputNode("w")].label == "w"


def test_missing_wire():
    text = IDENTITY.replace('{"consumer": "out:w", "producer": "in:w"}', "")
    with pytest.raises(DocumentSemanticError) as info:
        parse(text)
    assert "consumer out:w has no provider" in str(info.value)
    assert info.value.report is not None


def test_syntax_error_position():
    with pytest.raises(DocumentSyntaxError) as info:
        parse('{\n  "kind": "boolean",\n  "inputs": [}\n')
    diag = info.value.diagnostics[0]
    assert (diag.line, diag.column) == (3, 14)


def test_duplicate_key():
    with pytest.raises(DocumentSyntaxError):
        parse('{"kind": "boolean", "kind": "quantum"}')


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.update(kind="analog"), "kind"),
    (lambda d: d.update(extra=1), "unexpected keys"),
    (lambda d: d["wires"].append({"consumer": "out:w", "producer": "in:w"}), "wired twice"),
    (lambda d: d["wires"].append({"consumer": "bogus", "producer": "in:w"}), "malformed"),
    (lambda d: d.update(inputs=["w", "w"]), "duplicate labels"),
    (lambda d: d["gates"].append({"name": "G", "inputs": ["a"], "outputs": ["b"],
                                   "table": {"0": "1"}}), "missing rows"),
    (lambda d: d["gates"].append({"name": "G", "inputs": ["a"], "outputs": ["b"],
                                   "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}),
     "needs a 'table'"),
])
def test_semantic_errors(mutate, fragment):
    data = json.loads(IDENTITY)
    mutate(data)
    with pytest.raises(DocumentSemanticError) as info:
        parse(json.dumps(data))
    assert fragment in str(info.value)


def test_non_finite_matrix():
    data = json.loads(serialize(load_corpus("bell")))
    data["gates"][0]["matrix"][0][0] = [1e400, 0]
    with pytest.raises(DocumentSemanticError, match="finite"):
        parse(json.dumps(data))


def test_bell_round_trip():
    text = (CORPUS_DIR / "bell.json").read_text()
    c = parse(text)
    assert c.kind == "quantum" and len(c.gates) == 2
    assert serialize(c) == text
    assert parse(serialize(c)) == c


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_corpus_is_canonical(name):
    text = (CORPUS_DIR / f"{name}.json").read_text()
    assert serialize(parse(text)) == text


def test_random_round_trip(rng):
    for i in range(60):
        c = random_boolean_circuit(rng) if i % 2 else random_quantum_circuit(rng)
        text = serialize(c)
        again = parse(text)
        assert again == c
        assert serialize(again) == text
        if c.kind == "quantum":
            for name, gate in c.gates.items():
                assert np.array_equal(gate.matrix, again.gates[name].matrix)


def test_serialize_is_order_free(rng):
    c = random_boolean_circuit(rng)
    data = to_data(c)
    data["gates"].reverse()
    data["wires"].reverse()
    data["inputs"].reverse()
    assert serialize(parse(json.dumps(data))) == serialize(c)


def test_bytes_input():
    assert parse(IDENTITY.encode()) == parse(IDENTITY)
    with pytest.raises(DocumentSyntaxError):
        parse(b"\xff\xfe")


json_values = st.recursive(
    st.none() | st.booleans() | st.integers() | st.floats() | st.text(max_size=6),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=6), inner,
                                                              max_size=4),
    max_leaves=20)


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(json_values)
def test_parse_total_on_json(value):
    try:
        parse(json.dumps(value))
    except DocumentError:
        pass


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=200))
def test_parse_total_on_text(text):
    try:
        parse(text)
    except DocumentError:
        pass


def _structured_documents():
    label = st.sampled_from(["a", "b", "w", "", 3])
    ref = st.sampled_from(["in:w", "out:w", "in:a", "G.a:in", "G.b:out", "G.a:out", "H.b:in",
                           "G.b:in", "x", ""])
    wire = st.fixed_dictionaries({"consumer": ref, "producer": ref})
    table = st.dictionaries(st.sampled_from(["0", "1", "00", "x"]),
                            st.sampled_from(["0", "1", "", "11"]), max_size=3)
    entry = st.sampled_from([[1, 0], [0, 0], [0.5, -0.5], [1], "1", [True, 0]])
    matrix = st.lists(st.lists(entry, max_size=3), max_size=3)
    gate = st.fixed_dictionaries({
        "name": st.sampled_from(["G", "H", "G.x", 7]),
        "inputs": st.lists(label, max_size=2),
        "outputs": st.lists(label, max_size=2),
    }, optional={"table": table, "matrix": matrix})
    return st.fixed_dictionaries({
        "kind": st.sampled_from(["boolean", "quantum", "other"]),
        "inputs": st.lists(label, max_size=3),
        "outputs": st.lists(label, max_size=3),
        "gates": st.lists(gate, max_size=2),
        "wires": st.lists(wire, max_size=4),
    })


@settings(max_examples=500, deadline=None)
@given(_structured_documents())
def test_parse_total_on_near_miss_documents(doc):
    try:
        parse(json.dumps(doc))
    except DocumentError:
        pass
