import numpy as np
import pytest

from conftest import load_corpus, wire
from stagecirc.circuit import (
    BooleanGate,
    Circuit,
    InputNode,
    InputPort,
    OutputNode,
    OutputPort,
    QuantumGate,
    check_balanced,
    check_quantum,
    complete_outputs,
    direct_prerequisites,
    parse_ref,
    providers_of_gate,
    require_valid,
    validate,
)
from stagecirc.errors import InvalidCircuit, MixedCircuit, NotInjective
from stagecirc.generate import HADAMARD, PAULI_X, random_balanced_circuit, random_boolean_circuit

NOT = BooleanGate(("a",), ("b",), (1, 0))
AND = BooleanGate.from_function(("a", "b"), ("c",), lambda v: {"c": v["a"] & v["b"]})
X = QuantumGate(("q",), ("q",), PAULI_X)


def identity():
    return Circuit("boolean", {"w"}, {"w"}, {}, wire([("out:w", "in:w")]))


def not_circuit():
    return Circuit("boolean", {"w"}, {"w"}, {"NOT": NOT},
                   wire([("NOT.a:in", "in:w"), ("out:w", "NOT.b:out")]))


# -- node references -------------------------------------------------------

@pytest.mark.parametrize("text, node", [
    ("in:w", InputNode("w")),
    ("out:w", OutputNode("w")),
    ("G.a:in", InputPort("G", "a")),
    ("G.a:out", OutputPort("G", "a")),
    ("G.x:y:out", OutputPort("G", "x:y")),
])
def test_ref_round_trip(text, node):
    assert parse_ref(text) == node
    assert str(node) == text


@pytest.mark.parametrize("text", ["", "w", "G:in", "G.a", "in", 3])
def test_bad_refs(text):
    with pytest.raises(ValueError):
        parse_ref(text)


def test_gate_name_may_equal_wire_label():
    c = Circuit("boolean", {"w"}, {"w"}, {"w": NOT},
                wire([("w.a:in", "in:w"), ("out:w", "w.b:out")]))
    assert validate(c).ok


# -- gates -----------------------------------------------------------------

def test_boolean_gate_table_size():
    with pytest.raises(ValueError):
        BooleanGate(("a",), ("b",), (1,))
    with pytest.raises(ValueError):
        BooleanGate(("a",), ("b",), (0, 2))
    with pytest.raises(ValueError):
        BooleanGate(tuple(f"i{k}" for k in range(11)), (), (0,) * 2 ** 11)


def test_boolean_gate_apply():
    assert AND.apply({"a": 1, "b": 1}) == {"c": 1}
    assert AND.apply({"a": 1, "b": 0}) == {"c": 0}
    assert NOT.is_bijective() and not AND.is_bijective()


def test_quantum_gate_shape():
    with pytest.raises(ValueError):
        QuantumGate(("a",), ("a",), np.eye(4))
    assert QuantumGate(("a",), ("a",), HADAMARD).is_unitary()


def test_non_unitary_deviation():
    g = QuantumGate(("q",), ("q",), np.diag([1.0, 0.999]))
    # ||diag(0, 0.999^2 - 1)||_F
    assert g.unitarity_deviation() == pytest.approx(1 - 0.999 ** 2, rel=1e-12)
    assert g.unitarity_deviation() == pytest.approx(2e-3, rel=1e-3)


def test_mixed_circuit_rejected():
    with pytest.raises(MixedCircuit):
        Circuit("boolean", {"w"}, {"w"}, {"X": X}, wire([("X.q:in", "in:w"), ("out:w", "X.q:out")]))


# -- validate --------------------------------------------------------------

def test_identity_valid():
    assert validate(identity()).ok
    assert identity().producers == {InputNode("w")}
    assert identity().consumers == {OutputNode("w")}


def test_self_loop_cycle():
    c = Circuit("boolean", {"w"}, {"w"}, {"G": NOT},
                wire([("G.a:in", "G.b:out"), ("out:w", "in:w")]))
    report = validate(c)
    assert report.codes() == ["cycle"]
    assert report.facts["cycles"] == [["G"]]


def test_two_cycle():
    c = Circuit("boolean", set(), {"w"}, {"G": NOT, "H": NOT},
                wire([("G.a:in", "H.b:out"), ("H.a:in", "G.b:out"), ("out:w", "G.b:out")]))
    report = validate(c)
    assert "cycle" in report.codes()
    assert sorted(report.facts["cycles"][0]) == ["G", "H"]
    with pytest.raises(InvalidCircuit):
        require_valid(c)


def test_missing_provider_message():
    c = Circuit("boolean", {"w"}, {"w"}, {}, {})
    report = validate(c)
    assert not report.ok
    assert any("consumer out:w has no provider" in line for line in report.lines())


def test_retarget_to_consumer():
    c = Circuit("boolean", {"w"}, {"w", "v"}, {}, wire([("out:w", "in:w"), ("out:v", "out:w")]))
    assert "not-a-producer" in validate(c).codes()


def test_unknown_gate_and_producer():
    c = Circuit("boolean", {"w"}, {"w"}, {}, wire([("out:w", "G.b:out")]))
    assert "unknown-gate" in validate(c).codes()
    c = Circuit("boolean", {"w"}, {"w"}, {}, wire([("out:w", "in:zz")]))
    assert "unknown-producer" in validate(c).codes()


def test_bad_gate_name():
    c = Circuit("boolean", {"w"}, {"w"}, {"A.B": NOT},
                wire([("out:w", "in:w")]))
    assert "bad-gate-name" in validate(c).codes()


def test_dangling_is_warning():
    c = Circuit("boolean", {"w", "v"}, {"w"}, {}, wire([("out:w", "in:w")]))
    report = validate(c)
    assert report.ok
    assert [p.code for p in report.warnings] == ["dangling-producer"]


def test_random_mutations_are_caught(rng):
    seen = 0
    for _ in range(100):
        c = random_boolean_circuit(rng)
        assert validate(c).ok
        assert c.producers.isdisjoint(c.consumers)
        if not c.provider:
            continue
        seen += 1
        keys = sorted(c.provider, key=str)
        victim = keys[int(rng.integers(len(keys)))]
        dropped = dict(c.provider)
        del dropped[victim]
        assert "missing-provider" in validate(
            Circuit(c.kind, c.inputs, c.outputs, c.gates, dropped)).codes()
        retarget = dict(c.provider)
        retarget[victim] = keys[0]
        assert not validate(Circuit(c.kind, c.inputs, c.outputs, c.gates, retarget)).ok
    assert seen > 50


def test_random_cycle_mutation_caught(rng):
    hits = 0
    for _ in range(200):
        c = random_boolean_circuit(rng)
        edges = [(g, h) for h, pre in c.prerequisites.items() for g in pre]
        if not edges:
            continue
        g, h = edges[0]
        # feed an input port of g from an output port of h
        gate_g, gate_h = c.gates[g], c.gates[h]
        if not gate_g.inputs or not gate_h.outputs:
            continue
        provider = dict(c.provider)
        provider[InputPort(g, gate_g.inputs[0])] = OutputPort(h, gate_h.outputs[0])
        report = validate(Circuit(c.kind, c.inputs, c.outputs, c.gates, provider))
        assert "cycle" in report.codes()
        hits += 1
    assert hits > 20


# -- prerequisites ---------------------------------------------------------

def test_prerequisites_bell(bell):
    assert direct_prerequisites(bell, "H") == frozenset()
    assert direct_prerequisites(bell, "CNOT") == {"H"}
    assert providers_of_gate(bell, "CNOT") == {OutputPort("H", "q"), InputNode("t")}


def test_providers_collapse_fanout():
    half = load_corpus("half_adder")
    assert providers_of_gate(half, "AND") == {InputNode("x"), InputNode("y")}
    c = Circuit("boolean", {"w"}, {"w"}, {"AND": AND},
                wire([("AND.a:in", "in:w"), ("AND.b:in", "in:w"), ("out:w", "AND.c:out")]))
    assert providers_of_gate(c, "AND") == {InputNode("w")}


def test_providers_of_nullary_gate():
    const = BooleanGate((), ("o",), (1,))
    c = Circuit("boolean", set(), {"w"}, {"K": const}, wire([("out:w", "K.o:out")]))
    assert providers_of_gate(c, "K") == frozenset()


# -- check_balanced --------------------------------------------------------

def test_not_is_balanced():
    report = check_balanced(not_circuit())
    assert report.ok
    assert report.facts["num_inputs"] == report.facts["num_outputs"] == 1


def test_and_is_not_balanced():
    c = Circuit("boolean", {"x", "y"}, {"z"}, {"AND": AND},
                wire([("AND.a:in", "in:x"), ("AND.b:in", "in:y"), ("out:z", "AND.c:out")]))
    assert "gate-not-bijective" in check_balanced(c).codes()


def test_toffoli_balanced():
    report = check_balanced(load_corpus("toffoli"))
    assert report.ok
    assert report.facts["num_inputs"] == 3 == report.facts["num_outputs"]
    assert report.facts["arities"] == {"TOFFOLI": (3, 3)}


def test_half_adder_not_balanced():
    codes = check_balanced(load_corpus("half_adder")).codes()
    assert "fan-out" in codes and "gate-not-bijective" in codes


def test_balanced_random_counting(rng):
    for _ in range(50):
        c = random_balanced_circuit(rng)
        report = check_balanced(c)
        assert report.ok, report.lines()
        arities = report.facts["arities"]
        assert sum(i for i, _ in arities.values()) == sum(o for _, o in arities.values())


# -- check_quantum ---------------------------------------------------------

def test_empty_quantum_circuit():
    c = Circuit("quantum", {"a", "b"}, {"a", "b"}, {}, wire([("out:a", "in:b"), ("out:b", "in:a")]))
    assert check_quantum(c).ok


def test_quantum_cloning():
    c = Circuit("quantum", {"w"}, {"u", "v"}, {}, wire([("out:u", "in:w"), ("out:v", "in:w")]))
    report = check_quantum(c)
    assert report.codes() == ["fan-out"]
    assert "in:w" in report.lines()[0]


def test_quantum_non_unitary():
    g = QuantumGate(("q",), ("q",), np.diag([1.0, 0.999]))
    c = Circuit("quantum", {"w"}, {"w"}, {"S": g}, wire([("S.q:in", "in:w"), ("out:w", "S.q:out")]))
    report = check_quantum(c)
    assert report.codes() == ["non-unitary"]
    assert report.facts["unitarity_deviation"]["S"] == pytest.approx(1.999e-3, rel=1e-9)


def test_quantum_corpus_ok():
    for name in ("bell", "ghz3"):
        assert check_quantum(load_corpus(name)).ok


# -- complete_outputs ------------------------------------------------------

def test_complete_unchanged(bell):
    assert complete_outputs(bell) is bell


def test_complete_one_dangling():
    c = Circuit("quantum", {"w", "v"}, {"w"}, {"X": X},
                wire([("X.q:in", "in:w"), ("out:w", "X.q:out")]))
    done = complete_outputs(c)
    assert done.outputs == {"w", "_drop0"}
    assert done.provider[OutputNode("_drop0")] == InputNode("v")


def test_complete_three_dangling():
    g = QuantumGate(("a", "b"), ("a", "b"), np.eye(4))
    c = Circuit("quantum", {"p", "q", "r"}, {"s"}, {"G": g},
                wire([("G.a:in", "in:p"), ("G.b:in", "in:q"), ("out:s", "G.a:out")]))
    assert "dangling-producer" in check_quantum(c).codes()
    done = complete_outputs(c)
    assert len(done.outputs) == len(c.outputs) + 2
    c2 = Circuit("quantum", {"p", "q", "r", "t"}, {"s"}, {"G": g},
                 wire([("G.a:in", "in:p"), ("G.b:in", "in:q"), ("out:s", "G.a:out")]))
    done2 = complete_outputs(c2)
    assert len(done2.outputs) == len(c2.outputs) + 3
    assert check_quantum(done2).ok
    assert complete_outputs(done2) == done2


def test_complete_skips_used_names():
    c = Circuit("quantum", {"w", "v"}, {"_drop0"}, {},
                wire([("out:_drop0", "in:w")]))
    assert complete_outputs(c).outputs == {"_drop0", "_drop1"}


def test_complete_refuses_fanout():
    c = Circuit("quantum", {"w"}, {"u", "v"}, {}, wire([("out:u", "in:w"), ("out:v", "in:w")]))
    with pytest.raises(NotInjective):
        complete_outputs(c)


def test_fingerprint_stable(bell):
    again = load_corpus("bell")
    assert bell == again and bell.fingerprint == again.fingerprint
    assert hash(bell) == hash(again)
