import pytest

from conftest import load_corpus, wire
from stagecirc.booleval import (
    computed_function,
    eval_nodes,
    eval_stage,
    output_assignment,
    step_stage,
)
from stagecirc.circuit import (
    BooleanGate,
    Circuit,
    InputNode,
    InputPort,
    OutputNode,
    OutputPort,
    check_balanced,
)
from stagecirc.errors import InvalidCircuit, NotAStage, TooManyInputs
from stagecirc.generate import random_balanced_circuit, random_boolean_circuit
from stagecirc.indexcore import assignment_from_index, canonical_order
from stagecirc.oracle import brute_force_truth_table
from stagecirc.stages import all_stages, coherent_enumerations, exits, full_stage


def all_inputs(c):
    order = canonical_order(c.inputs)
    for i in range(2 ** len(order)):
        yield assignment_from_index(i, order)


def satisfies_clauses(c, a, values):
    """The three defining clauses, checked node by node."""
    for w in c.inputs:
        if values[InputNode(w)] != a[w]:
            return False
    for consumer, producer in c.provider.items():
        if values[consumer] != values[producer]:
            return False
    for name, gate in c.gates.items():
        ins = {l: values[InputPort(name, l)] for l in gate.inputs}
        outs = gate.apply(ins)
        if any(values[OutputPort(name, m)] != bit for m, bit in outs.items()):
            return False
    return set(values) == set(c.nodes)


def test_identity():
    c = load_corpus("identity")
    assert eval_nodes(c, {"w": 1})[OutputNode("w")] == 1
    assert computed_function(c) == {"0": "0", "1": "1"}


def test_not():
    c = load_corpus("not")
    assert eval_nodes(c, {"w": 0})[OutputNode("w")] == 1
    assert eval_stage(c, {"w": 0}, {"NOT"}) == {OutputPort("NOT", "b"): 1}


def test_half_adder():
    c = load_corpus("half_adder")
    assert output_assignment(c, {"x": 1, "y": 1}) == {"sum": 0, "carry": 1}
    # canonical output order is (carry, sum)
    assert computed_function(c) == {"00": "00", "01": "01", "10": "01", "11": "10"}


def test_empty_circuit():
    c = Circuit("boolean", set(), set(), {}, {})
    assert computed_function(c) == {"": ""}


def test_toffoli_is_bijection():
    table = computed_function(load_corpus("toffoli"))
    assert len(table) == 8 and len(set(table.values())) == 8
    assert table["110"] == "111" and table["111"] == "110"


def test_eval_stage_empty_is_input():
    c = load_corpus("half_adder")
    a = {"x": 1, "y": 0}
    assert eval_stage(c, a, set()) == {InputNode("x"): 1, InputNode("y"): 0}


def test_eval_stage_full_matches_outputs():
    c = load_corpus("cnot_ladder")
    for a in all_inputs(c):
        final = eval_stage(c, a, full_stage(c))
        outs = output_assignment(c, a)
        assert {w: final[c.provider[OutputNode(w)]] for w in c.outputs} == outs


def test_eval_stage_rejects_non_stage():
    c = load_corpus("cnot_ladder")
    with pytest.raises(NotAStage):
        eval_stage(c, {"a": 0, "b": 0, "c": 0}, {"CX2"})


def test_bad_inputs():
    c = load_corpus("not")
    with pytest.raises(ValueError):
        eval_nodes(c, {})
    with pytest.raises(ValueError):
        eval_nodes(c, {"w": 2})
    with pytest.raises(InvalidCircuit):
        eval_nodes(load_corpus("bell"), {"c": 0, "t": 0})


def test_too_many_inputs():
    ins = {f"x{i:02d}" for i in range(21)}
    c = Circuit("boolean", ins, set(), {}, {})
    with pytest.raises(TooManyInputs):
        computed_function(c)


def test_unconsumed_gate_still_valued():
    not_gate = BooleanGate(("a",), ("b",), (1, 0))
    c = Circuit("boolean", {"w"}, {"w"}, {"N": not_gate},
                wire([("N.a:in", "in:w"), ("out:w", "in:w")]))
    values = eval_nodes(c, {"w": 0})
    assert values[OutputPort("N", "b")] == 1
    assert satisfies_clauses(c, {"w": 0}, values)


def test_random_clauses_and_oracle(rng):
    for _ in range(100):
        c = random_boolean_circuit(rng)
        for a in all_inputs(c):
            assert satisfies_clauses(c, a, eval_nodes(c, a))
        assert computed_function(c) == brute_force_truth_table(c)


def test_stage_agreement(rng):
    for _ in range(60):
        c = random_boolean_circuit(rng, max_inputs=4)
        stages = all_stages(c)
        for a in all_inputs(c):
            values = eval_nodes(c, a)
            for z in stages:
                got = eval_stage(c, a, z)
                assert got == {p: values[p] for p in exits(c, z)}


def test_boolean_schedule_invariance(rng):
    for _ in range(40):
        c = random_boolean_circuit(rng, max_gates=5, max_inputs=3)
        for a in all_inputs(c):
            seen = {}
            for seq in coherent_enumerations(c):
                state = {InputNode(w): bit for w, bit in a.items()}
                for k, g in enumerate(seq):
                    # keep everything: the order-free claim is about values
                    state = step_stage(c, state, g, keep=frozenset(state))
                    key = frozenset(seq[:k + 1])
                    snapshot = {p: state[p] for p in exits(c, key)}
                    assert seen.setdefault(key, snapshot) == snapshot


def test_balanced_computes_bijection(rng):
    for _ in range(50):
        c = random_balanced_circuit(rng)
        assert check_balanced(c).ok
        table = computed_function(c)
        assert len(set(table.values())) == len(table) == 2 ** len(c.inputs)


def test_determinism(rng):
    c = random_boolean_circuit(rng)
    a = next(all_inputs(c))
    assert list(eval_nodes(c, a).items()) == list(eval_nodes(c, a).items())
