"""Regenerate the shipped corpus, its oracle fixtures, and the no-cloning fixtures.

    python3 tools/build_corpus.py
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from stagecirc import document, oracle
from stagecirc.circuit import (
    BooleanGate,
    Circuit,
    QuantumGate,
    parse_ref,
)
from stagecirc.generate import CNOT, HADAMARD, PAULI_X

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "src" / "stagecirc" / "corpus"
NOCLONE = ROOT / "tests" / "fixtures" / "nocloning"


def wire(pairs):
    return {parse_ref(consumer): parse_ref(producer) for consumer, producer in pairs}


def xor_gate():
    return BooleanGate.from_function(("a", "b"), ("s",), lambda v: {"s": v["a"] ^ v["b"]})


def and_gate():
    return BooleanGate.from_function(("a", "b"), ("c",), lambda v: {"c": v["a"] & v["b"]})


def cnot_table():
    return BooleanGate.from_function(
        ("c", "t"), ("c", "t"), lambda v: {"c": v["c"], "t": v["t"] ^ v["c"]})


def corpus():
    yield "identity", Circuit("boolean", {"w"}, {"w"}, {}, wire([("out:w", "in:w")]))

    not_gate = BooleanGate(("a",), ("b",), (1, 0))
    yield "not", Circuit("boolean", {"w"}, {"w"}, {"NOT": not_gate}, wire([
        ("NOT.a:in", "in:w"), ("out:w", "NOT.b:out")]))

    yield "half_adder", Circuit("boolean", {"x", "y"}, {"sum", "carry"},
                                {"XOR": xor_gate(), "AND": and_gate()}, wire([
        ("XOR.a:in", "in:x"), ("XOR.b:in", "in:y"),
        ("AND.a:in", "in:x"), ("AND.b:in", "in:y"),
        ("out:sum", "XOR.s:out"), ("out:carry", "AND.c:out")]))

    toffoli = BooleanGate.from_function(
        ("c1", "c2", "t"), ("c1", "c2", "t"),
        lambda v: {"c1": v["c1"], "c2": v["c2"], "t": v["t"] ^ (v["c1"] & v["c2"])})
    yield "toffoli", Circuit("boolean", {"a", "b", "c"}, {"a", "b", "c"},
                             {"TOFFOLI": toffoli}, wire([
        ("TOFFOLI.c1:in", "in:a"), ("TOFFOLI.c2:in", "in:b"), ("TOFFOLI.t:in", "in:c"),
        ("out:a", "TOFFOLI.c1:out"), ("out:b", "TOFFOLI.c2:out"), ("out:c", "TOFFOLI.t:out")]))

    fredkin = BooleanGate.from_function(
        ("ctl", "x", "y"), ("ctl", "x", "y"),
        lambda v: {"ctl": v["ctl"], "x": v["y"] if v["ctl"] else v["x"],
                   "y": v["x"] if v["ctl"] else v["y"]})
    yield "fredkin", Circuit("boolean", {"a", "b", "c"}, {"a", "b", "c"},
                             {"FREDKIN": fredkin}, wire([
        ("FREDKIN.ctl:in", "in:a"), ("FREDKIN.x:in", "in:b"), ("FREDKIN.y:in", "in:c"),
        ("out:a", "FREDKIN.ctl:out"), ("out:b", "FREDKIN.x:out"), ("out:c", "FREDKIN.y:out")]))

    yield "cnot_ladder", Circuit("boolean", {"a", "b", "c"}, {"a", "b", "c"},
                                 {"CX1": cnot_table(), "CX2": cnot_table()}, wire([
        ("CX1.c:in", "in:a"), ("CX1.t:in", "in:b"),
        ("CX2.c:in", "CX1.t:out"), ("CX2.t:in", "in:c"),
        ("out:a", "CX1.c:out"), ("out:b", "CX2.c:out"), ("out:c", "CX2.t:out")]))

    h = QuantumGate(("q",), ("q",), HADAMARD)
    cx = QuantumGate(("c", "t"), ("c", "t"), CNOT)
    yield "bell", Circuit("quantum", {"c", "t"}, {"c", "t"}, {"H": h, "CNOT": cx}, wire([
        ("H.q:in", "in:c"), ("CNOT.c:in", "H.q:out"), ("CNOT.t:in", "in:t"),
        ("out:c", "CNOT.c:out"), ("out:t", "CNOT.t:out")]))

    yield "ghz3", Circuit("quantum", {"a", "b", "c"}, {"a", "b", "c"},
                          {"H": h, "CX1": cx, "CX2": cx}, wire([
        ("H.q:in", "in:a"),
        ("CX1.c:in", "H.q:out"), ("CX1.t:in", "in:b"),
        ("CX2.c:in", "CX1.t:out"), ("CX2.t:in", "in:c"),
        ("out:a", "CX1.c:out"), ("out:b", "CX2.c:out"), ("out:c", "CX2.t:out")]))


def expected(c: Circuit) -> dict:
    if c.kind == "boolean":
        return {"truth_table": oracle.brute_force_truth_table(c)}
    op = oracle.brute_force_unitary(c)
    return {"unitary": {
        "rows": op.out_labels,
        "columns": op.in_labels,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in op.matrix],
    }}


def dump_expected(data: dict) -> str:
    if "truth_table" in data:
        rows = ",\n".join(f"  {json.dumps(k)}: {json.dumps(v)}"
                          for k, v in data["truth_table"].items())
        return '{"truth_table": {\n' + rows + "\n}}\n"
    u = data["unitary"]
    rows = ",\n".join("  " + json.dumps(row) for row in u["matrix"])
    return ('{"unitary": {\n "rows": ' + json.dumps(u["rows"]) + ",\n"
            ' "columns": ' + json.dumps(u["columns"]) + ",\n"
            ' "matrix": [\n' + rows + "\n ]}}\n")


def nocloning():
    """Quantum documents in which one producer feeds two or more consumers."""
    h = QuantumGate(("q",), ("q",), HADAMARD)
    x = QuantumGate(("q",), ("q",), PAULI_X)
    cx = QuantumGate(("c", "t"), ("c", "t"), CNOT)
    skewed = QuantumGate(("q",), ("q",), np.diag([1.0, 0.999]))

    def q(inputs, outputs, gates, pairs):
        return Circuit("quantum", set(inputs), set(outputs), gates, wire(pairs))

    yield "input_to_two_outputs", "in:w", q({"w"}, {"u", "v"}, {}, [
        ("out:u", "in:w"), ("out:v", "in:w")])
    yield "input_to_two_gates", "in:w", q({"w"}, {"u", "v"}, {"H": h, "X": x}, [
        ("H.q:in", "in:w"), ("X.q:in", "in:w"), ("out:u", "H.q:out"), ("out:v", "X.q:out")])
    yield "input_to_gate_and_output", "in:w", q({"w"}, {"u", "v"}, {"H": h}, [
        ("H.q:in", "in:w"), ("out:u", "H.q:out"), ("out:v", "in:w")])
    yield "gate_output_to_two_outputs", "H.q:out", q({"w"}, {"u", "v"}, {"H": h}, [
        ("H.q:in", "in:w"), ("out:u", "H.q:out"), ("out:v", "H.q:out")])
    yield "gate_output_to_two_gates", "H.q:out", q({"w"}, {"u", "v"}, {"H": h, "X": x, "Y": x}, [
        ("H.q:in", "in:w"), ("X.q:in", "H.q:out"), ("Y.q:in", "H.q:out"),
        ("out:u", "X.q:out"), ("out:v", "Y.q:out")])
    yield "both_ports_of_one_gate", "in:w", q({"w", "z"}, {"u", "v", "s"}, {"CNOT": cx}, [
        ("CNOT.c:in", "in:w"), ("CNOT.t:in", "in:w"),
        ("out:u", "CNOT.c:out"), ("out:v", "CNOT.t:out"), ("out:s", "in:z")])
    yield "three_way_fanout", "in:w", q({"w"}, {"u", "v", "s"}, {}, [
        ("out:u", "in:w"), ("out:v", "in:w"), ("out:s", "in:w")])
    yield "fanout_and_non_unitary", "in:w", q({"w"}, {"u", "v"}, {"S": skewed}, [
        ("S.q:in", "in:w"), ("out:u", "S.q:out"), ("out:v", "in:w")])
    yield "fanout_deep_in_chain", "CX1.t:out", q({"a", "b", "c"}, {"a", "b", "c", "d"},
                                                 {"H": h, "CX1": cx, "CX2": cx}, [
        ("H.q:in", "in:a"), ("CX1.c:in", "H.q:out"), ("CX1.t:in", "in:b"),
        ("CX2.c:in", "CX1.t:out"), ("CX2.t:in", "in:c"),
        ("out:a", "CX1.c:out"), ("out:b", "CX2.c:out"), ("out:c", "CX2.t:out"),
        ("out:d", "CX1.t:out")])
    yield "fanout_with_dangling", "in:a", q({"a", "b"}, {"u", "v"}, {"X": x}, [
        ("X.q:in", "in:a"), ("out:u", "in:a"), ("out:v", "X.q:out")])


def main():
    CORPUS.mkdir(parents=True, exist_ok=True)
    NOCLONE.mkdir(parents=True, exist_ok=True)
    for name, c in corpus():
        (CORPUS / f"{name}.json").write_text(document.serialize(c), encoding="utf-8")
        (CORPUS / f"{name}.expected.json").write_text(dump_expected(expected(c)),
                                                      encoding="utf-8")
    manifest = {}
    for name, producer, c in nocloning():
        (NOCLONE / f"{name}.json").write_text(document.serialize(c), encoding="utf-8")
        manifest[name] = producer
    (NOCLONE / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n",
                                          encoding="utf-8")


if __name__ == "__main__":
    main()
