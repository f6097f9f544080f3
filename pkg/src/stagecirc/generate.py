"""Random circuit families and small gate constructors for tests and checks."""

from __future__ import annotations

import numpy as np

from .circuit import (
    BooleanGate,
    Circuit,
    InputNode,
    InputPort,
    OutputNode,
    OutputPort,
    QuantumGate,
)

SQRT1_2 = 0.7071067811865476

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

PORT_ALPHABET = ["a", "b", "c", "d", "e", "f"]


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary: QR of a complex Gaussian matrix with phases fixed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_state_amplitudes(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal(2 ** n) + 1j * rng.standard_normal(2 ** n)
    return v / np.linalg.norm(v)


def _ports(rng, k, prefix=""):
    names = list(rng.permutation(PORT_ALPHABET)[:k])
    return tuple(prefix + str(n) for n in names)


def _gate_names(rng, count):
    # names deliberately unrelated to construction order
    names = [f"g{i}" for i in range(count)]
    return [str(n) for n in rng.permutation(names)]


def random_boolean_circuit(rng: np.random.Generator, max_gates: int = 6, max_inputs: int = 6,
                           max_arity: int = 3, fanout: bool = True) -> Circuit:
    """Random Boolean circuit with random tables and random (fan-out) wiring.

    Every gate reads from producers created before it, so the prerequisite
    relation is acyclic.  Some producers may stay unconsumed.
    """
    n_in = int(rng.integers(0, max_inputs + 1))
    inputs = [f"x{i}" for i in range(n_in)]
    n_gates = int(rng.integers(0, max_gates + 1))
    names = _gate_names(rng, n_gates)
    pool = [InputNode(w) for w in inputs]
    unused = list(pool)
    gates, provider = {}, {}
    for name in names:
        k_in = int(rng.integers(0, min(max_arity, len(pool)) + 1)) if pool else 0
        k_out = int(rng.integers(0, max_arity + 1))
        ins, outs = _ports(rng, k_in), _ports(rng, k_out)
        table = tuple(int(v) for v in rng.integers(0, 2 ** k_out, size=2 ** k_in))
        gates[name] = BooleanGate(ins, outs, table)
        for l in ins:
            src = _pick(rng, pool, unused, fanout)
            provider[InputPort(name, l)] = src
        new = [OutputPort(name, m) for m in outs]
        pool.extend(new)
        unused.extend(new)
    n_out = int(rng.integers(0, max_inputs + 1)) if pool else 0
    outputs = [f"y{i}" for i in range(n_out)]
    for w in outputs:
        provider[OutputNode(w)] = _pick(rng, pool, unused, fanout)
    return Circuit("boolean", frozenset(inputs), frozenset(outputs), gates, provider)


def _pick(rng, pool, unused, fanout):
    if fanout or not unused:
        return pool[int(rng.integers(len(pool)))]
    return unused.pop(int(rng.integers(len(unused))))


def _random_balanced_wiring(rng, n_wires, max_gates, max_arity, make_gate, kind):
    """Shared skeleton: every gate consumes k live wires and produces k new ones."""
    inputs = [f"q{i}" for i in range(n_wires)]
    live = [InputNode(w) for w in inputs]
    n_gates = int(rng.integers(1, max_gates + 1))
    gates, provider = {}, {}
    for name in _gate_names(rng, n_gates):
        k = int(rng.integers(0, min(max_arity, len(live)) + 1))
        ins, outs = _ports(rng, k), _ports(rng, k, prefix="o")
        gates[name] = make_gate(ins, outs)
        for l in ins:
            provider[InputPort(name, l)] = live.pop(int(rng.integers(len(live))))
        live.extend(OutputPort(name, m) for m in outs)
    outputs = [f"r{i}" for i in range(len(live))]
    for w, src in zip(outputs, rng.permutation(len(live))):
        provider[OutputNode(w)] = live[int(src)]
    return Circuit(kind, frozenset(inputs), frozenset(outputs), gates, provider)


def random_balanced_circuit(rng: np.random.Generator, max_gates: int = 6, max_wires: int = 6,
                            max_arity: int = 3) -> Circuit:
    """Random reversible circuit: permutation tables and a bijective provider map."""
    n = int(rng.integers(1, max_wires + 1))

    def make(ins, outs):
        perm = rng.permutation(2 ** len(ins))
        return BooleanGate(ins, outs, tuple(int(v) for v in perm))

    return _random_balanced_wiring(rng, n, max_gates, max_arity, make, "boolean")


def random_quantum_circuit(rng: np.random.Generator, max_gates: int = 6, max_qubits: int = 6,
                           max_arity: int = 3) -> Circuit:
    """Random quantum circuit with Haar-random gate unitaries."""
    n = int(rng.integers(1, max_qubits + 1))

    def make(ins, outs):
        return QuantumGate(ins, outs, random_unitary(rng, 2 ** len(ins)))

    return _random_balanced_wiring(rng, n, max_gates, max_arity, make, "quantum")


def permutation_unitary(gate: BooleanGate) -> np.ndarray:
    """The basis permutation ``|x> -> |g(x)>`` of a bijective table."""
    if not gate.is_bijective():
        raise ValueError("only bijective tables lift to unitaries")
    dim = len(gate.table)
    u = np.zeros((dim, dim), dtype=complex)
    for row, out in enumerate(gate.table):
        u[out, row] = 1.0
    return u


def lift_to_quantum(c: Circuit) -> Circuit:
    """Same wiring, each Boolean gate replaced by its permutation matrix."""
    if c.kind != "boolean":
        raise ValueError("lift_to_quantum needs a Boolean circuit")
    gates = {name: QuantumGate(g.inputs, g.outputs, permutation_unitary(g))
             for name, g in c.gates.items()}
    return Circuit("quantum", c.inputs, c.outputs, gates, c.provider)
