"""Brute-force reference semantics, kept deliberately apart from the main evaluators.

The reference builders use nothing from :mod:`stagecirc.indexcore`,
:mod:`stagecirc.quantumsim` or :mod:`stagecirc.booleval`.  The
whole-circuit operator is built from explicit ``np.kron`` factors and
permutation matrices; the Boolean table comes from a naive fixpoint sweep
with no topological ordering.  :func:`exhaustive_schedule_check` is the
exception: it drives the main simulator along adjacent-swap chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, InputNode, InputPort, OutputNode, OutputPort
from .errors import EnumerationOverflow, TooManyInputs, TooManyQubits
from .quantumsim import simulate
from .stages import coherent_enumerations, is_coherent

MAX_ORACLE_QUBITS = 8
MAX_ORACLE_INPUTS = 16


def _sorted_labels(labels):
    return sorted(labels, key=lambda s: s.encode("utf-8"))


def _wire_name(node) -> str:
    if isinstance(node, InputNode):
        return "in:" + node.label
    return "out:" + node.gate + ":" + node.label


@dataclass
class DenseOperator:
    in_labels: list[str]
    out_labels: list[str]
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (2 ** len(self.out_labels), 2 ** len(self.in_labels)):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match labels")


def permutation_matrix(src: list[str], dst: list[str]) -> np.ndarray:
    """Matrix moving a state whose qubits are listed as ``src`` to the listing ``dst``.

    Both lists hold the same wire names; basis indices are big-endian.
    """
    n = len(src)
    where = [src.index(name) for name in dst]
    p = np.zeros((2 ** n, 2 ** n))
    for i in range(2 ** n):
        bits = [(i >> (n - 1 - k)) & 1 for k in range(n)]
        j = 0
        for k in range(n):
            j = j * 2 + bits[where[k]]
        p[j, i] = 1.0
    return p


def _schedule(c: Circuit) -> list[str]:
    """Kahn's algorithm, smallest ready name first."""
    deps = {g: set() for g in c.gates}
    for consumer, producer in c.provider.items():
        if isinstance(consumer, InputPort) and isinstance(producer, OutputPort):
            deps[consumer.gate].add(producer.gate)
    order = []
    while deps:
        ready = _sorted_labels(g for g, d in deps.items() if not d)
        g = ready[0]
        order.append(g)
        del deps[g]
        for d in deps.values():
            d.discard(g)
    return order


def brute_force_unitary(c: Circuit) -> DenseOperator:
    """Compose ``(I_R (x) U_G) P`` gate by gate over one fixed schedule.

    A running list ``wires`` records which qubit sits in which tensor slot.
    Before each gate a permutation brings the untouched wires to the front
    (in their current order) and the gate's providers to the back (in the
    gate's declared input order); then ``kron(I, U)`` acts.  The final
    operator is permuted so rows follow sorted wire names.
    """
    if c.kind != "quantum":
        raise ValueError("brute_force_unitary needs a quantum circuit")
    if len(c.inputs) > MAX_ORACLE_QUBITS:
        raise TooManyQubits(f"{len(c.inputs)} inputs exceeds {MAX_ORACLE_QUBITS}")
    wires = ["in:" + w for w in _sorted_labels(c.inputs)]
    in_labels = list(wires)
    total = np.eye(2 ** len(wires), dtype=complex)
    for g in _schedule(c):
        gate = c.gates[g]
        taken = [_wire_name(c.provider[InputPort(g, l)]) for l in gate.inputs]
        rest = [w for w in wires if w not in taken]
        arranged = rest + taken
        factor = np.kron(np.eye(2 ** len(rest)), gate.matrix)
        total = factor @ permutation_matrix(wires, arranged) @ total
        wires = rest + ["out:" + g + ":" + m for m in gate.outputs]
        if len(wires) > MAX_ORACLE_QUBITS:
            raise TooManyQubits("intermediate wire count exceeds the oracle limit")
    final = _sorted_labels(wires)
    total = permutation_matrix(wires, final) @ total
    return DenseOperator(in_labels, final, total)


def brute_force_truth_table(c: Circuit) -> dict[str, str]:
    """Tabulate the circuit by sweeping all gates until nothing changes.

    Same key/value convention as :func:`stagecirc.booleval.computed_function`.
    """
    if c.kind != "boolean":
        raise ValueError("brute_force_truth_table needs a Boolean circuit")
    if len(c.inputs) > MAX_ORACLE_INPUTS:
        raise TooManyInputs(f"{len(c.inputs)} inputs exceeds {MAX_ORACLE_INPUTS}")
    ins = _sorted_labels(c.inputs)
    outs = _sorted_labels(c.outputs)
    table = {}
    for i in range(2 ** len(ins)):
        key = format(i, f"0{len(ins)}b") if ins else ""
        values, _ = _fixpoint(c, dict(zip(ins, map(int, key))))
        table[key] = "".join(str(values[c.provider[OutputNode(w)]]) for w in outs)
    return table


def fixpoint_sweeps(c: Circuit, bits: dict[str, int]) -> int:
    return _fixpoint(c, bits)[1]


def _fixpoint(c: Circuit, bits: dict[str, int]):
    """Producer values and the number of sweeps that changed something."""
    values = {InputNode(w): b for w, b in bits.items()}
    done = set()
    sweeps = 0
    changed = True
    while changed:
        changed = False
        for g in sorted(c.gates):
            gate = c.gates[g]
            srcs = [c.provider[InputPort(g, l)] for l in gate.inputs]
            if g in done or any(s not in values for s in srcs):
                continue
            row = 0
            for s in srcs:
                row = row * 2 + values[s]
            out = gate.table[row]
            m = len(gate.outputs)
            for k, lab in enumerate(gate.outputs):
                values[OutputPort(g, lab)] = (out >> (m - 1 - k)) & 1
            done.add(g)
            changed = True
        sweeps += changed
    return values, sweeps


@dataclass
class ScheduleCheck:
    enumerations: int
    chain_lengths: list[int]
    max_deviation: float
    max_prefix_deviation: float
    all_steps_coherent: bool
    tolerance: float = 1e-10
    chains: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return (self.all_steps_coherent and self.max_deviation <= self.tolerance
                and self.max_prefix_deviation <= self.tolerance)


def exhaustive_schedule_check(c: Circuit, psi, max_gates: int = 7) -> ScheduleCheck:
    """Connect every coherent enumeration to the canonical one by adjacent swaps.

    Each chain is produced by bubble-sorting towards the canonical order, so
    its length is the number of inversions.  Every intermediate sequence is
    checked for coherence and simulated; adjacent sequences in a chain must
    agree at each shared prefix stage and all final states must agree.
    """
    if len(c.gates) > max_gates:
        raise EnumerationOverflow(f"{len(c.gates)} gates exceeds {max_gates}")
    enums = list(coherent_enumerations(c, cap=None))
    canonical = enums[0]
    rank = {g: i for i, g in enumerate(canonical)}
    traces = {}

    def trace(seq):
        if seq not in traces:
            traces[seq] = simulate(c, psi, seq, keep_states=True)
        return traces[seq]

    ref = trace(canonical).final.amplitudes
    lengths, chains = [], {}
    max_dev = max_prefix = 0.0
    coherent = True
    for seq in enums:
        chain = [seq]
        cur = list(seq)
        swapped = True
        while swapped:
            swapped = False
            for i in range(len(cur) - 1):
                if rank[cur[i]] > rank[cur[i + 1]]:
                    prev = tuple(cur)
                    cur[i], cur[i + 1] = cur[i + 1], cur[i]
                    nxt = tuple(cur)
                    coherent = coherent and is_coherent(c, nxt)
                    chain.append(nxt)
                    a, b = trace(prev), trace(nxt)
                    for k in range(len(cur) + 1):
                        if k != i + 1:  # only the stage between the swapped pair differs
                            dev = float(np.max(np.abs(a.states[k].amplitudes
                                                      - b.states[k].amplitudes)))
                            max_prefix = max(max_prefix, dev)
                    swapped = True
        assert tuple(cur) == canonical
        lengths.append(len(chain) - 1)
        chains[seq] = chain
        max_dev = max(max_dev, float(np.max(np.abs(trace(seq).final.amplitudes - ref))))
    return ScheduleCheck(len(enums), lengths, max_dev, max_prefix, coherent, chains=chains)
