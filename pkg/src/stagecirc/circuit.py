"""Circuit data model: gates with labeled ports, the provider map, and validators.

Nodes are addressed by :class:`NodeRef` values.  Producers are circuit
input nodes and gate output ports; consumers are circuit output nodes and
gate input ports.  A circuit's wiring is its *provider* map, sending every
consumer to the producer it reads from.
"""

from __future__ import annotations

import hashlib
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Union

import numpy as np

from .errors import InvalidCircuit, MixedCircuit, NotInjective, UnknownGate
from .indexcore import canonical_order, check_label

MAX_TABLE_INPUTS = 10
UNITARY_TOLERANCE = 1e-9


# ---------------------------------------------------------------------------
# node references


@dataclass(frozen=True, order=True)
class InputNode:
    label: str

    def __str__(self):
        return f"in:{self.label}"


@dataclass(frozen=True, order=True)
class OutputNode:
    label: str

    def __str__(self):
        return f"out:{self.label}"


@dataclass(frozen=True, order=True)
class InputPort:
    gate: str
    label: str

    def __str__(self):
        return f"{self.gate}.{self.label}:in"


@dataclass(frozen=True, order=True)
class OutputPort:
    gate: str
    label: str

    def __str__(self):
        return f"{self.gate}.{self.label}:out"


NodeRef = Union[InputNode, OutputNode, InputPort, OutputPort]
Producer = Union[InputNode, OutputPort]
Consumer = Union[OutputNode, InputPort]

_KIND_RANK = {InputNode: 0, OutputPort: 1, InputPort: 2, OutputNode: 3}


def node_key(node: NodeRef) -> tuple:
    """Deterministic sort key for node references."""
    gate = getattr(node, "gate", "")
    return (_KIND_RANK[type(node)], gate.encode("utf-8"), node.label.encode("utf-8"))


def sorted_nodes(nodes: Iterable[NodeRef]) -> list[NodeRef]:
    return sorted(nodes, key=node_key)


def is_producer(node) -> bool:
    return isinstance(node, (InputNode, OutputPort))


def is_consumer(node) -> bool:
    return isinstance(node, (OutputNode, InputPort))


def parse_ref(text: str) -> NodeRef:
    """Inverse of ``str`` on node references.

    Grammar: ``in:<label>``, ``out:<label>``, ``<gate>.<label>:in`` and
    ``<gate>.<label>:out``.  Gate names never contain ``.`` or ``:``, so
    the split is unambiguous.
    """
    if not isinstance(text, str):
        raise ValueError(f"node reference must be a string, got {text!r}")
    if text.startswith("in:") and len(text) > 3:
        return InputNode(text[3:])
    if text.startswith("out:") and len(text) > 4:
        return OutputNode(text[4:])
    head, sep, direction = text.rpartition(":")
    if sep and direction in ("in", "out"):
        gate, dot, label = head.partition(".")
        if dot and gate and label and ":" not in gate:
            return InputPort(gate, label) if direction == "in" else OutputPort(gate, label)
    raise ValueError(f"malformed node reference {text!r}")


# ---------------------------------------------------------------------------
# gate types


def _check_ports(inputs, outputs):
    inputs = tuple(check_label(x) for x in inputs)
    outputs = tuple(check_label(x) for x in outputs)
    if len(set(inputs)) != len(inputs):
        raise ValueError(f"duplicate input labels {list(inputs)}")
    if len(set(outputs)) != len(outputs):
        raise ValueError(f"duplicate output labels {list(outputs)}")
    return inputs, outputs


@dataclass(frozen=True)
class BooleanGate:
    """A Boolean gate type stored as an explicit truth table.

    ``inputs`` and ``outputs`` are the declared port orders; they only fix
    how rows of ``table`` are numbered.  ``table[i]`` is the output index
    for input index ``i``, both big-endian over the declared orders.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    table: tuple[int, ...]

    def __post_init__(self):
        inputs, outputs = _check_ports(self.inputs, self.outputs)
        if len(inputs) > MAX_TABLE_INPUTS:
            raise ValueError(f"truth tables are limited to {MAX_TABLE_INPUTS} inputs")
        table = tuple(int(v) for v in self.table)
        if len(table) != 2 ** len(inputs):
            raise ValueError(f"table needs {2 ** len(inputs)} rows, got {len(table)}")
        if any(not 0 <= v < 2 ** len(outputs) for v in table):
            raise ValueError(f"table entries must lie in [0, {2 ** len(outputs)})")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "table", table)

    @classmethod
    def from_function(cls, inputs, outputs, fn) -> BooleanGate:
        """Tabulate ``fn``, which maps an input assignment dict to an output dict."""
        inputs, outputs = tuple(inputs), tuple(outputs)
        rows = []
        for i in range(2 ** len(inputs)):
            a = {lab: (i >> (len(inputs) - 1 - k)) & 1 for k, lab in enumerate(inputs)}
            b = fn(a)
            rows.append(sum(b[lab] << (len(outputs) - 1 - k) for k, lab in enumerate(outputs)))
        return cls(inputs, outputs, tuple(rows))

    @property
    def input_set(self) -> frozenset[str]:
        return frozenset(self.inputs)

    @property
    def output_set(self) -> frozenset[str]:
        return frozenset(self.outputs)

    def apply(self, bits: Mapping[str, int]) -> dict[str, int]:
        row = 0
        for lab in self.inputs:
            row = (row << 1) | bits[lab]
        out = self.table[row]
        m = len(self.outputs)
        return {lab: (out >> (m - 1 - k)) & 1 for k, lab in enumerate(self.outputs)}

    def is_bijective(self) -> bool:
        return len(self.inputs) == len(self.outputs) and len(set(self.table)) == len(self.table)


@dataclass(frozen=True, eq=False)
class QuantumGate:
    """A quantum gate type: ``matrix`` maps the input ports' qubits to the output ports'.

    Rows are indexed big-endian over ``outputs`` and columns over
    ``inputs``, in the declared orders.
    """

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        inputs, outputs = _check_ports(self.inputs, self.outputs)
        u = np.array(self.matrix, dtype=complex)
        if u.ndim != 2 or u.shape != (2 ** len(outputs), 2 ** len(inputs)):
            raise ValueError(
                f"matrix of shape {u.shape} does not map {len(inputs)} qubits to {len(outputs)}"
            )
        u.setflags(write=False)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "matrix", u)

    @property
    def input_set(self) -> frozenset[str]:
        return frozenset(self.inputs)

    @property
    def output_set(self) -> frozenset[str]:
        return frozenset(self.outputs)

    def unitarity_deviation(self) -> float:
        """max(||U^H U - I||_F, ||U U^H - I||_F); infinite for non-square matrices."""
        u = self.matrix
        if u.shape[0] != u.shape[1]:
            return float("inf")
        eye = np.eye(u.shape[0])
        return float(max(
            np.linalg.norm(u.conj().T @ u - eye),
            np.linalg.norm(u @ u.conj().T - eye),
        ))

    def is_unitary(self, tol: float = UNITARY_TOLERANCE) -> bool:
        return self.unitarity_deviation() <= tol

    def __eq__(self, other):
        if not isinstance(other, QuantumGate):
            return NotImplemented
        return (self.inputs == other.inputs and self.outputs == other.outputs
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.inputs, self.outputs, self.matrix.tobytes()))


Gate = Union[BooleanGate, QuantumGate]


# ---------------------------------------------------------------------------
# circuits


@dataclass(frozen=True, eq=False)
class Circuit:
    """A Boolean or quantum circuit.

    Construction only checks shapes and types; call :func:`validate` (or
    let the file parser do it) before relying on the circuit being
    well formed.
    """

    kind: str
    inputs: frozenset[str]
    outputs: frozenset[str]
    gates: Mapping[str, Gate]
    provider: Mapping[NodeRef, NodeRef] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("boolean", "quantum"):
            raise ValueError(f"kind must be 'boolean' or 'quantum', got {self.kind!r}")
        expected = BooleanGate if self.kind == "boolean" else QuantumGate
        for name, gate in self.gates.items():
            if not isinstance(gate, (BooleanGate, QuantumGate)):
                raise TypeError(f"gate {name!r} has type {type(gate).__name__}")
            if not isinstance(gate, expected):
                raise MixedCircuit(
                    f"gate {name!r} is {type(gate).__name__} in a {self.kind} circuit"
                )
        for w in list(self.inputs) + list(self.outputs):
            if not isinstance(w, str):
                raise TypeError(f"circuit node labels must be strings, got {w!r}")
        node_types = (InputNode, OutputNode, InputPort, OutputPort)
        for consumer, producer in dict(self.provider).items():
            if not isinstance(consumer, node_types) or not isinstance(producer, node_types):
                raise TypeError(f"provider entries must be node references: {consumer!r}")
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        object.__setattr__(self, "gates", MappingProxyType(dict(self.gates)))
        object.__setattr__(self, "provider", MappingProxyType(dict(self.provider)))

    # -- node sets

    @cached_property
    def producers(self) -> frozenset[Producer]:
        nodes = {InputNode(w) for w in self.inputs}
        for name, gate in self.gates.items():
            nodes.update(OutputPort(name, m) for m in gate.outputs)
        return frozenset(nodes)

    @cached_property
    def consumers(self) -> frozenset[Consumer]:
        nodes = {OutputNode(w) for w in self.outputs}
        for name, gate in self.gates.items():
            nodes.update(InputPort(name, l) for l in gate.inputs)
        return frozenset(nodes)

    @property
    def nodes(self) -> frozenset[NodeRef]:
        return self.producers | self.consumers

    def gate(self, name: str) -> Gate:
        try:
            return self.gates[name]
        except KeyError:
            raise UnknownGate(f"no gate named {name!r}") from None

    def gate_names(self) -> list[str]:
        return canonical_order(self.gates)

    # -- derived relations

    @cached_property
    def prerequisites(self) -> Mapping[str, frozenset[str]]:
        """gate -> its direct prerequisites, read off the provider map."""
        prereq = {name: set() for name in self.gates}
        for consumer, producer in self.provider.items():
            if (isinstance(consumer, InputPort) and consumer.gate in prereq
                    and isinstance(producer, OutputPort) and producer.gate in self.gates):
                prereq[consumer.gate].add(producer.gate)
        return MappingProxyType({k: frozenset(v) for k, v in prereq.items()})

    @cached_property
    def consumers_of(self) -> Mapping[Producer, tuple[Consumer, ...]]:
        inverse = defaultdict(list)
        for consumer, producer in self.provider.items():
            inverse[producer].append(consumer)
        return MappingProxyType({p: tuple(sorted_nodes(cs)) for p, cs in inverse.items()})

    @property
    def provider_is_injective(self) -> bool:
        return all(len(cs) == 1 for cs in self.consumers_of.values())

    @cached_property
    def fingerprint(self) -> str:
        """Content hash identifying this circuit (used to tag stages)."""
        h = hashlib.sha256()
        h.update(self.kind.encode())
        for w in canonical_order(self.inputs):
            h.update(b"I" + w.encode())
        for w in canonical_order(self.outputs):
            h.update(b"O" + w.encode())
        for name in self.gate_names():
            gate = self.gates[name]
            h.update(b"G" + name.encode() + repr((gate.inputs, gate.outputs)).encode())
            if isinstance(gate, BooleanGate):
                h.update(repr(gate.table).encode())
            else:
                h.update(gate.matrix.tobytes())
        for consumer in sorted_nodes(self.provider):
            h.update(f"W{consumer}={self.provider[consumer]}".encode())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.kind == other.kind and self.inputs == other.inputs
                and self.outputs == other.outputs and dict(self.gates) == dict(other.gates)
                and dict(self.provider) == dict(other.provider))

    def __hash__(self):
        return hash(self.fingerprint)


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Problem:
    code: str
    message: str
    nodes: tuple = ()


@dataclass
class Report:
    """Outcome of a checker.  Truthy iff no errors were found; warnings are lint."""

    errors: list[Problem] = field(default_factory=list)
    warnings: list[Problem] = field(default_factory=list)
    facts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok

    def error(self, code, message, nodes=()):
        self.errors.append(Problem(code, message, tuple(nodes)))

    def warn(self, code, message, nodes=()):
        self.warnings.append(Problem(code, message, tuple(nodes)))

    def codes(self) -> list[str]:
        return [p.code for p in self.errors]

    def lines(self) -> list[str]:
        out = [f"error[{p.code}]: {p.message}" for p in self.errors]
        out += [f"warning[{p.code}]: {p.message}" for p in self.warnings]
        return out


def _find_cycles(succ: Mapping[str, Iterable[str]]) -> list[list[str]]:
    """One simple cycle per cyclic strongly connected component (Tarjan)."""
    index, low, on_stack, stack, sccs = {}, {}, set(), [], []
    counter = 0
    for root in canonical_order(succ):
        if root in index:
            continue
        work = [(root, iter(canonical_order(succ[root])))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(canonical_order(succ[w]))))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    low[work[-1][0]] = min(low[work[-1][0]], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    sccs.append(set(comp))

    cycles = []
    for comp in sccs:
        start = canonical_order(comp)[0]
        if len(comp) == 1 and start not in succ[start]:
            continue
        # walk inside the component back to start (BFS for a shortest cycle)
        parent, frontier, found = {}, [start], None
        seen = set()
        while frontier and found is None:
            nxt = []
            for v in frontier:
                for w in canonical_order(succ[v]):
                    if w not in comp:
                        continue
                    if w == start:
                        found = v
                        break
                    if w not in seen:
                        seen.add(w)
                        parent[w] = v
                        nxt.append(w)
                if found is not None:
                    break
            frontier = nxt
        path = [found]
        while path[-1] != start:
            path.append(parent[path[-1]])
        cycles.append(path[::-1])
    return cycles


def validate(c: Circuit) -> Report:
    """Check the formal definition: labels, provider totality and range, acyclicity.

    Never raises on malformed input; every violation lands in the report.
    Dangling producers are reported as warnings (allowed for Boolean circuits).
    """
    report = Report()
    if "" in c.inputs or "" in c.outputs:
        report.error("bad-label", "circuit node labels must be nonempty")
    for name in c.gate_names():
        if not name or "." in name or ":" in name:
            report.error("bad-gate-name",
                         f"gate name {name!r} must be nonempty and free of '.' and ':'")

    consumers = c.consumers
    producers = c.producers
    for consumer in sorted_nodes(consumers):
        if consumer not in c.provider:
            report.error("missing-provider", f"consumer {consumer} has no provider", [consumer])
    for consumer in sorted_nodes(c.provider):
        producer = c.provider[consumer]
        for node in (consumer, producer):
            gate = getattr(node, "gate", None)
            if gate is not None and gate not in c.gates:
                report.error("unknown-gate", f"{node} refers to unknown gate {gate!r}", [node])
        if consumer not in consumers:
            if is_producer(consumer):
                report.error("not-a-consumer", f"{consumer} is a producer, not a consumer",
                             [consumer])
            elif getattr(consumer, "gate", None) in c.gates or isinstance(consumer, OutputNode):
                report.error("unknown-consumer", f"{consumer} is not a node of the circuit",
                             [consumer])
        if producer not in producers:
            if is_consumer(producer):
                report.error("not-a-producer",
                             f"{consumer} is provided by {producer}, which is a consumer",
                             [consumer, producer])
            elif getattr(producer, "gate", None) in c.gates or isinstance(producer, InputNode):
                report.error("unknown-producer",
                             f"{consumer} is provided by {producer}, which is not a node",
                             [consumer, producer])

    for cycle in _find_cycles(_successors(c)):
        report.error("cycle", "prerequisite cycle " + " -> ".join(cycle + [cycle[0]]),
                     tuple(cycle))
        report.facts.setdefault("cycles", []).append(cycle)

    dangling = sorted_nodes(producers - set(c.provider.values()))
    for p in dangling:
        report.warn("dangling-producer", f"producer {p} is never consumed", [p])
    return report


def _successors(c: Circuit) -> dict[str, set[str]]:
    succ = {name: set() for name in c.gates}
    for h, prereqs in c.prerequisites.items():
        for g in prereqs:
            succ[g].add(h)
    return succ


def require_valid(c: Circuit) -> Circuit:
    report = _validation_cache(c)
    if not report.ok:
        raise InvalidCircuit("invalid circuit: " + "; ".join(report.lines()[:5]), report)
    return c


def _validation_cache(c: Circuit) -> Report:
    cached = c.__dict__.get("_validation")
    if cached is None:
        cached = validate(c)
        c.__dict__["_validation"] = cached
    return cached


def direct_prerequisites(c: Circuit, h: str) -> frozenset[str]:
    """Gates with an output port feeding some input port of ``h``."""
    c.gate(h)
    return c.prerequisites[h]


def providers_of_gate(c: Circuit, g: str) -> frozenset[Producer]:
    """The image of ``g``'s input ports under the provider map."""
    gate = c.gate(g)
    return frozenset(c.provider[InputPort(g, l)] for l in gate.inputs
                     if InputPort(g, l) in c.provider)


def check_balanced(c: Circuit) -> Report:
    """Every gate table and the provider map must be bijections.

    On success ``facts`` records the arity of every gate and ``|I|``, ``|O|``;
    the counting consequences are asserted.
    """
    if c.kind != "boolean":
        raise InvalidCircuit("check_balanced needs a Boolean circuit")
    require_valid(c)
    report = Report()
    for name in c.gate_names():
        gate = c.gates[name]
        if len(gate.inputs) != len(gate.outputs):
            report.error("gate-not-bijective",
                         f"gate {name} maps {len(gate.inputs)} bits to {len(gate.outputs)}",
                         [name])
        elif not gate.is_bijective():
            dup = [v for v, k in Counter(gate.table).items() if k > 1]
            report.error("gate-not-bijective",
                         f"gate {name} table repeats output rows {dup}", [name])
    _provider_bijectivity(c, report)
    if report.ok:
        arities = {name: (len(g.inputs), len(g.outputs)) for name, g in c.gates.items()}
        assert all(i == o for i, o in arities.values())
        assert sum(i for i, _ in arities.values()) == sum(o for _, o in arities.values())
        assert len(c.inputs) == len(c.outputs)
        report.facts.update(arities=arities, num_inputs=len(c.inputs),
                            num_outputs=len(c.outputs))
    return report


def _provider_bijectivity(c: Circuit, report: Report) -> None:
    for producer in sorted_nodes(c.consumers_of):
        users = c.consumers_of[producer]
        if len(users) > 1:
            report.error("fan-out",
                         f"producer {producer} feeds {len(users)} consumers: "
                         + ", ".join(map(str, users)),
                         (producer,) + users)
    for producer in sorted_nodes(c.producers - set(c.consumers_of)):
        report.error("dangling-producer", f"producer {producer} is never consumed", [producer])


def check_quantum(c: Circuit) -> Report:
    """Provider bijective (no cloning, nothing discarded) and every gate unitary."""
    if c.kind != "quantum":
        raise InvalidCircuit("check_quantum needs a quantum circuit")
    require_valid(c)
    report = Report()
    _provider_bijectivity(c, report)
    deviations = {}
    for name in c.gate_names():
        dev = c.gates[name].unitarity_deviation()
        deviations[name] = dev
        if not dev <= UNITARY_TOLERANCE:
            report.error("non-unitary",
                         f"gate {name} is not unitary: deviation {dev:.3g} > {UNITARY_TOLERANCE:g}",
                         [name])
    report.facts["unitarity_deviation"] = deviations
    if report.ok:
        gate_inputs = [p for p in c.consumers if isinstance(p, InputPort)]
        assert len({c.provider[p] for p in gate_inputs}) == len(gate_inputs)
    return report


def require_quantum(c: Circuit) -> Circuit:
    cached = c.__dict__.get("_quantum_check")
    if cached is None:
        cached = check_quantum(c)
        c.__dict__["_quantum_check"] = cached
    if not cached.ok:
        raise InvalidCircuit("not a well-formed quantum circuit: "
                             + "; ".join(cached.lines()[:5]), cached)
    return c


def complete_outputs(c: Circuit, prefix: str = "_drop") -> Circuit:
    """Add one fresh output node per unconsumed producer.

    The provider map must already be injective; the result's provider is
    then bijective.  Fresh names are ``_drop0``, ``_drop1``, ... skipping
    any label already in use.
    """
    require_valid(c)
    if not c.provider_is_injective:
        shared = [str(p) for p, cs in c.consumers_of.items() if len(cs) > 1]
        raise NotInjective(f"provider has fan-out at {sorted(shared)}; completion cannot fix it")
    dangling = sorted_nodes(c.producers - set(c.consumers_of))
    if not dangling:
        return c
    outputs = set(c.outputs)
    provider = dict(c.provider)
    counter = 0
    for producer in dangling:
        while f"{prefix}{counter}" in outputs:
            counter += 1
        name = f"{prefix}{counter}"
        outputs.add(name)
        provider[OutputNode(name)] = producer
    return Circuit(c.kind, c.inputs, frozenset(outputs), c.gates, provider)
