"""Boolean evaluation: a bit at every node, the computed function, and stage states."""

from __future__ import annotations

from collections.abc import Mapping

from .circuit import (
    Circuit,
    InputNode,
    InputPort,
    NodeRef,
    OutputNode,
    OutputPort,
    Producer,
    require_valid,
)
from .errors import InvalidCircuit, TooManyInputs
from .indexcore import assignment_from_index, assignment_to_bits, canonical_order
from .stages import as_stage, canonical_schedule, exits

MAX_TABLE_INPUTS = 20


def _check_boolean(c: Circuit) -> None:
    if c.kind != "boolean":
        raise InvalidCircuit("Boolean evaluation needs a Boolean circuit")
    require_valid(c)


def _check_input(c: Circuit, a: Mapping[str, int]) -> None:
    if set(a) != set(c.inputs):
        raise ValueError(f"input assignment covers {canonical_order(a)}, "
                         f"expected {canonical_order(c.inputs)}")
    bad = [w for w, bit in a.items() if bit not in (0, 1)]
    if bad:
        raise ValueError(f"non-binary input bits at {canonical_order(bad)}")


def eval_nodes(c: Circuit, a: Mapping[str, int]) -> dict[NodeRef, int]:
    """The unique bit valuation of every node for input ``a``.

    Gate outputs are computed on demand, starting from the output nodes;
    gates that feed no output are evaluated afterwards so the valuation is
    total.
    """
    _check_boolean(c)
    _check_input(c, a)
    gate_out: dict[str, dict[str, int]] = {}

    def producer_value(p: Producer) -> int:
        if isinstance(p, InputNode):
            return a[p.label]
        return gate_out[p.gate][p.label]

    def fire(root: str) -> None:
        # iterative post-order over the prerequisite relation
        stack = [root]
        while stack:
            g = stack[-1]
            if g in gate_out:
                stack.pop()
                continue
            waiting = [f for f in c.prerequisites[g] if f not in gate_out]
            if waiting:
                stack.extend(sorted(waiting))
                continue
            gate = c.gates[g]
            bits = {l: producer_value(c.provider[InputPort(g, l)]) for l in gate.inputs}
            gate_out[g] = gate.apply(bits)
            stack.pop()

    for w in canonical_order(c.outputs):
        p = c.provider[OutputNode(w)]
        if isinstance(p, OutputPort):
            fire(p.gate)
    for g in c.gate_names():
        fire(g)

    values: dict[NodeRef, int] = {InputNode(w): a[w] for w in c.inputs}
    for g, outs in gate_out.items():
        for m, bit in outs.items():
            values[OutputPort(g, m)] = bit
    for consumer, producer in c.provider.items():
        values[consumer] = values[producer]
    return values


def output_assignment(c: Circuit, a: Mapping[str, int]) -> dict[str, int]:
    values = eval_nodes(c, a)
    return {w: values[OutputNode(w)] for w in c.outputs}


def computed_function(c: Circuit) -> dict[str, str]:
    """The function ``{0,1}^I -> {0,1}^O`` as a table of bit strings.

    Keys and values are bit strings over the canonical orders of ``I`` and
    ``O``.  Rows are listed in increasing input index.
    """
    _check_boolean(c)
    if len(c.inputs) > MAX_TABLE_INPUTS:
        raise TooManyInputs(f"{len(c.inputs)} inputs exceeds {MAX_TABLE_INPUTS}")
    ins, outs = canonical_order(c.inputs), canonical_order(c.outputs)
    table = {}
    for i in range(2 ** len(ins)):
        a = assignment_from_index(i, ins)
        table[assignment_to_bits(a, ins)] = assignment_to_bits(output_assignment(c, a), outs)
    return table


def step_stage(c: Circuit, values: Mapping[Producer, int], g: str,
               keep: frozenset[Producer] = frozenset()) -> dict[Producer, int]:
    """Fire ``g`` on a stage state: apply its table to the provider coordinates.

    The rest of the state passes through unchanged.  Providers of ``g`` are
    dropped unless listed in ``keep`` (still awaited by a later gate through
    fan-out).
    """
    gate = c.gates[g]
    providers = {l: c.provider[InputPort(g, l)] for l in gate.inputs}
    result = gate.apply({l: values[p] for l, p in providers.items()})
    out = {p: v for p, v in values.items()
           if p not in providers.values() or p in keep}
    for m, bit in result.items():
        out[OutputPort(g, m)] = bit
    return out


def eval_stage(c: Circuit, a: Mapping[str, int], z) -> dict[Producer, int]:
    """Bits on the exits of stage ``z``, folding gate tables along a schedule of ``z``.

    Starts from ``a`` on the input nodes and fires the gates of ``z`` in
    canonical coherent order.  With an injective provider map each step is
    exactly "apply the gate to its providers, keep the rest".  Under
    fan-out a producer may be read by several gates of ``z``; its value is
    kept until its last reader inside ``z`` has fired.
    """
    _check_boolean(c)
    _check_input(c, a)
    z = as_stage(c, z)
    order = canonical_schedule(c, within=z)
    last_use: dict[Producer, int] = {}
    for i, g in enumerate(order):
        for l in c.gates[g].inputs:
            last_use[c.provider[InputPort(g, l)]] = i
    values: dict[Producer, int] = {InputNode(w): bit for w, bit in a.items()}
    for i, g in enumerate(order):
        keep = frozenset(p for p, last in last_use.items() if last > i)
        values = step_stage(c, values, g, keep)
    assert set(values) == exits(c, z)
    return values
