"""Stages, exits, readiness and coherent enumerations of a circuit's gates.

A stage is a set of gates closed under direct prerequisites: the gates that
have already fired.  Its exits are the producers whose values exist but
have not been consumed by any gate of the stage.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

from .circuit import (
    Circuit,
    InputNode,
    OutputPort,
    Producer,
    providers_of_gate,
    require_valid,
)
from .errors import (
    EnumerationOverflow,
    NotAPermutation,
    NotAStage,
    NotReady,
    UnknownGate,
)
from .indexcore import canonical_order

DEFAULT_ENUMERATION_CAP = 10_000


@dataclass(frozen=True)
class Stage:
    gates: frozenset[str]
    circuit_id: str

    def __contains__(self, gate):
        return gate in self.gates

    def __iter__(self):
        return iter(canonical_order(self.gates))

    def __len__(self):
        return len(self.gates)


def _gate_set(c: Circuit, z) -> frozenset[str]:
    if isinstance(z, Stage):
        if z.circuit_id != c.fingerprint:
            raise NotAStage("stage belongs to a different circuit")
        return z.gates
    z = frozenset(z)
    unknown = z - set(c.gates)
    if unknown:
        raise UnknownGate(f"unknown gates {canonical_order(unknown)}")
    return z


def is_stage(c: Circuit, z: Iterable[str]) -> bool:
    gates = _gate_set(c, z)
    return all(c.prerequisites[g] <= gates for g in gates)


def as_stage(c: Circuit, z) -> Stage:
    """Check ``z`` is prerequisite-closed and tag it with ``c``."""
    if isinstance(z, Stage):
        _gate_set(c, z)
        return z
    gates = _gate_set(c, z)
    missing = {g: c.prerequisites[g] - gates for g in gates if not c.prerequisites[g] <= gates}
    if missing:
        g = canonical_order(missing)[0]
        raise NotAStage(f"gate {g} is in the set but its prerequisites "
                        f"{canonical_order(missing[g])} are not")
    return Stage(gates, c.fingerprint)


def empty_stage(c: Circuit) -> Stage:
    return Stage(frozenset(), c.fingerprint)


def full_stage(c: Circuit) -> Stage:
    return Stage(frozenset(c.gates), c.fingerprint)


def exits(c: Circuit, z) -> frozenset[Producer]:
    """Input nodes and output ports of gates in ``z`` not consumed by any gate of ``z``."""
    z = as_stage(c, z)
    produced = {InputNode(w) for w in c.inputs}
    consumed = set()
    for g in z.gates:
        produced.update(OutputPort(g, m) for m in c.gates[g].outputs)
        consumed |= providers_of_gate(c, g)
    return frozenset(produced - consumed)


def ready_gates(c: Circuit, z) -> frozenset[str]:
    z = as_stage(c, z)
    return frozenset(g for g in c.gates
                     if g not in z.gates and c.prerequisites[g] <= z.gates)


def advance(c: Circuit, z, g: str, current_exits: Iterable[Producer] | None = None
            ) -> tuple[Stage, frozenset[Producer]]:
    """Fire the ready gate ``g``: returns ``Z+G`` and its exits.

    The exits are updated incrementally: the providers of ``g`` are removed
    and its output ports added.  ``current_exits`` saves recomputing the
    exits of ``z`` when the caller already has them.
    """
    z = as_stage(c, z)
    gate = c.gate(g)
    if g in z.gates:
        raise NotReady(f"gate {g} has already fired")
    if not c.prerequisites[g] <= z.gates:
        raise NotReady(f"gate {g} still waits on {canonical_order(c.prerequisites[g] - z.gates)}")
    before = frozenset(current_exits) if current_exits is not None else exits(c, z)
    consumed = providers_of_gate(c, g)
    if c.provider_is_injective:
        # without fan-out the exits split as R + pi(g)
        assert consumed <= before, f"providers of {g} are not all exits"
    produced = frozenset(OutputPort(g, m) for m in gate.outputs)
    return Stage(z.gates | {g}, z.circuit_id), (before - consumed) | produced


def coherent_enumerations(c: Circuit, cap: int | None = DEFAULT_ENUMERATION_CAP,
                          within: Iterable[str] | None = None) -> Iterator[tuple[str, ...]]:
    """Lazily yield every linear extension of the prerequisite order.

    Ready gates are tried in canonical name order, so the first sequence
    yielded is the canonical schedule.  ``within`` restricts to the gates
    of a stage.  More than ``cap`` sequences raises
    :class:`EnumerationOverflow` (``cap=None`` disables the guard).
    """
    require_valid(c)
    universe = frozenset(c.gates) if within is None else as_stage(c, within).gates
    prereq = {g: c.prerequisites[g] for g in universe}
    count = 0
    prefix: list[str] = []
    placed: set[str] = set()

    def ready():
        return [g for g in canonical_order(universe - placed) if prereq[g] <= placed]

    stack = [iter(ready())]
    while stack:
        nxt = next(stack[-1], None)
        if nxt is None:
            stack.pop()
            if prefix:
                placed.discard(prefix.pop())
            continue
        prefix.append(nxt)
        placed.add(nxt)
        if len(prefix) == len(universe):
            count += 1
            if cap is not None and count > cap:
                raise EnumerationOverflow(f"more than {cap} coherent enumerations")
            yield tuple(prefix)
            placed.discard(prefix.pop())
        else:
            stack.append(iter(ready()))
    if not universe:
        # the loop above never yields for zero gates
        yield ()


def canonical_schedule(c: Circuit, within: Iterable[str] | None = None) -> tuple[str, ...]:
    return next(coherent_enumerations(c, cap=None, within=within))


def is_coherent(c: Circuit, seq: Sequence[str]) -> bool:
    """True iff every prerequisite precedes the gates depending on it."""
    seq = list(seq)
    if sorted(seq) != sorted(c.gates):
        raise NotAPermutation(f"{seq} is not a permutation of the gates {c.gate_names()}")
    position = {g: i for i, g in enumerate(seq)}
    return all(position[f] < position[g] for g in seq for f in c.prerequisites[g])


def all_stages(c: Circuit) -> list[Stage]:
    """Every stage, ordered by size then by sorted gate names."""
    require_valid(c)
    seen = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for z in frontier:
            for g in c.gates:
                if g not in z and c.prerequisites[g] <= z:
                    bigger = z | {g}
                    if bigger not in seen:
                        seen.add(bigger)
                        nxt.append(bigger)
        frontier = nxt
    ordered = sorted(seen, key=lambda z: (len(z), [g.encode() for g in canonical_order(z)]))
    return [Stage(z, c.fingerprint) for z in ordered]
