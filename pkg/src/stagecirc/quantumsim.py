"""Stage-indexed statevector evolution of quantum circuits.

The state at a stage lives on the qubits of its exits.  Each exit is
carried under a string label (see :func:`port_label`), and firing a gate
renames its providers' labels to the gate's output-port labels while
applying the gate matrix.  Labels of the untouched exits never change.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    Circuit,
    InputNode,
    InputPort,
    OutputNode,
    OutputPort,
    Producer,
    require_quantum,
)
from .errors import EnumerationOverflow, IncoherentSchedule, InvalidCircuit, TooManyQubits
from .indexcore import (
    MAX_QUBITS,
    LabeledState,
    apply_local_operator,
    assignment_from_index,
    canonical_order,
    max_deviation,
    reindex_state,
)
from .stages import (
    DEFAULT_ENUMERATION_CAP,
    as_stage,
    canonical_schedule,
    exits,
    is_coherent,
)

MAX_UNITARY_INPUTS = 10
SCHEDULE_TOLERANCE = 1e-10


def port_label(node: Producer) -> str:
    """Serialize a producer: ``in:<w>`` or ``out:<gate>:<m>``."""
    if isinstance(node, InputNode):
        return f"in:{node.label}"
    if isinstance(node, OutputPort):
        return f"out:{node.gate}:{node.label}"
    raise TypeError(f"{node!r} is not a producer")


def parse_port_label(text: str) -> Producer:
    if text.startswith("in:") and len(text) > 3:
        return InputNode(text[3:])
    if text.startswith("out:"):
        gate, sep, label = text[4:].partition(":")
        if sep and gate and label:
            return OutputPort(gate, label)
    raise ValueError(f"malformed port label {text!r}")


def _input_state(c: Circuit, psi: LabeledState) -> LabeledState:
    """Accept states over the raw input labels or over their port labels."""
    if psi.label_set == c.inputs:
        return reindex_state(psi, {w: port_label(InputNode(w)) for w in c.inputs})
    if psi.label_set == {port_label(InputNode(w)) for w in c.inputs}:
        return psi
    raise InvalidCircuit(f"input state is over {list(psi.labels)}, "
                         f"expected the circuit inputs {canonical_order(c.inputs)}")


def _check_width(c: Circuit) -> None:
    if len(c.inputs) > MAX_QUBITS:
        raise TooManyQubits(f"{len(c.inputs)} qubits exceeds {MAX_QUBITS}")


def fire_gate(c: Circuit, state: LabeledState, g: str) -> LabeledState:
    """``(I_R (x) U_g)`` on a stage state at which ``g`` is ready."""
    gate = c.gates[g]
    targets_in = [port_label(c.provider[InputPort(g, l)]) for l in gate.inputs]
    targets_out = [port_label(OutputPort(g, m)) for m in gate.outputs]
    return apply_local_operator(state, targets_in, gate.matrix, targets_out)


def _run(c: Circuit, state: LabeledState, schedule: Sequence[str]) -> LabeledState:
    for g in schedule:
        state = fire_gate(c, state, g)
    return state


def state_at_stage(c: Circuit, psi: LabeledState, z) -> LabeledState:
    """The state on the exits of stage ``z`` reached from input state ``psi``.

    The result is labeled by :func:`port_label` of the exits.
    """
    require_quantum(c)
    _check_width(c)
    z = as_stage(c, z)
    state = _run(c, _input_state(c, psi), canonical_schedule(c, within=z))
    assert state.label_set == {port_label(p) for p in exits(c, z)}
    return state


@dataclass
class SimulationTrace:
    schedule: tuple[str, ...]
    final: LabeledState
    norms: list[float]
    states: list[LabeledState] | None = None

    @property
    def max_norm_drift(self) -> float:
        return max(abs(n - self.norms[0]) for n in self.norms)


def simulate(c: Circuit, psi: LabeledState, schedule: Sequence[str] | None = None,
             keep_states: bool = False) -> SimulationTrace:
    """Fire all gates in ``schedule`` (default: the canonical coherent order).

    ``norms`` always has one entry per stage along the run; the states
    themselves are kept only with ``keep_states``.
    """
    require_quantum(c)
    _check_width(c)
    if schedule is None:
        schedule = canonical_schedule(c)
    else:
        schedule = tuple(schedule)
        if not is_coherent(c, schedule):
            raise IncoherentSchedule(f"schedule {list(schedule)} fires a gate before "
                                     "one of its prerequisites")
    state = _input_state(c, psi)
    norms = [state.norm()]
    states = [state] if keep_states else None
    for g in schedule:
        state = fire_gate(c, state, g)
        norms.append(state.norm())
        if keep_states:
            states.append(state)
    return SimulationTrace(tuple(schedule), state, norms, states)


def circuit_unitary(c: Circuit, z=None) -> np.ndarray:
    """Matrix of ``psi -> state_at_stage(c, psi, z)`` (default: all gates).

    Columns follow the canonical order of the inputs, rows the canonical
    order of the exits' port labels.
    """
    require_quantum(c)
    if len(c.inputs) > MAX_UNITARY_INPUTS:
        raise TooManyQubits(f"{len(c.inputs)} inputs exceeds {MAX_UNITARY_INPUTS}")
    z = as_stage(c, frozenset(c.gates) if z is None else z)
    if len(exits(c, z)) > MAX_QUBITS:
        raise TooManyQubits("too many exit qubits")
    schedule = canonical_schedule(c, within=z)
    ins = canonical_order(c.inputs)
    columns = []
    for j in range(2 ** len(ins)):
        psi = LabeledState.basis(assignment_from_index(j, ins))
        columns.append(_run(c, _input_state(c, psi), schedule).amplitudes)
    return np.column_stack(columns) if columns else np.zeros((1, 0), dtype=complex)


def exit_labels(c: Circuit, z=None) -> list[str]:
    """Row labels of :func:`circuit_unitary`, in order."""
    z = frozenset(c.gates) if z is None else z
    return canonical_order(port_label(p) for p in exits(c, z))


def output_state(c: Circuit, final: LabeledState) -> LabeledState:
    """Rename a final-stage state from exit labels to the output nodes they feed."""
    rename = {port_label(c.provider[OutputNode(w)]): w for w in c.outputs}
    return reindex_state(final, rename)


def output_unitary(c: Circuit) -> np.ndarray:
    """:func:`circuit_unitary` with rows ordered by the canonical output labels."""
    u = circuit_unitary(c)
    rows = exit_labels(c)
    cols = [output_state(c, LabeledState(rows, u[:, j])).amplitudes for j in range(u.shape[1])]
    return np.column_stack(cols) if cols else u


@dataclass
class InvarianceReport:
    schedules: int
    max_deviation: float
    max_norm_drift: float
    tolerance: float = SCHEDULE_TOLERANCE
    finals: dict = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tolerance and self.max_norm_drift <= self.tolerance


def check_schedule_invariance(c: Circuit, psi: LabeledState,
                              cap: int | None = DEFAULT_ENUMERATION_CAP,
                              keep_finals: bool = False) -> InvarianceReport:
    """Run every coherent enumeration and compare the final states.

    The enumerations are walked as a prefix tree, so a shared prefix is
    simulated once; each leaf is still the product of that schedule's own
    gate operators.  Deviation is the largest amplitude difference between
    any two final states.
    """
    require_quantum(c)
    _check_width(c)
    start = _input_state(c, psi)
    norm0 = start.norm()
    gates = frozenset(c.gates)
    finals: dict[tuple[str, ...], LabeledState] = {}
    drift = 0.0

    def walk(state, placed, prefix):
        nonlocal drift
        drift = max(drift, abs(state.norm() - norm0))
        if len(prefix) == len(gates):
            if cap is not None and len(finals) >= cap:
                raise EnumerationOverflow(f"more than {cap} coherent enumerations")
            finals[prefix] = state
            return
        for g in canonical_order(gates - placed):
            if c.prerequisites[g] <= placed:
                walk(fire_gate(c, state, g), placed | {g}, prefix + (g,))

    walk(start, frozenset(), ())
    stacked = np.stack([s.amplitudes for s in finals.values()])
    assert len({s.labels for s in finals.values()}) == 1
    return InvarianceReport(len(finals), _max_pairwise(stacked), drift,
                            finals=finals if keep_finals else {})


def _max_pairwise(stacked: np.ndarray) -> float:
    best = 0.0
    for i in range(stacked.shape[0] - 1):
        best = max(best, float(np.max(np.abs(stacked[i + 1:] - stacked[i]), initial=0.0)))
    return best


def trace_deviation(t1: SimulationTrace, t2: SimulationTrace) -> float:
    return max_deviation(t1.final, t2.final)
