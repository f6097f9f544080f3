"""Boolean, balanced and quantum circuits over unordered label sets.

The public surface is re-exported here; see the submodules for details.
"""

from .booleval import computed_function, eval_nodes, eval_stage
from .circuit import (
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
    validate,
)
from .document import load, parse, serialize
from .errors import CircuitError
from .indexcore import (
    LabeledState,
    apply_local_operator,
    canonical_order,
    inner_product,
    reindex_state,
    tensor_merge,
)
from .oracle import brute_force_truth_table, brute_force_unitary, exhaustive_schedule_check
from .quantumsim import (
    check_schedule_invariance,
    circuit_unitary,
    port_label,
    simulate,
    state_at_stage,
)
from .stages import (
    Stage,
    advance,
    all_stages,
    coherent_enumerations,
    exits,
    is_coherent,
    is_stage,
    ready_gates,
)

__version__ = "0.1.0"
