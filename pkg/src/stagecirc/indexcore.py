"""Labeled tensor products over unordered finite label sets.

A :class:`LabeledState` is a vector in the tensor product of one qubit
space per label.  Labels carry no order of their own; amplitudes are
stored against the *canonical order* (labels sorted by their UTF-8
bytes) with the first canonical label as the most significant bit of
the basis index.  Every operation here is defined in terms of label
assignments, so the storage order never leaks into results.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainMismatch,
    LabelCollision,
    NotInjective,
    OutputLabelCollision,
    TooManyQubits,
    UnknownTarget,
)

MAX_QUBITS = 20
NORM_TOLERANCE = 1e-9

Label = str
BitAssignment = Mapping[Label, int]


def _byte_key(label: Label) -> bytes:
    return label.encode("utf-8")


def canonical_order(labels: Iterable[Label]) -> list[Label]:
    """Return ``labels`` sorted by the byte order of their UTF-8 encoding."""
    return sorted(set(labels), key=_byte_key)


def check_label(label) -> Label:
    if not isinstance(label, str) or not label:
        raise TypeError(f"labels must be nonempty strings, got {label!r}")
    return label


def basis_index(assignment: BitAssignment, order: Sequence[Label]) -> int:
    """Big-endian index of ``assignment`` with ``order[0]`` most significant."""
    index = 0
    for label in order:
        bit = assignment[label]
        if bit not in (0, 1):
            raise ValueError(f"bit for {label!r} must be 0 or 1, got {bit!r}")
        index = (index << 1) | bit
    return index


def assignment_from_index(index: int, order: Sequence[Label]) -> dict[Label, int]:
    n = len(order)
    return {label: (index >> (n - 1 - k)) & 1 for k, label in enumerate(order)}


def bits_to_assignment(bits: str, order: Sequence[Label]) -> dict[Label, int]:
    """Parse a string such as ``"0101"`` against an explicit label order."""
    if len(bits) != len(order) or set(bits) - {"0", "1"}:
        raise ValueError(
            f"expected {len(order)} bits over {list(order)}, got {bits!r}"
        )
    return {label: int(b) for label, b in zip(order, bits)}


def assignment_to_bits(assignment: BitAssignment, order: Sequence[Label]) -> str:
    return "".join(str(assignment[label]) for label in order)


@dataclass(frozen=True, eq=False)
class LabeledState:
    """A statevector over an unordered set of qubit labels.

    ``amplitudes`` is read-only and indexed by :func:`basis_index` over
    ``labels``, which is always the canonical order.
    """

    labels: tuple[Label, ...]
    amplitudes: np.ndarray

    def __init__(self, labels: Iterable[Label], amplitudes, normalized: bool = False):
        labels = list(labels)
        for label in labels:
            check_label(label)
        if len(set(labels)) != len(labels):
            raise LabelCollision(f"duplicate labels in {labels}")
        if len(labels) > MAX_QUBITS:
            raise TooManyQubits(f"{len(labels)} qubits exceeds the limit of {MAX_QUBITS}")
        order = canonical_order(labels)
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2 ** len(order):
            raise DimensionMismatch(
                f"{len(order)} labels need {2 ** len(order)} amplitudes, got {amps.shape[0]}"
            )
        if labels != order:
            # caller listed labels in its own order: move axes to canonical
            tensor = amps.reshape((2,) * len(labels))
            tensor = np.transpose(tensor, [labels.index(lab) for lab in order])
            amps = np.ascontiguousarray(tensor).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "labels", tuple(order))
        object.__setattr__(self, "amplitudes", amps)
        if normalized and abs(self.norm() - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"state is flagged normalized but has norm {self.norm()!r}")

    @classmethod
    def basis(cls, assignment: BitAssignment) -> LabeledState:
        """The computational basis state ``|assignment>``."""
        order = canonical_order(assignment)
        amps = np.zeros(2 ** len(order), dtype=complex)
        amps[basis_index(assignment, order)] = 1.0
        return cls(order, amps)

    @classmethod
    def scalar(cls, value: complex = 1.0) -> LabeledState:
        return cls((), [value])

    @property
    def label_set(self) -> frozenset[Label]:
        return frozenset(self.labels)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def amplitude(self, assignment: BitAssignment) -> complex:
        if set(assignment) != set(self.labels):
            raise DomainMismatch(
                f"assignment over {sorted(assignment)} does not match {list(self.labels)}"
            )
        return complex(self.amplitudes[basis_index(assignment, self.labels)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes as an n-axis array, one axis per canonical label."""
        return self.amplitudes.reshape((2,) * len(self.labels))

    def __eq__(self, other):
        if not isinstance(other, LabeledState):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash((self.labels, self.amplitudes.tobytes()))

    def __repr__(self):
        return f"LabeledState(labels={list(self.labels)!r}, amplitudes={self.amplitudes!r})"

    def allclose(self, other: LabeledState, atol: float = 1e-10) -> bool:
        return self.labels == other.labels and max_deviation(self, other) <= atol


def max_deviation(s1: LabeledState, s2: LabeledState) -> float:
    """Largest absolute amplitude difference between two states on one label set."""
    if s1.labels != s2.labels:
        raise DomainMismatch(f"{list(s1.labels)} != {list(s2.labels)}")
    if not s1.amplitudes.size:
        return 0.0
    return float(np.max(np.abs(s1.amplitudes - s2.amplitudes)))


def reindex_state(s: LabeledState, f: Mapping[Label, Label]) -> LabeledState:
    """Move ``s`` along the label bijection ``f``.

    The result lives on ``f[s.labels]`` and its amplitude at an
    assignment ``b`` is the amplitude of ``s`` at ``b o f``.
    """
    if set(f) != set(s.labels):
        raise DomainMismatch(
            f"bijection domain {canonical_order(f)} differs from state labels {list(s.labels)}"
        )
    images = [f[label] for label in s.labels]
    if len(set(images)) != len(images):
        raise NotInjective(f"labels collide under the re-indexing: {images}")
    new_order = canonical_order(images)
    # axis k of the old tensor carries label s.labels[k], renamed images[k]
    perm = [images.index(label) for label in new_order]
    amps = np.transpose(s.tensor(), perm).reshape(-1)
    return LabeledState(new_order, amps)


def tensor_merge(s1: LabeledState, s2: LabeledState) -> LabeledState:
    """Tensor product over the disjoint union of the two label sets."""
    common = s1.label_set & s2.label_set
    if common:
        raise LabelCollision(f"label sets intersect in {canonical_order(common)}")
    # fix operand order so the product is independent of argument order
    if s2.labels and (not s1.labels or _byte_key(s2.labels[0]) < _byte_key(s1.labels[0])):
        s1, s2 = s2, s1
    amps = np.multiply.outer(s1.amplitudes, s2.amplitudes).reshape(-1)
    return LabeledState(s1.labels + s2.labels, amps)


def apply_local_operator(
    s: LabeledState,
    targets_in: Sequence[Label],
    matrix,
    targets_out: Sequence[Label],
) -> LabeledState:
    """Apply ``I_R (x) U`` where ``R`` is every label of ``s`` outside ``targets_in``.

    Slot ``j`` of the operator's input basis is label ``targets_in[j]`` and
    slot ``j`` of its output basis is ``targets_out[j]``, both big-endian.
    The consumed labels disappear and ``targets_out`` take their place.
    """
    targets_in = list(targets_in)
    targets_out = list(targets_out)
    missing = [t for t in targets_in if t not in s.label_set]
    if missing:
        raise UnknownTarget(f"targets {missing} are not labels of the state")
    if len(set(targets_in)) != len(targets_in):
        raise NotInjective(f"repeated input targets {targets_in}")
    if len(set(targets_out)) != len(targets_out):
        raise OutputLabelCollision(f"repeated output targets {targets_out}")
    k = len(targets_in)
    u = np.asarray(matrix, dtype=complex)
    if len(targets_out) != k or u.shape != (2 ** k, 2 ** k):
        raise DimensionMismatch(
            f"operator of shape {u.shape} does not act on {k} inputs -> {len(targets_out)} outputs"
        )
    rest = [label for label in s.labels if label not in targets_in]
    clash = set(rest) & set(targets_out)
    if clash:
        raise OutputLabelCollision(f"output labels {canonical_order(clash)} already carried by the state")

    n = len(s.labels)
    axis_of = {label: k for k, label in enumerate(s.labels)}
    order = [axis_of[label] for label in rest] + [axis_of[t] for t in targets_in]
    block = np.transpose(s.tensor(), order).reshape(2 ** (n - k), 2 ** k)
    block = block @ u.T
    labels = rest + targets_out
    return LabeledState(labels, block.reshape(-1))


def inner_product(s1: LabeledState, s2: LabeledState) -> complex:
    """``<s1|s2>``, conjugate-linear in the first argument."""
    if s1.labels != s2.labels:
        raise DomainMismatch(f"{list(s1.labels)} != {list(s2.labels)}")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))
