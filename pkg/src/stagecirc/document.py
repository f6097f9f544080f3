"""The JSON circuit document format.

Example (a one-gate quantum circuit)::

    {
      "kind": "quantum",
      "inputs": ["q"],
      "outputs": ["r"],
      "gates": [
        {"name": "X", "inputs": ["a"], "outputs": ["b"],
         "matrix": [[[0, 0], [1, 0]],
                    [[1, 0], [0, 0]]]}
      ],
      "wires": [
        {"consumer": "X.a:in", "producer": "in:q"},
        {"consumer": "out:r", "producer": "X.b:out"}
      ]
    }

Boolean gates carry ``"table"`` instead of ``"matrix"``: an object from
input bit strings to output bit strings, both over the gate's declared
port orders.  Matrix entries are ``[re, im]`` pairs, rows indexed by the
declared output order and columns by the declared input order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .circuit import (
    MAX_TABLE_INPUTS,
    BooleanGate,
    Circuit,
    QuantumGate,
    parse_ref,
    sorted_nodes,
    validate,
)
from .errors import CircuitError
from .indexcore import canonical_order

TOP_LEVEL_KEYS = {"kind", "inputs", "outputs", "gates", "wires", "description"}


@dataclass(frozen=True)
class Diagnostic:
    message: str
    path: str = "$"
    line: int | None = None
    column: int | None = None

    def __str__(self):
        where = f"{self.line}:{self.column}" if self.line is not None else self.path
        return f"{where}: {self.message}"


class DocumentError(CircuitError, ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


class DocumentSyntaxError(DocumentError):
    pass


class DocumentSemanticError(DocumentError):
    """Well-formed JSON that does not describe a valid circuit.

    ``report`` holds the :func:`~stagecirc.circuit.validate` report when the
    failure came from validation.
    """

    def __init__(self, diagnostics, report=None):
        super().__init__(diagnostics)
        self.report = report


class _Duplicate(Exception):
    pass


def _no_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise _Duplicate(key)
        seen[key] = value
    return seen


def _bitstring(value: int, width: int) -> str:
    return format(value, f"0{width}b") if width else ""


def _bits(text, width):
    return (isinstance(text, str) and len(text) == width
            and all(ch in "01" for ch in text))


class _Reader:
    def __init__(self):
        self.diagnostics: list[Diagnostic] = []

    def fail(self, path, message):
        self.diagnostics.append(Diagnostic(message, path))

    def labels(self, value, path):
        if not isinstance(value, list):
            self.fail(path, "expected a list of labels")
            return None
        ok = True
        for i, item in enumerate(value):
            if not isinstance(item, str) or not item:
                self.fail(f"{path}[{i}]", "labels must be nonempty strings")
                ok = False
        if len(set(x for x in value if isinstance(x, str))) != len(value):
            self.fail(path, "duplicate labels")
            ok = False
        return value if ok else None

    def complex_entry(self, value, path):
        if (isinstance(value, list) and len(value) == 2
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
            try:
                re, im = float(value[0]), float(value[1])
            except OverflowError:
                re = im = math.inf
            if math.isfinite(re) and math.isfinite(im):
                return complex(re, im)
            self.fail(path, "matrix entries must be finite")
            return None
        self.fail(path, "matrix entries must be [re, im] pairs of numbers")
        return None

    def gate(self, kind, item, path):
        if not isinstance(item, dict):
            self.fail(path, "gate must be an object")
            return None, None
        name = item.get("name")
        if not isinstance(name, str) or not name:
            self.fail(f"{path}.name", "gate name must be a nonempty string")
            name = None
        ins = self.labels(item.get("inputs"), f"{path}.inputs")
        outs = self.labels(item.get("outputs"), f"{path}.outputs")
        semantics = "table" if kind == "boolean" else "matrix"
        extra = set(item) - {"name", "inputs", "outputs", semantics}
        if extra:
            self.fail(path, f"unexpected keys {sorted(extra)} in a {kind} gate")
        if semantics not in item:
            self.fail(path, f"{kind} gate needs a {semantics!r}")
            return name, None
        if ins is None or outs is None:
            return name, None
        try:
            if kind == "boolean":
                return name, self._table(item["table"], ins, outs, f"{path}.table")
            return name, self._matrix(item["matrix"], ins, outs, f"{path}.matrix")
        except ValueError as exc:
            self.fail(path, str(exc))
            return name, None

    def _table(self, table, ins, outs, path):
        if not isinstance(table, dict):
            self.fail(path, "table must be an object from input bits to output bits")
            return None
        if len(ins) > MAX_TABLE_INPUTS:
            self.fail(path, f"truth tables are limited to {MAX_TABLE_INPUTS} inputs")
            return None
        rows = [None] * (2 ** len(ins))
        for key, value in table.items():
            if not _bits(key, len(ins)):
                self.fail(path, f"row key {key!r} is not a {len(ins)}-bit string")
            elif not _bits(value, len(outs)):
                self.fail(f"{path}.{key}", f"row value {value!r} is not a {len(outs)}-bit string")
            else:
                rows[int(key or "0", 2)] = int(value or "0", 2)
        missing = [_bitstring(i, len(ins)) for i, v in enumerate(rows) if v is None]
        if missing:
            self.fail(path, f"table is missing rows {missing[:8]}")
            return None
        return BooleanGate(tuple(ins), tuple(outs), tuple(rows))

    def _matrix(self, matrix, ins, outs, path):
        rows, cols = 2 ** len(outs), 2 ** len(ins)
        if not isinstance(matrix, list) or len(matrix) != rows:
            self.fail(path, f"matrix must be a list of {rows} rows")
            return None
        values = []
        for i, row in enumerate(matrix):
            if not isinstance(row, list) or len(row) != cols:
                self.fail(f"{path}[{i}]", f"row must hold {cols} entries")
                return None
            values.append([self.complex_entry(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
        if any(x is None for row in values for x in row):
            return None
        return QuantumGate(tuple(ins), tuple(outs), values)


def parse(text: str) -> Circuit:
    """Parse and validate a circuit document.

    Raises :class:`DocumentSyntaxError` (with line and column) for invalid
    JSON and :class:`DocumentSemanticError` for everything else; any other
    exception escaping here is a bug.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DocumentSyntaxError([Diagnostic(f"not UTF-8: {exc}")]) from None
    try:
        data = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError([Diagnostic(exc.msg, "$", exc.lineno, exc.colno)]) from None
    except _Duplicate as exc:
        raise DocumentSyntaxError([Diagnostic(f"duplicate key {exc.args[0]!r}")]) from None
    except RecursionError:
        raise DocumentSyntaxError([Diagnostic("document nested too deeply")]) from None
    return from_data(data)


def from_data(data) -> Circuit:
    r = _Reader()
    if not isinstance(data, dict):
        raise DocumentSemanticError([Diagnostic("document must be a JSON object")])
    extra = set(data) - TOP_LEVEL_KEYS
    if extra:
        r.fail("$", f"unexpected keys {sorted(extra)}")
    kind = data.get("kind")
    if kind not in ("boolean", "quantum"):
        r.fail("$.kind", "kind must be 'boolean' or 'quantum'")
        raise DocumentSemanticError(r.diagnostics)
    inputs = r.labels(data.get("inputs"), "$.inputs")
    outputs = r.labels(data.get("outputs"), "$.outputs")

    gates = {}
    gate_items = data.get("gates", [])
    if not isinstance(gate_items, list):
        r.fail("$.gates", "gates must be a list")
        gate_items = []
    for i, item in enumerate(gate_items):
        name, gate = r.gate(kind, item, f"$.gates[{i}]")
        if name is not None and name in gates:
            r.fail(f"$.gates[{i}].name", f"duplicate gate name {name!r}")
        elif name is not None and gate is not None:
            gates[name] = gate

    provider = {}
    wires = data.get("wires", [])
    if not isinstance(wires, list):
        r.fail("$.wires", "wires must be a list")
        wires = []
    for i, wire in enumerate(wires):
        path = f"$.wires[{i}]"
        if not isinstance(wire, dict) or set(wire) != {"consumer", "producer"}:
            r.fail(path, "wire must be an object with exactly 'consumer' and 'producer'")
            continue
        try:
            consumer = parse_ref(wire["consumer"])
            producer = parse_ref(wire["producer"])
        except ValueError as exc:
            r.fail(path, str(exc))
            continue
        if consumer in provider:
            r.fail(path, f"consumer {consumer} is wired twice")
            continue
        provider[consumer] = producer

    if r.diagnostics or inputs is None or outputs is None:
        raise DocumentSemanticError(r.diagnostics)
    circuit = Circuit(kind, frozenset(inputs), frozenset(outputs), gates, provider)
    report = validate(circuit)
    if not report.ok:
        raise DocumentSemanticError(
            [Diagnostic(p.message, "$.wires") for p in report.errors], report)
    circuit.__dict__["_validation"] = report
    return circuit


def load(path) -> Circuit:
    return parse(Path(path).read_bytes())


def _num(x: float) -> str:
    x = float(x)
    if x == 0:
        x = 0.0
    return json.dumps(int(x) if x.is_integer() and abs(x) < 2 ** 53 else x)


def to_data(c: Circuit) -> dict:
    gates = []
    for name in c.gate_names():
        gate = c.gates[name]
        item = {"name": name, "inputs": list(gate.inputs), "outputs": list(gate.outputs)}
        if isinstance(gate, BooleanGate):
            k, m = len(gate.inputs), len(gate.outputs)
            item["table"] = {_bitstring(i, k): _bitstring(v, m) for i, v in enumerate(gate.table)}
        else:
            item["matrix"] = [[[float(x.real), float(x.imag)] for x in row]
                              for row in gate.matrix]
        gates.append(item)
    wires = [{"consumer": str(k), "producer": str(c.provider[k])}
             for k in sorted_nodes(c.provider)]
    return {
        "kind": c.kind,
        "inputs": canonical_order(c.inputs),
        "outputs": canonical_order(c.outputs),
        "gates": gates,
        "wires": wires,
    }


def serialize(c: Circuit) -> str:
    """Deterministic document text: sorted labels, gates by name, wires by consumer."""
    data = to_data(c)
    dumps = lambda v: json.dumps(v, ensure_ascii=False)  # noqa: E731
    out = ["{", f'  "kind": {dumps(data["kind"])},',
           f'  "inputs": {dumps(data["inputs"])},',
           f'  "outputs": {dumps(data["outputs"])},']
    gate_lines = []
    for item in data["gates"]:
        head = (f'    {{"name": {dumps(item["name"])}, "inputs": {dumps(item["inputs"])}, '
                f'"outputs": {dumps(item["outputs"])},')
        if "table" in item:
            rows = ", ".join(f"{dumps(k)}: {dumps(v)}" for k, v in item["table"].items())
            gate_lines.append(f'{head}\n     "table": {{{rows}}}}}')
        else:
            rows = [
                "[" + ", ".join(f"[{_num(re)}, {_num(im)}]" for re, im in row) + "]"
                for row in item["matrix"]
            ]
            body = (",\n" + " " * 16).join(rows)
            gate_lines.append(f'{head}\n     "matrix": [{body}]}}')
    out.append('  "gates": [' + ("\n" + ",\n".join(gate_lines) + "\n  ]," if gate_lines else "],"))
    wire_lines = [f'    {{"consumer": {dumps(w["consumer"])}, "producer": {dumps(w["producer"])}}}'
                  for w in data["wires"]]
    out.append('  "wires": [' + ("\n" + ",\n".join(wire_lines) + "\n  ]" if wire_lines else "]"))
    out.append("}")
    return "\n".join(out) + "\n"
