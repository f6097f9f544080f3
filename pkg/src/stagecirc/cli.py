"""Command line front end.

Exit codes: 0 success, 1 the circuit failed a check (or could not be
parsed), 2 usage error (bad arguments, including an incoherent
``--schedule``).  Bit strings are always read and printed in the
canonical (byte-sorted) order of the labels they cover.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import booleval, circuit, document, oracle, quantumsim, stages
from .errors import CircuitError, IncoherentSchedule, InvalidCircuit
from .indexcore import (
    LabeledState,
    assignment_from_index,
    assignment_to_bits,
    bits_to_assignment,
    canonical_order,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
VERIFY_SEED = 0


class UsageError(Exception):
    pass


def format_complex(z: complex) -> str:
    """``a+bi`` with 12 significant digits and no negative zeros."""
    re = z.real + 0.0
    im = z.imag + 0.0
    return f"{re:.12g}{im:+.12g}i"


def _load(path):
    try:
        return document.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def _bits_arg(bits, labels, what):
    try:
        return bits_to_assignment(bits, labels)
    except ValueError:
        raise UsageError(f"--input must be {len(labels)} bits for {what} "
                         f"{labels} (canonical order), got {bits!r}") from None


def _require(kind, c, command):
    if c.kind != kind:
        raise UsageError(f"'{command}' needs a {kind} circuit, this one is {c.kind}")


def _print_report(report, out):
    for line in report.lines():
        print(line, file=out)


def cmd_validate(args, out):
    c = _load(args.file)
    report = circuit.validate(c)
    _print_report(report, out)
    if c.kind == "quantum":
        extra = circuit.check_quantum(c)
        _print_report(extra, out)
        verdict = "well-formed quantum circuit" if extra.ok else "not a valid quantum circuit"
        ok = extra.ok
    else:
        extra = circuit.check_balanced(c)
        verdict = "balanced" if extra.ok else "valid, not balanced"
        if not extra.ok:
            for line in extra.lines():
                print("note: " + line.split(": ", 1)[1], file=out)
        ok = True
    print(f"{c.kind} circuit: {len(c.gates)} gates, {len(c.inputs)} inputs, "
          f"{len(c.outputs)} outputs; {verdict}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_eval(args, out):
    c = _load(args.file)
    _require("boolean", c, "eval")
    ins, outs = canonical_order(c.inputs), canonical_order(c.outputs)
    a = _bits_arg(args.input, ins, "inputs")
    print(assignment_to_bits(booleval.output_assignment(c, a), outs), file=out)
    return EXIT_OK


def cmd_table(args, out):
    c = _load(args.file)
    _require("boolean", c, "table")
    print(f"# inputs: {' '.join(canonical_order(c.inputs))}", file=out)
    print(f"# outputs: {' '.join(canonical_order(c.outputs))}", file=out)
    for key, value in booleval.computed_function(c).items():
        print(f"{key or '-'} -> {value or '-'}", file=out)
    return EXIT_OK


def _quantum(args, command):
    c = _load(args.file)
    _require("quantum", c, command)
    report = circuit.check_quantum(c)
    if not report.ok:
        raise InvalidCircuit("not a valid quantum circuit", report)
    return c


def _print_state(state, labels, out):
    print(f"# labels: {' '.join(labels) if labels else '-'}", file=out)
    for i, amp in enumerate(state.amplitudes):
        key = assignment_to_bits(assignment_from_index(i, state.labels), state.labels)
        print(f"{key or '-'} {format_complex(amp)}", file=out)


def _render_exits(state):
    return [str(quantumsim.parse_port_label(lab)) for lab in state.labels]


def cmd_simulate(args, out):
    c = _quantum(args, "simulate")
    ins = canonical_order(c.inputs)
    bits = args.input if args.input is not None else "0" * len(ins)
    psi = LabeledState.basis(_bits_arg(bits, ins, "inputs"))
    schedule = None
    if args.schedule is not None:
        schedule = [g for g in args.schedule.split(",") if g]
        unknown = sorted(set(schedule) - set(c.gates))
        if unknown or sorted(schedule) != sorted(c.gates):
            raise UsageError(f"--schedule must list every gate exactly once "
                             f"(gates: {','.join(c.gate_names())})")
    trace = quantumsim.simulate(c, psi, schedule, keep_states=args.trace)
    if args.trace:
        for k, state in enumerate(trace.states):
            fired = ",".join(trace.schedule[:k]) or "-"
            print(f"# stage {k} after {fired}", file=out)
            _print_state(state, _render_exits(state), out)
        print("# final state on outputs", file=out)
    final = quantumsim.output_state(c, trace.final)
    _print_state(final, list(final.labels), out)
    return EXIT_OK


def cmd_unitary(args, out):
    c = _quantum(args, "unitary")
    u = quantumsim.output_unitary(c)
    print(f"# rows: outputs {' '.join(canonical_order(c.outputs)) or '-'}", file=out)
    print(f"# columns: inputs {' '.join(canonical_order(c.inputs)) or '-'}", file=out)
    for row in u:
        print(" ".join(format_complex(z) for z in row), file=out)
    return EXIT_OK


def cmd_schedules(args, out):
    c = _load(args.file)
    circuit.require_valid(c)
    count = 0
    for seq in stages.coherent_enumerations(c, cap=None):
        if args.limit is not None and count >= args.limit:
            break
        print(",".join(seq) if seq else "-", file=out)
        count += 1
    return EXIT_OK


def cmd_stages(args, out):
    c = _load(args.file)
    for z in stages.all_stages(c):
        names = ",".join(z) or "-"
        ex = " ".join(str(p) for p in circuit.sorted_nodes(stages.exits(c, z))) or "-"
        print(f"{{{names}}}: {ex}", file=out)
    return EXIT_OK


def _verify_boolean(c, lines):
    ok = True
    table = booleval.computed_function(c)
    brute = oracle.brute_force_truth_table(c)
    mismatched = sum(table[k] != brute[k] for k in table)
    lines.append(("truth table vs fixpoint oracle: rows differing", mismatched, mismatched == 0))
    ok &= mismatched == 0

    ins = canonical_order(c.inputs)
    producers = len(c.producers)
    stage_list = stages.all_stages(c)
    stage_mismatch = 0
    max_sweeps = 0
    for i in range(2 ** len(ins)):
        a = assignment_from_index(i, ins)
        nodes = booleval.eval_nodes(c, a)
        max_sweeps = max(max_sweeps, oracle.fixpoint_sweeps(c, a))
        for z in stage_list:
            values = booleval.eval_stage(c, a, z)
            stage_mismatch += any(nodes[p] != v for p, v in values.items())
    lines.append(("stage states vs node values: mismatches", stage_mismatch,
                  stage_mismatch == 0))
    lines.append((f"fixpoint sweeps (at most {producers})", max_sweeps, max_sweeps <= producers))
    ok &= stage_mismatch == 0 and max_sweeps <= producers
    balanced = circuit.check_balanced(c)
    if balanced.ok:
        distinct = len(set(table.values()))
        lines.append((f"balanced: distinct output rows (of {len(table)})", distinct,
                      distinct == len(table)))
        ok &= distinct == len(table)
    return ok


def _verify_quantum(c, lines):
    ok = True
    ins = canonical_order(c.inputs)
    u = quantumsim.circuit_unitary(c)
    unitarity = float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[1])))
    lines.append(("circuit unitary: ||U^H U - I||_F", unitarity, unitarity <= 1e-9))
    ok &= unitarity <= 1e-9
    if len(ins) <= oracle.MAX_ORACLE_QUBITS:
        brute = oracle.brute_force_unitary(c)
        assert brute.out_labels == quantumsim.exit_labels(c)
        dev = float(np.max(np.abs(u - brute.matrix), initial=0.0))
        lines.append(("unitary vs Kronecker oracle: max entry deviation", dev, dev <= 1e-10))
        ok &= dev <= 1e-10
    rng = np.random.default_rng(VERIFY_SEED)
    v = rng.standard_normal(2 ** len(ins)) + 1j * rng.standard_normal(2 ** len(ins))
    psi = LabeledState(ins, v / np.linalg.norm(v))
    inv = quantumsim.check_schedule_invariance(c, psi)
    lines.append((f"schedule invariance over {inv.schedules} schedules: max deviation",
                  inv.max_deviation, inv.max_deviation <= 1e-10))
    lines.append(("norm drift along schedules", inv.max_norm_drift,
                  inv.max_norm_drift <= 1e-10))
    ok &= inv.ok
    if len(c.gates) <= 7:
        chk = oracle.exhaustive_schedule_check(c, psi)
        lines.append(("adjacent-swap chains: longest chain", max(chk.chain_lengths), None))
        lines.append(("adjacent-swap chains: max prefix-state deviation",
                      chk.max_prefix_deviation, chk.ok))
        ok &= chk.ok
    return ok


def cmd_verify(args, out):
    c = _load(args.file)
    lines = []
    if c.kind == "quantum":
        report = circuit.check_quantum(c)
        if not report.ok:
            raise InvalidCircuit("not a valid quantum circuit", report)
        ok = _verify_quantum(c, lines)
    else:
        ok = _verify_boolean(c, lines)
    for name, value, passed in lines:
        shown = f"{value:.3g}" if isinstance(value, float) else str(value)
        status = "" if passed is None else (" ok" if passed else " FAIL")
        print(f"{name}: {shown}{status}", file=out)
    print("verify: " + ("PASS" if ok else "FAIL"), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_complete(args, out):
    c = _load(args.file)
    text = document.serialize(circuit.complete_outputs(c))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stagecirc",
        description="Boolean and quantum circuits over unordered label sets.",
        epilog="Bit strings follow the byte-sorted order of the circuit's input "
               "(or output) labels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="circuit document (JSON)")
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "check the circuit definition and its kind-specific rules")
    p = add("eval", cmd_eval, "evaluate a Boolean circuit on one input")
    p.add_argument("--input", required=True, help="input bits in canonical label order")
    add("table", cmd_table, "print the function computed by a Boolean circuit")
    p = add("simulate", cmd_simulate, "simulate a quantum circuit on a basis input")
    p.add_argument("--input", help="input basis bits in canonical label order (default all 0)")
    p.add_argument("--schedule", help="comma-separated coherent gate order")
    p.add_argument("--trace", action="store_true", help="print the state at every stage")
    add("unitary", cmd_unitary, "print the whole-circuit unitary, row-major")
    p = add("schedules", cmd_schedules, "list coherent enumerations of the gates")
    p.add_argument("--limit", type=int, help="stop after N schedules")
    add("stages", cmd_stages, "list every stage with its exits")
    add("verify", cmd_verify, "cross-check the evaluators against the brute-force oracle")
    p = add("complete", cmd_complete, "add output nodes for unconsumed producers")
    p.add_argument("-o", "--output", help="write the document here instead of stdout")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except document.DocumentError as exc:
        for diag in exc.diagnostics:
            print(f"{args.file}:{diag}", file=err)
        return EXIT_FAIL
    except IncoherentSchedule as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except InvalidCircuit as exc:
        if exc.report is not None:
            _print_report(exc.report, err)
        else:
            print(f"error: {exc}", file=err)
        return EXIT_FAIL
    except CircuitError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
