"""File formats: function specs in, circuits and CSV reports out.

Three spec formats are accepted:

  * PLA-style truth tables: ``.i N`` / ``.o M`` headers, then
    ``<inbits> <outbits>`` rows.  ``-`` in the inputs expands to both
    values; ``-`` in an output resolves to 0 (logged).  Rows never listed
    default to all-zero outputs.
  * permutations: a single line ``perm v0 v1 ...``.
  * cube lists: one output per line, products joined by ``^``
    (e.g. ``1 ^ x1 ^ x1x2``).

Circuits use a Toffoli-cascade text format: ``t<k> c1,...,target`` with
``t1``/``t2`` as NOT/CNOT and ``f<k>`` for controlled swaps, preceded by
``.v/.i/.o/.c/.g`` line declarations.  The constant-init and garbage
annotations are an extension other cascade readers can ignore.
"""

from __future__ import annotations

import csv
import logging
import re
from io import StringIO

from .circuit import (
    CONSTANT, Circuit, CostReport, Gate, INPUT, LineState, ROLE_ANCILLA,
    ROLE_GARBAGE, ROLE_OUTPUT,
)
from .funcs import EsopExpression, Permutation, TruthTable, truth_table_from_anf

log = logging.getLogger("esopsyn")


class SpecFormatError(ValueError):
    pass


def parse_spec(path: str, fmt: str = "auto") -> TruthTable | Permutation:
    with open(path) as fh:
        text = fh.read()
    return parse_spec_text(text, fmt, origin=path)


def parse_spec_text(text: str, fmt: str = "auto",
                    origin: str = "<string>") -> TruthTable | Permutation:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise SpecFormatError(f"{origin}: empty specification")
    if fmt == "auto":
        head = lines[0].split()[0]
        if head == "perm":
            fmt = "perm"
        elif head.startswith("."):
            fmt = "pla"
        else:
            fmt = "cubes"
    if fmt == "perm":
        return _parse_perm(lines, origin)
    if fmt == "pla":
        return _parse_pla(lines, origin)
    if fmt == "cubes":
        return _parse_cubes(lines, origin)
    raise SpecFormatError(f"unknown spec format {fmt!r}")


def _parse_perm(lines, origin) -> Permutation:
    tokens = []
    for ln in lines:
        parts = ln.split()
        if parts[0] == "perm":
            parts = parts[1:]
        tokens.extend(parts)
    try:
        images = tuple(int(t) for t in tokens)
    except ValueError as e:
        raise SpecFormatError(f"{origin}: bad permutation entry: {e}") from None
    try:
        return Permutation(images)
    except ValueError as e:
        raise SpecFormatError(f"{origin}: {e}") from None


def _parse_pla(lines, origin) -> TruthTable:
    n = m = None
    input_names: tuple = ()
    output_names: tuple = ()
    assigned: dict[int, int] = {}
    forced: dict[int, int] = {}
    for ln in lines:
        parts = ln.split()
        key = parts[0]
        if key == ".i":
            n = int(parts[1])
        elif key == ".o":
            m = int(parts[1])
        elif key == ".ilb":
            input_names = tuple(parts[1:])
        elif key == ".ob":
            output_names = tuple(parts[1:])
        elif key in (".p", ".type"):
            continue
        elif key == ".e":
            break
        elif key.startswith("."):
            raise SpecFormatError(f"{origin}: unsupported directive {key}")
        else:
            if n is None or m is None:
                raise SpecFormatError(f"{origin}: row before .i/.o headers")
            if len(parts) != 2:
                raise SpecFormatError(f"{origin}: malformed row {ln!r}")
            inbits, outbits = parts
            if len(inbits) != n:
                raise SpecFormatError(
                    f"{origin}: input {inbits!r} is not {n} characters")
            if len(outbits) != m:
                raise SpecFormatError(
                    f"{origin}: output {outbits!r} is not {m} characters")
            value = 0
            for j, ch in enumerate(outbits):
                if ch == "1":
                    value |= 1 << j
                elif ch == "-":
                    log.info("%s: output don't-care in row %r resolved to 0",
                             origin, ln)
                elif ch != "0":
                    raise SpecFormatError(f"{origin}: bad output bit {ch!r}")
            for idx in _expand_input(inbits, origin):
                if idx in assigned and assigned[idx] != value:
                    raise SpecFormatError(
                        f"{origin}: conflicting rows for input {idx}")
                assigned[idx] = value
    if n is None or m is None:
        raise SpecFormatError(f"{origin}: missing .i/.o header")
    rows = tuple(assigned.get(i, 0) for i in range(1 << n))
    return TruthTable(n, m, rows, input_names, output_names)


def _expand_input(bits: str, origin: str):
    """Leftmost character is x1 (the low index bit)."""
    free = [i for i, ch in enumerate(bits) if ch == "-"]
    base = 0
    for i, ch in enumerate(bits):
        if ch == "1":
            base |= 1 << i
        elif ch not in "0-":
            raise SpecFormatError(f"{origin}: bad input bit {ch!r}")
    for pick in range(1 << len(free)):
        idx = base
        for k, pos in enumerate(free):
            if pick >> k & 1:
                idx |= 1 << pos
        yield idx


_CUBE_TOKEN = re.compile(r"x(\d+)")


def _parse_cubes(lines, origin) -> TruthTable:
    per_output: list[list[int]] = []
    n_vars = 1
    for ln in lines:
        masks = []
        for term in ln.split("^"):
            term = term.strip()
            if not term:
                raise SpecFormatError(f"{origin}: empty product in {ln!r}")
            if term == "0":
                continue
            if term == "1":
                masks.append(0)
                continue
            idxs = _CUBE_TOKEN.findall(term)
            if "".join(f"x{i}" for i in idxs) != term:
                raise SpecFormatError(f"{origin}: bad product {term!r}")
            mask = 0
            for i in idxs:
                v = int(i)
                if v < 1:
                    raise SpecFormatError(f"{origin}: variables start at x1")
                mask |= 1 << (v - 1)
                n_vars = max(n_vars, v)
            masks.append(mask)
        per_output.append(masks)
    columns = []
    for masks in per_output:
        expr = EsopExpression.from_masks(n_vars, _cancel(masks))
        columns.append(truth_table_from_anf(expr).column_bits(0))
    return TruthTable.from_columns(n_vars, columns)


def _cancel(masks) -> frozenset[int]:
    acc: set[int] = set()
    for m in masks:
        acc ^= {m}
    return frozenset(acc)


# -- circuit format -----------------------------------------------------------


def format_circuit(c: Circuit, report: CostReport | None = None) -> str:
    out = StringIO()
    if report is not None:
        out.write(f"# qc={report.quantum_cost} gates={report.gate_count} "
                  f"lines={report.line_count} garbage={report.garbage_count} "
                  f"ancilla={report.ancilla_count} "
                  f"peres_pairs={report.peres_pairs}\n")
    name_of = {l.line_id: l.name for l in c.lines}
    out.write(".v " + ",".join(l.name for l in c.lines) + "\n")
    inputs = [l.name for l in c.lines if l.origin == INPUT]
    if inputs:
        out.write(".i " + ",".join(inputs) + "\n")
    outputs = [f"{l.output_name}:{l.name}" for l in c.lines
               if l.role == ROLE_OUTPUT and l.output_name]
    if outputs:
        out.write(".o " + ",".join(outputs) + "\n")
    consts = [f"{l.name}={l.init}" for l in c.lines if l.origin == CONSTANT]
    if consts:
        out.write(".c " + ",".join(consts) + "\n")
    garbage = [l.name for l in c.lines if l.role == ROLE_GARBAGE]
    if garbage:
        out.write(".g " + ",".join(garbage) + "\n")
    for g in c.gates:
        names = [name_of[i] for i in g.controls + g.targets]
        out.write(f"{g.family}{g.width} " + ",".join(names) + "\n")
    return out.getvalue()


def write_circuit(c: Circuit, path: str, report: CostReport | None = None):
    with open(path, "w") as fh:
        fh.write(format_circuit(c, report))


def read_circuit(path: str) -> Circuit:
    with open(path) as fh:
        return parse_circuit_text(fh.read(), origin=path)


def parse_circuit_text(text: str, origin: str = "<string>") -> Circuit:
    names: list[str] = []
    inputs: set[str] = set()
    outputs: dict[str, str] = {}
    consts: dict[str, int] = {}
    garbage: set[str] = set()
    gate_rows: list[tuple[str, int, list[str]]] = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split(None, 1)
        key = parts[0]
        rest = parts[1] if len(parts) > 1 else ""
        if key == ".v":
            names = [t.strip() for t in rest.split(",") if t.strip()]
        elif key == ".i":
            inputs = {t.strip() for t in rest.split(",") if t.strip()}
        elif key == ".o":
            for tok in rest.split(","):
                oname, _, lname = tok.strip().partition(":")
                outputs[lname or oname] = oname
        elif key == ".c":
            for tok in rest.split(","):
                lname, _, init = tok.strip().partition("=")
                consts[lname] = int(init or 0)
        elif key == ".g":
            garbage = {t.strip() for t in rest.split(",") if t.strip()}
        elif key[0] in "tf" and key[1:].isdigit():
            width = int(key[1:])
            operands = [t.strip() for t in rest.split(",") if t.strip()]
            if len(operands) != width:
                raise SpecFormatError(
                    f"{origin}: gate {ln!r} names {len(operands)} lines, "
                    f"width says {width}")
            gate_rows.append((key[0], width, operands))
        else:
            raise SpecFormatError(f"{origin}: unrecognized line {ln!r}")
    if not names:
        raise SpecFormatError(f"{origin}: missing .v line declaration")
    index = {nm: i for i, nm in enumerate(names)}
    lines = []
    for i, nm in enumerate(names):
        origin_kind = CONSTANT if nm in consts else INPUT
        role = ROLE_GARBAGE
        output_name = None
        if nm in outputs:
            role, output_name = ROLE_OUTPUT, outputs[nm]
        elif nm in garbage:
            role = ROLE_GARBAGE
        elif nm in consts:
            role = ROLE_ANCILLA
        lines.append(LineState(i, nm, origin_kind, consts.get(nm, 0),
                               role, output_name))
    circuit = Circuit(len(names), [], lines)
    for family, width, operands in gate_rows:
        try:
            ids = [index[nm] for nm in operands]
        except KeyError as e:
            raise SpecFormatError(f"{origin}: gate uses undeclared line {e}")
        n_targets = 1 if family == "t" else 2
        circuit.append(Gate(family, tuple(ids[:-n_targets]),
                            tuple(ids[-n_targets:])))
    return circuit


# -- CSV reports ---------------------------------------------------------------

REPORT_COLUMNS = [
    "function", "mode", "n_inputs", "n_outputs",
    "T", "C", "K", "P", "seed",
    "qc", "gates", "lines", "garbage", "ancilla", "peres_pairs", "runtime_s",
]


def report_row(function: str, mode: str, n_inputs: int, n_outputs: int,
               params, seed: int, report: CostReport,
               with_runtime: bool = True) -> dict:
    row = {
        "function": function,
        "mode": mode,
        "n_inputs": n_inputs,
        "n_outputs": n_outputs,
        "T": params.max_and_arity,
        "C": int(params.cube_sharing),
        "K": params.kernel_threshold,
        "P": int(params.parent_reduction),
        "seed": seed,
        "qc": report.quantum_cost,
        "gates": report.gate_count,
        "lines": report.line_count,
        "garbage": report.garbage_count,
        "ancilla": report.ancilla_count,
        "peres_pairs": report.peres_pairs,
        # sweeps drop the runtime column so reruns are byte-identical
        "runtime_s": round(report.runtime, 3) if with_runtime else "",
    }
    return row


def write_report(path: str, rows: list[dict]):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
