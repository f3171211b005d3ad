"""Mapping the and-xor graph onto a generalized-Toffoli network.

The loop repeatedly picks a target with a three-branch greedy heuristic
and rewrites it into gates:

  1. an xor node one level above the deepest leaves owning a leaf nobody
     else references -- the leaf's line absorbs the xor in place;
  2. an and node at that level whose xor parent two levels up owns such a
     leaf -- the parent is mapped the same way;
  3. otherwise the node with the most leaf children (ties: fewest parents)
     is computed onto a fresh constant line, which costs a garbage line
     but frees single-parent leaves for later iterations.

Branch 3 always succeeds, so mapping always terminates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .circuit import (
    CONSTANT, Circuit, CostReport, INPUT, LineState, ROLE_ANCILLA,
    ROLE_GARBAGE, ROLE_OUTPUT, VerificationError, cnot, line_functions,
    not_gate, quantum_cost, toffoli, variable_pattern, verify_equivalence,
)
from .dag import (
    EsopDag, T_AND, T_CONST, T_ID, T_XOR, build_dag_from_trees, validate_dag,
)
from .funcs import (
    Permutation, TruthTable, anf_from_truth_table, truth_table_from_permutation,
)
from .optimize import (
    OptimizeParams, _flat_tree, common_cube_sharing, factor_expression,
    parent_reduction_pass,
)

RULE_XOR_SINGLE = "XorWithSingleParentLeaf"
RULE_AND_XOR_PARENT = "AndWithXorParentSingleLeaf"
RULE_MAX_CHILD = "MaxChildMinParent"

DEFAULT_INPUT_LIMIT = 16


class SynthesisError(Exception):
    pass


@dataclass(frozen=True)
class TargetChoice:
    node: int
    rule: str


def _single_parent_leaf(dag: EsopDag, nid: int) -> int | None:
    """First identifier child referenced only by this node."""
    for c in dag.nodes[nid].children:
        child = dag.nodes[c]
        if child.kind == T_ID and len(child.parents) == 1:
            return c
    return None


def _ready(dag: EsopDag, nid: int) -> bool:
    """True when every child can be emitted directly as gates."""
    node = dag.nodes[nid]
    if node.kind == T_AND:
        return all(dag.nodes[c].kind == T_ID for c in node.children)
    if node.kind != T_XOR:
        return False
    for c in node.children:
        child = dag.nodes[c]
        if child.kind in (T_ID, T_CONST):
            continue
        if child.kind == T_AND and all(
                dag.nodes[g].kind == T_ID for g in child.children):
            continue
        return False
    return True


def find_target(dag: EsopDag) -> TargetChoice | None:
    """Pick the next node to map, or None when the graph is exhausted."""
    internal = dag.internal_ids()
    if not internal:
        return None
    depth_max = dag.depth_max()
    level = [nid for nid in internal if dag.nodes[nid].depth == depth_max - 1]
    for nid in level:
        if dag.nodes[nid].kind == T_XOR and _ready(dag, nid) \
                and _single_parent_leaf(dag, nid) is not None:
            return TargetChoice(nid, RULE_XOR_SINGLE)
    if depth_max >= 3:
        for nid in level:
            if dag.nodes[nid].kind != T_AND:
                continue
            for p in sorted(set(dag.nodes[nid].parents)):
                pn = dag.nodes[p]
                if pn.kind == T_XOR and pn.depth == depth_max - 2 \
                        and _ready(dag, p) \
                        and _single_parent_leaf(dag, p) is not None:
                    return TargetChoice(p, RULE_AND_XOR_PARENT)
    best = None
    best_key = None
    for nid in internal:
        if not _ready(dag, nid):
            continue
        node = dag.nodes[nid]
        leafy = sum(1 for c in node.children if dag.nodes[c].is_leaf())
        key = (-leafy, len(node.parents), nid)
        if best_key is None or key < best_key:
            best, best_key = nid, key
    if best is None:
        raise SynthesisError("no mappable node in a non-empty graph")
    return TargetChoice(best, RULE_MAX_CHILD)


class _Mapper:
    """Holds the circuit, line metadata and per-line function bitsets."""

    def __init__(self, dag: EsopDag, n_inputs: int, input_names):
        self.dag = dag
        self.n = n_inputs
        self.size = 1 << n_inputs
        self.full = (1 << self.size) - 1
        self.lines: list[LineState] = []
        self.funcs: list[int] = []
        self.gates = []
        self.fresh_count = 0
        self._names = set(input_names)
        for i in range(n_inputs):
            self.lines.append(LineState(i, input_names[i], INPUT))
            self.funcs.append(variable_pattern(i, n_inputs))

    def fresh_line(self) -> int:
        name = None
        while name is None or name in self._names:
            self.fresh_count += 1
            name = f"w{self.fresh_count}"
        self._names.add(name)
        lid = len(self.lines)
        self.lines.append(LineState(lid, name, CONSTANT, 0))
        self.funcs.append(0)
        return lid

    def emit(self, gate):
        self.gates.append(gate)
        ctl = self.full
        for c in gate.controls:
            ctl &= self.funcs[c]
        self.funcs[gate.targets[0]] ^= ctl

    def emit_children_xor(self, children, leaf, target):
        """Xor every child except `leaf` onto the target line; inverters
        for a constant-1 child come last."""
        invert = False
        for c in children:
            if c == leaf:
                continue
            node = self.dag.nodes[c]
            if node.kind == T_CONST:
                invert |= bool(node.label)
            elif node.kind == T_ID:
                self.emit(cnot(node.line, target))
            else:  # flat and node: one Toffoli over its children's lines
                controls = [self.dag.nodes[g].line for g in node.children]
                self.emit(toffoli(controls, target))
        if invert:
            self.emit(not_gate(target))

    def map_target(self, choice: TargetChoice) -> list:
        dag = self.dag
        node = dag.nodes[choice.node]
        emitted_from = len(self.gates)
        if choice.rule in (RULE_XOR_SINGLE, RULE_AND_XOR_PARENT):
            leaf = _single_parent_leaf(dag, choice.node)
            target = dag.nodes[leaf].line
            self.emit_children_xor(node.children, leaf, target)
        else:
            target = self.fresh_line()
            if node.kind == T_AND:
                controls = [dag.nodes[c].line for c in node.children]
                self.emit(toffoli(controls, target))
            else:
                self.emit_children_xor(node.children, None, target)
        dag.to_identifier(choice.node, target, f"@{target}")
        dag.recompute_depths(prune=True)
        return self.gates[emitted_from:]


def map_target(dag: EsopDag, choice: TargetChoice, mapper: _Mapper):
    """Rewrite one chosen node into gates; returns the appended gates."""
    return mapper.map_target(choice)


def synthesize(
    spec: TruthTable | Permutation,
    params: OptimizeParams = OptimizeParams(),
    verify: str = "exhaustive",
    check_invariants: bool = False,
    input_limit: int = DEFAULT_INPUT_LIMIT,
    trace=None,
    seed: int = 0,
) -> tuple[Circuit, CostReport]:
    """Full pipeline: ANF, graph build, optimization passes, mapping loop,
    output ordering, costing and equivalence check.

    verify: "exhaustive" | "sample" | "off".  A verification failure is an
    internal-consistency bug and raises VerificationError.
    """
    t0 = time.perf_counter()
    if isinstance(spec, Permutation):
        tt = truth_table_from_permutation(spec)
        from_permutation = True
    else:
        tt = spec
        from_permutation = False
    n = tt.n_inputs
    if n < 1:
        raise SynthesisError("need at least one input")
    if n > input_limit:
        raise SynthesisError(f"{n} inputs exceeds the configured limit {input_limit}")

    exprs = [anf_from_truth_table(tt.single_output(j)) for j in range(tt.n_outputs)]
    if from_permutation and n >= 2:
        # balanced outputs have even weight, so the all-variables cube
        # (whose coefficient is the weight parity) cannot appear
        top = (1 << n) - 1
        for name, e in zip(tt.output_names, exprs):
            if any(c.mask == top for c in e.cubes):
                raise SynthesisError(
                    f"output {name} of a reversible spec contains the "
                    "degree-n cube; the function cannot be balanced")

    if params.kernel_threshold > 0:
        trees = [factor_expression(e, params) for e in exprs]
    else:
        trees = [_flat_tree(e.masks) for e in exprs]
    dag = build_dag_from_trees(trees, n, params.max_and_arity,
                               output_names=list(tt.output_names))
    if params.cube_sharing:
        rep = common_cube_sharing(dag, params.sharing_sweep_cap)
        if trace is not None and rep:
            trace(f"cube_sharing: {len(rep.events)} shares, "
                  f"nodes {rep.nodes_before}->{rep.nodes_after}")

    mapper = _Mapper(dag, n, list(tt.input_names))
    guard = 4 * len(dag) + 64
    iterations = 0
    while True:
        if params.parent_reduction:
            rep = parent_reduction_pass(dag, params.general_expansion)
            if trace is not None and rep:
                trace(f"parent_reduction: {rep.events}")
        choice = find_target(dag)
        if choice is None:
            break
        gates = mapper.map_target(choice)
        iterations += 1
        if trace is not None:
            trace(f"iter {iterations}: {choice.rule} #{choice.node} -> "
                  + "; ".join(str(g) for g in gates))
        if check_invariants:
            problems = validate_dag(dag)
            if problems:
                raise SynthesisError(f"graph invariant broken: {problems}")
            _check_outputs_preserved(dag, mapper, exprs)
        if iterations > guard:
            raise SynthesisError("mapping loop exceeded its iteration bound")

    _claim_output_lines(mapper, tt)
    circuit = Circuit(len(mapper.lines), mapper.gates, mapper.lines)
    _refresh_roles(circuit, mapper.funcs, mapper.full)

    runtime = time.perf_counter() - t0
    report = quantum_cost(circuit, runtime)
    if verify != "off":
        verdict = verify_equivalence(
            circuit, tt, sample_limit=20 if verify == "exhaustive" else 0,
            seed=seed)
        if not verdict:
            raise VerificationError(
                f"emitted circuit disagrees with the spec at input "
                f"{verdict.counterexample}")
    return circuit, report


def _check_outputs_preserved(dag: EsopDag, mapper: _Mapper, exprs):
    """Test-mode oracle: every pending output still expands to its spec."""
    from .funcs import bit_support, mobius_bits

    def resolver(line_id):
        return frozenset(bit_support(mobius_bits(mapper.funcs[line_id],
                                                 mapper.n)))

    memo = {}
    for (name, nid), expr in zip(dag.output_order, exprs):
        got = dag.expand(nid, resolver, memo)
        if got != expr.masks:
            raise SynthesisError(f"output {name} drifted: {sorted(got)}")


def _claim_output_lines(mapper: _Mapper, tt: TruthTable):
    """Assign every spec output to a line carrying its function, emitting
    copy gates only for outputs whose function line is already claimed."""
    wanted = [tt.column_bits(j) for j in range(tt.n_outputs)]
    candidates = []
    for j in range(tt.n_outputs):
        candidates.append([l.line_id for l in mapper.lines
                           if mapper.funcs[l.line_id] == wanted[j]])
    assignment = _match_outputs(candidates, tt.n_outputs)
    for j, line_id in enumerate(assignment):
        name = tt.output_names[j]
        if line_id is None:
            # duplicate output or a constant: copy / build onto a fresh line
            src = next((l.line_id for l in mapper.lines
                        if mapper.funcs[l.line_id] == wanted[j]), None)
            line_id = mapper.fresh_line()
            if src is not None:
                mapper.emit(cnot(src, line_id))
            elif wanted[j] == mapper.full:
                mapper.emit(not_gate(line_id))
            elif wanted[j] != 0:
                raise SynthesisError(
                    f"no line carries output {name} after mapping")
        mapper.lines[line_id].role = ROLE_OUTPUT
        mapper.lines[line_id].output_name = name


def _match_outputs(candidates: list[list[int]], m: int) -> list[int | None]:
    """Injective output-to-line assignment maximizing direct (copy-free)
    claims; exhaustive for up to 8 outputs, greedy beyond."""
    if m > 8:
        taken: set[int] = set()
        out: list[int | None] = []
        for cand in candidates:
            pick = next((c for c in cand if c not in taken), None)
            out.append(pick)
            if pick is not None:
                taken.add(pick)
        return out
    best: list[int | None] = [None] * m
    best_score = -1

    def rec(j: int, taken: set[int], acc: list[int | None], score: int):
        nonlocal best, best_score
        if j == m:
            if score > best_score:
                best, best_score = list(acc), score
            return
        if score + (m - j) <= best_score:
            return
        for c in candidates[j]:
            if c not in taken:
                taken.add(c)
                acc.append(c)
                rec(j + 1, taken, acc, score + 1)
                acc.pop()
                taken.remove(c)
        acc.append(None)
        rec(j + 1, taken, acc, score)
        acc.pop()

    rec(0, set(), [], 0)
    return best


def order_outputs(circuit: Circuit, spec: TruthTable) -> Circuit:
    """Re-derive the cheapest output-to-line labeling for a finished circuit.

    Relabeling is free; only duplicated output functions cost a copy gate,
    so the assignment maximizes copy-free claims (exhaustively for up to 8
    outputs) and rewrites the line roles in place.
    """
    input_ids = [l.line_id for l in circuit.lines if l.origin == INPUT]
    funcs = line_functions(circuit, spec.n_inputs, input_ids)
    wanted = [spec.column_bits(j) for j in range(spec.n_outputs)]
    candidates = [
        [l.line_id for l in circuit.lines if funcs[l.line_id] == w]
        for w in wanted
    ]
    assignment = _match_outputs(candidates, spec.n_outputs)
    for l in circuit.lines:
        if l.role == ROLE_OUTPUT:
            l.role = ROLE_GARBAGE
            l.output_name = None
    full = (1 << (1 << spec.n_inputs)) - 1
    taken_names = {l.name for l in circuit.lines}
    for j, line_id in enumerate(assignment):
        if line_id is None:
            line_id = circuit.n_lines
            k = line_id
            while f"w{k}" in taken_names:
                k += 1
            taken_names.add(f"w{k}")
            circuit.lines.append(LineState(line_id, f"w{k}", CONSTANT, 0))
            circuit.n_lines += 1
            src = next((i for i in range(line_id) if funcs[i] == wanted[j]), None)
            if src is not None:
                circuit.append(cnot(src, line_id))
                funcs.append(funcs[src])
            elif wanted[j] == full:
                circuit.append(not_gate(line_id))
                funcs.append(full)
            else:
                funcs.append(0)
        circuit.lines[line_id].role = ROLE_OUTPUT
        circuit.lines[line_id].output_name = spec.output_names[j]
    _refresh_roles(circuit, funcs, full)
    return circuit


def _refresh_roles(circuit: Circuit, funcs: list[int], full: int):
    """Garbage is any line ending with neither a declared output nor its
    restored constant; constant lines back at their init value are ancilla.
    Records each line's final function alongside the role."""
    from .funcs import EsopExpression, bit_support, mobius_bits

    n = (full.bit_length() - 1).bit_length()
    for l in circuit.lines:
        coeffs = mobius_bits(funcs[l.line_id], n)
        l.function = EsopExpression.from_masks(n, bit_support(coeffs))
        if l.role == ROLE_OUTPUT:
            continue
        if l.origin == CONSTANT:
            init_pattern = full if l.init else 0
            l.role = ROLE_ANCILLA if funcs[l.line_id] == init_pattern else ROLE_GARBAGE
        else:
            l.role = ROLE_GARBAGE


__all__ = [
    "RULE_XOR_SINGLE", "RULE_AND_XOR_PARENT", "RULE_MAX_CHILD",
    "SynthesisError", "TargetChoice", "find_target", "map_target",
    "synthesize", "order_outputs",
]
