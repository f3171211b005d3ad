"""Rule-based ancilla-free synthesis for small reversible functions.

The output expressions are reduced to the identity by variable
substitutions, each corresponding to one reversible gate applied on the
input side: a CNOT substitutes target <- target ^ control, a Toffoli
substitutes target <- target ^ (product of controls).  Substituting with
control set C turns every cube m containing the target t into
m ^ (m without t | C), which cancels pairs of nonlinear cubes when chosen
well.  Once every expression is linear the remaining system is an
invertible affine map, finished deterministically by column elimination,
inverters for complemented outputs, and swap triples for the residual
line permutation.

Gate order equals application order: if F composed with g1..gk is the
identity then the circuit executing g1 first realizes F (all gates are
self-inverse); the equivalence check enforces this rather than trusting it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .circuit import (
    Circuit, CostReport, INPUT, LineState, ROLE_OUTPUT, VerificationError,
    cnot, not_gate, quantum_cost, toffoli, verify_equivalence,
)
from .funcs import Permutation, anf_from_truth_table, \
    truth_table_from_permutation

import time

POLICY_UNIQUE_PAIR = "unique-pair"   # control = the other cube's unique variable
POLICY_COMMON_CONTROL = "common-control"  # control = a shared variable


class NonConvergenceError(Exception):
    pass


@dataclass(frozen=True, slots=True)
class Transformation:
    """One substitution step: kind T1..T4 by control count."""

    controls: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(sorted(self.controls)))
        if self.target in self.controls:
            raise ValueError("target cannot also be a control")
        if len(self.controls) > 3:
            raise ValueError("more than three controls is out of range here")

    @property
    def kind(self) -> str:
        return f"T{len(self.controls) + 1}"

    def control_mask(self) -> int:
        m = 0
        for c in self.controls:
            m |= 1 << c
        return m


@dataclass(frozen=True)
class ExpressionState:
    """Current output expressions (cube-mask sets) plus applied history."""

    n_vars: int
    exprs: tuple[frozenset[int], ...]
    history: tuple[Transformation, ...] = ()

    @property
    def last_applied(self) -> Transformation | None:
        return self.history[-1] if self.history else None

    def nonlinear_count(self) -> int:
        return sum(1 for e in self.exprs for m in e if m.bit_count() >= 2)

    def literal_count(self) -> int:
        return sum(m.bit_count() for e in self.exprs for m in e)

    def high_degree_count(self, bound: int = 3) -> int:
        return sum(1 for e in self.exprs for m in e if m.bit_count() >= bound)

    def is_linear(self) -> bool:
        return all(m.bit_count() <= 1 for e in self.exprs for m in e)

    def is_terminal(self) -> bool:
        seen = set()
        for e in self.exprs:
            if len(e) != 1:
                return False
            (m,) = e
            if m.bit_count() != 1 or m in seen:
                return False
            seen.add(m)
        return True


def _substitute(expr: frozenset[int], t_bit: int, c_mask: int) -> frozenset[int]:
    out = set(expr)
    for m in expr:
        if m & t_bit:
            repl = (m & ~t_bit) | c_mask
            if repl in out:
                out.remove(repl)
            else:
                out.add(repl)
    return frozenset(out)


def apply_substitution(state: ExpressionState, t: Transformation) -> ExpressionState:
    """Replace the target variable by target ^ (product of controls)
    throughout; duplicate cubes cancel over GF(2)."""
    t_bit = 1 << t.target
    c_mask = t.control_mask()
    exprs = tuple(_substitute(e, t_bit, c_mask) for e in state.exprs)
    return ExpressionState(state.n_vars, exprs, state.history + (t,))


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _t2_candidates(state: ExpressionState, policy: str):
    """Candidate CNOT substitutions from pairs of nonlinear cubes that
    share a variable, in a fixed deterministic order."""
    seen = set()
    for expr in state.exprs:
        nonlinear = sorted(m for m in expr if m.bit_count() >= 2)
        for c1, c2 in itertools.combinations(nonlinear, 2):
            common = c1 & c2
            if not common:
                continue
            u1, u2 = c1 & ~c2, c2 & ~c1
            if policy == POLICY_UNIQUE_PAIR:
                pool = [(u, v) for u in _bits(u1) for v in _bits(u2)]
                pool += [(u, v) for u in _bits(u2) for v in _bits(u1)]
            else:
                pool = [(u, v) for v in _bits(common) for u in _bits(u1 | u2)]
            for target, control in sorted(set(pool)):
                t = Transformation((control,), target)
                if t not in seen:
                    seen.add(t)
                    yield t


def check_T2(state: ExpressionState,
             policy: str = POLICY_UNIQUE_PAIR) -> Transformation | None:
    """First CNOT substitution that strictly lowers the nonlinear cube
    count; on an already-linear state, the first elimination step of the
    affine finisher (literal reduction)."""
    if state.is_linear():
        for t in _linear_finish_ops(state):
            if t.kind == "T2":
                return t
        return None
    before = state.nonlinear_count()
    for t in _t2_candidates(state, policy):
        if apply_substitution(state, t).nonlinear_count() < before:
            return t
    return None


def _search_controls(state: ExpressionState, n_controls: int, measure):
    """Best substitution with the given control count under `measure`
    (smaller is better); None when nothing strictly improves."""
    before = measure(state)
    best = None
    best_key = None
    for target in range(state.n_vars):
        others = [v for v in range(state.n_vars) if v != target]
        for controls in itertools.combinations(others, n_controls):
            t = Transformation(controls, target)
            after = apply_substitution(state, t)
            m = measure(after)
            key = (m, after.literal_count(), target, controls)
            if best_key is None or key < best_key:
                best, best_key = t, key
    if best is None or best_key[0] >= before:
        return None, best, best_key
    return best, best, best_key


def find_T3(state: ExpressionState) -> Transformation | None:
    """Toffoli substitution strictly decreasing the nonlinear cube count
    (ties: fewest literals, then lexicographic)."""
    hit, _, _ = _search_controls(state, 2, ExpressionState.nonlinear_count)
    return hit


def find_T4(state: ExpressionState) -> Transformation | None:
    """Three-control substitution strictly decreasing the count of cubes
    with three or more literals (the scaling phase for four variables)."""
    hit, _, _ = _search_controls(state, 3, ExpressionState.high_degree_count)
    return hit


def _degree_measure(state: ExpressionState) -> tuple[int, int, int]:
    return (state.high_degree_count(), state.nonlinear_count(),
            state.literal_count())


def _best_degree_clearer(state: ExpressionState):
    """Best substitution of any width for shedding 3-literal cubes, under
    the lexicographic (wide cubes, nonlinear cubes, literals) measure.
    Returns (strict_improver_or_None, overall_best)."""
    before = _degree_measure(state)
    best = None
    best_key = None
    for n_controls in (1, 2, 3):
        if n_controls >= state.n_vars:
            break
        for target in range(state.n_vars):
            others = [v for v in range(state.n_vars) if v != target]
            for controls in itertools.combinations(others, n_controls):
                t = Transformation(controls, target)
                m = _degree_measure(apply_substitution(state, t))
                key = (m, n_controls, target, controls)
                if best_key is None or key < best_key:
                    best, best_key = t, key
    if best is not None and best_key[0] < before:
        return best, best
    return None, best


def _lex_measure(state: ExpressionState) -> tuple[int, int]:
    return (state.nonlinear_count(), state.literal_count())


def _all_candidates(state: ExpressionState):
    widths = (1, 2, 3) if state.n_vars >= 4 else (1, 2)
    for n_controls in widths:
        if n_controls >= state.n_vars:
            return
        for target in range(state.n_vars):
            others = [v for v in range(state.n_vars) if v != target]
            for controls in itertools.combinations(others, n_controls):
                yield Transformation(controls, target)


def _stall_rescue(state: ExpressionState) -> list[Transformation]:
    """When no single preferred substitution helps, look for any width-1..3
    substitution, then any pair, that strictly lowers (nonlinear cubes,
    literals)."""
    before = _lex_measure(state)
    best: list[Transformation] = []
    best_key = None
    for t in _all_candidates(state):
        key = (_lex_measure(apply_substitution(state, t)), t.controls, t.target)
        if best_key is None or key < best_key:
            best, best_key = [t], key
    if best_key is not None and best_key[0] < before:
        return best
    for t1 in _all_candidates(state):
        mid = apply_substitution(state, t1)
        for t2 in _all_candidates(mid):
            if t2 == t1:
                continue
            if _lex_measure(apply_substitution(mid, t2)) < before:
                return [t1, t2]
    return []


def _linear_finish_ops(state: ExpressionState) -> list[Transformation]:
    """Deterministic affine finisher for an all-linear state.

    Column elimination drives the coefficient matrix to a permutation
    (preferring the natural diagonal pivot), inverters clear complemented
    outputs, and swap triples realize the leftover line permutation.
    Guaranteed to terminate, unlike greedy literal-count descent.
    """
    n = state.n_vars
    cols = [0] * n          # cols[j] bit i = coefficient of var j in expr i
    consts = 0
    for i, e in enumerate(state.exprs):
        for m in e:
            if m == 0:
                consts |= 1 << i
            else:
                cols[m.bit_length() - 1] |= 1 << i
    ops: list[Transformation] = []

    def emit(control: int, target: int):
        # substitution target <- target ^ control: control's column
        # absorbs the target's
        cols[control] ^= cols[target]
        ops.append(Transformation((control,), target))

    pivot_of_row = {}
    used = set()
    for i in range(len(state.exprs)):
        row_bit = 1 << i
        if cols[i] & row_bit and i not in used:
            p = i
        else:
            p = next(j for j in range(n) if cols[j] & row_bit and j not in used)
        used.add(p)
        pivot_of_row[i] = p
        for c in range(n):
            if c != p and cols[c] & row_bit:
                emit(c, p)
    for i in range(len(state.exprs)):
        if consts >> i & 1:
            ops.append(Transformation((), pivot_of_row[i]))
    # residual permutation: selection-sort with swap triples
    perm = [pivot_of_row[i] for i in range(len(state.exprs))]
    for i in range(len(perm)):
        if perm[i] == i:
            continue
        u, v = perm[i], i
        for c, t in ((u, v), (v, u), (u, v)):
            ops.append(Transformation((c,), t))
        for k in range(len(perm)):
            if perm[k] == u:
                perm[k] = v
            elif perm[k] == v:
                perm[k] = u
    return ops


def reduce_to_identity(state: ExpressionState,
                       policy: str = POLICY_UNIQUE_PAIR,
                       iteration_cap: int | None = None) -> ExpressionState:
    """Run the substitution loop until every expression is a distinct
    single literal on its own line.

    CNOT substitutions are preferred; Toffoli substitutions take over when
    none qualifies or the same step would repeat.  When neither strictly
    improves, the least-damaging Toffoli is accepted at most twice in a
    row before giving up (reported as non-convergence).
    """
    n = state.n_vars
    if n > 4:
        raise NonConvergenceError("rule set covers at most four variables")
    cap = iteration_cap if iteration_cap is not None else 10 * 4 ** n
    steps = 0
    escapes = 0

    def step(t: Transformation) -> ExpressionState:
        nonlocal steps
        steps += 1
        if steps > cap:
            raise NonConvergenceError(f"no convergence within {cap} substitutions")
        return apply_substitution(state, t)

    # four-variable scaling phase: clear cubes of three or more literals
    # with whichever substitution width helps most
    while state.high_degree_count() > 0:
        t, best = _best_degree_clearer(state)
        if t is None:
            escapes += 1
            if best is None or escapes > 2:
                raise NonConvergenceError(
                    "stuck while clearing three-literal cubes")
            t = best
        else:
            escapes = 0
        state = step(t)

    while not state.is_linear():
        before = _lex_measure(state)
        t = check_T2(state, policy)
        pending = [t] if t is not None and t != state.last_applied else []
        if not pending:
            t = find_T3(state)
            pending = [t] if t is not None else _stall_rescue(state)
        if not pending:
            _, best, _ = _search_controls(
                state, 2, ExpressionState.nonlinear_count)
            escapes += 1
            if best is None or escapes > 2:
                raise NonConvergenceError("no reducing substitution left")
            pending = [best]
        for t in pending:
            state = step(t)
        if _lex_measure(state) < before:
            escapes = 0

    for t in _linear_finish_ops(state):
        state = step(t)
    if not state.is_terminal():
        raise NonConvergenceError("affine finisher left a non-identity state")
    return state


def ancilla_free_synthesize(
    spec: Permutation,
    policy: str = POLICY_UNIQUE_PAIR,
    iteration_cap: int | None = None,
    verify: bool = True,
) -> tuple[Circuit, CostReport]:
    """Synthesize a reversible function on exactly its own lines.

    The emitted circuit has n lines, no constants, no garbage; every line
    ends carrying its output.  Verified by exhaustive simulation before
    returning.
    """
    t0 = time.perf_counter()
    tt = truth_table_from_permutation(spec)
    n = tt.n_inputs
    exprs = tuple(anf_from_truth_table(tt.single_output(j)).masks
                  for j in range(n))
    state = ExpressionState(n, exprs)
    state = reduce_to_identity(state, policy, iteration_cap)

    lines = []
    for i in range(n):
        lines.append(LineState(i, f"x{i + 1}", INPUT,
                               role=ROLE_OUTPUT, output_name=tt.output_names[i],
                               function=anf_from_truth_table(tt.single_output(i))))
    circuit = Circuit(n, [], lines)
    for t in state.history:
        if not t.controls:
            circuit.append(not_gate(t.target))
        elif len(t.controls) == 1:
            circuit.append(cnot(t.controls[0], t.target))
        else:
            circuit.append(toffoli(t.controls, t.target))
    report = quantum_cost(circuit, time.perf_counter() - t0)
    if verify:
        verdict = verify_equivalence(circuit, tt)
        if not verdict:
            raise VerificationError(
                f"gate sequence disagrees with the spec at {verdict.counterexample}")
    return circuit, report


@dataclass
class SweepStats:
    runs: int = 0
    converged: int = 0
    total_gates: int = 0
    total_qc: int = 0
    failures: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def mean_gates(self) -> float:
        return self.total_gates / self.converged if self.converged else 0.0

    @property
    def mean_qc(self) -> float:
        return self.total_qc / self.converged if self.converged else 0.0


def exhaustive_sweep(n: int, policy: str = POLICY_UNIQUE_PAIR,
                     on_result=None) -> SweepStats:
    """Run every n-variable reversible function through the synthesizer.

    on_result(images, report) is called per function (for CSV streaming);
    non-convergent functions are collected rather than raised.
    """
    stats = SweepStats()
    for images in itertools.permutations(range(1 << n)):
        stats.runs += 1
        try:
            _, report = ancilla_free_synthesize(Permutation(images), policy)
        except NonConvergenceError:
            stats.failures.append(images)
            if on_result is not None:
                on_result(images, None)
            continue
        stats.converged += 1
        stats.total_gates += report.gate_count
        stats.total_qc += report.quantum_cost
        if on_result is not None:
            on_result(images, report)
    return stats
