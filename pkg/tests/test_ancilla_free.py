import random

import pytest

from esopsyn.ancilla_free import (
    ExpressionState, NonConvergenceError, POLICY_COMMON_CONTROL,
    Transformation, ancilla_free_synthesize, apply_substitution, check_T2,
    find_T3, find_T4, reduce_to_identity,
)
from esopsyn.circuit import simulate
from esopsyn.funcs import Permutation

# the three-output benchmark whose reduction is traced in the docs:
# f1 = ac^bc^a^c^1, f2 = a^b^c^1, f3 = ab^bc^b^c^1 (a=x1, b=x2, c=x3)
F1 = frozenset({0b101, 0b110, 0b001, 0b100, 0b000})
F2 = frozenset({0b001, 0b010, 0b100, 0b000})
F3 = frozenset({0b011, 0b110, 0b010, 0b100, 0b000})
THREE_17_STATE = ExpressionState(3, (F1, F2, F3))
THREE_17 = Permutation((7, 4, 1, 6, 0, 2, 3, 5))


def test_substituting_the_shared_pair_merges_two_products():
    t = check_T2(THREE_17_STATE)
    assert t == Transformation((1,), 0)       # control b, target a
    after = apply_substitution(THREE_17_STATE, t)
    assert after.exprs == (
        frozenset({0b101, 0b001, 0b010, 0b100, 0b000}),   # ac^a^b^c^1
        frozenset({0b001, 0b100, 0b000}),                  # a^c^1
        frozenset({0b011, 0b110, 0b100, 0b000}),           # ab^bc^c^1
    )
    assert after.nonlinear_count() == 3


def test_substitution_is_an_involution():
    t = Transformation((1,), 0)
    state = ExpressionState(3, (frozenset({0b001}),))
    once = apply_substitution(state, t)
    assert once.exprs[0] == frozenset({0b001, 0b010})      # a -> a^b
    twice = apply_substitution(once, t)
    assert twice.exprs == state.exprs


def test_check_T2_on_linear_states_reduces_literals():
    state = ExpressionState(3, (frozenset({0b001, 0b010}),  # a^b
                                frozenset({0b010}),         # b
                                frozenset({0b100})))        # c
    t = check_T2(state)
    assert t == Transformation((1,), 0)       # reroute through b
    assert check_T2(ExpressionState(2, (frozenset({0b01}),
                                        frozenset({0b10})))) is None


def test_find_T3_cancels_a_lone_product():
    state = ExpressionState(3, (frozenset({0b011, 0b100}),  # ab ^ c
                                frozenset({0b001}),
                                frozenset({0b010})))
    t = find_T3(state)
    assert t == Transformation((0, 1), 2)
    after = apply_substitution(state, t)
    assert after.nonlinear_count() == 0


def test_find_T3_gives_up_when_nothing_decreases():
    linear = ExpressionState(2, (frozenset({0b01}), frozenset({0b10})))
    assert find_T3(linear) is None
    stuck = ExpressionState(3, (frozenset({0b011}), frozenset({0b101}),
                                frozenset({0b110})))
    assert find_T3(stuck) is None


def test_find_T4_clears_a_wide_cube():
    state = ExpressionState(4, (frozenset({0b0111, 0b1000}),   # abc ^ d
                                frozenset({0b0001}),
                                frozenset({0b0010}),
                                frozenset({0b0100})))
    t = find_T4(state)
    assert t == Transformation((0, 1, 2), 3)
    assert apply_substitution(state, t).high_degree_count() == 0


def test_identity_needs_no_gates():
    circ, rep = ancilla_free_synthesize(Permutation(tuple(range(8))))
    assert rep.gate_count == 0
    assert rep.line_count == 3
    assert rep.garbage_count == rep.ancilla_count == 0


def test_three_17_first_gate_and_line_count():
    circ, rep = ancilla_free_synthesize(THREE_17)
    assert str(circ.gates[0]) == "t2 1,0"
    assert rep.line_count == 3
    assert rep.garbage_count == 0 and rep.ancilla_count == 0


def test_gate_order_realizes_the_function():
    rng = random.Random(6)
    for _ in range(50):
        images = list(range(8))
        rng.shuffle(images)
        circ, _ = ancilla_free_synthesize(Permutation(tuple(images)))
        for x in range(8):
            assert simulate(circ, x) == images[x]


def test_progress_and_history_shape():
    state = reduce_to_identity(THREE_17_STATE)
    assert state.is_terminal()
    assert all(t.kind in ("T1", "T2", "T3") for t in state.history)
    assert len(state.history) <= 10 * 4 ** 3


def test_iteration_cap_reports_non_convergence():
    with pytest.raises(NonConvergenceError):
        reduce_to_identity(THREE_17_STATE, iteration_cap=1)


def test_too_many_variables_is_rejected():
    with pytest.raises(NonConvergenceError):
        reduce_to_identity(ExpressionState(5, (frozenset({0b1}),) * 5))


def test_alternate_control_policy_still_verifies_when_it_converges():
    rng = random.Random(14)
    done = 0
    for _ in range(60):
        images = list(range(8))
        rng.shuffle(images)
        try:
            circ, rep = ancilla_free_synthesize(
                Permutation(tuple(images)), policy=POLICY_COMMON_CONTROL)
        except NonConvergenceError:
            continue   # this reading of the rule does stall on some inputs
        done += 1
        assert rep.line_count == 3
    assert done > 0


def test_four_variable_benchmarks_converge():
    from esopsyn import benchmarks
    for name in ("hwb4", "nth_prime_4_inc", "4_49"):
        spec = benchmarks.get(name)
        circ, rep = ancilla_free_synthesize(spec)
        assert rep.line_count == 4
        assert rep.garbage_count == 0 and rep.ancilla_count == 0
