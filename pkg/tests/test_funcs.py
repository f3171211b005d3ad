import random

import pytest
from hypothesis import given, settings, strategies as st

from esopsyn.funcs import (
    Cube, EsopExpression, Permutation, TruthTable, anf_from_truth_table,
    mobius_bits, truth_table_from_anf, truth_table_from_permutation,
)


def table_from_ones(n, ones):
    col = 0
    for i in ones:
        col |= 1 << i
    return TruthTable.from_columns(n, [col])


FOUR_MOD_FIVE = table_from_ones(4, (0, 5, 10, 15))

# 1 ^ x1 ^ x2 ^ x1x2 ^ x3 ^ x2x3 ^ x4 ^ x1x4 ^ x3x4
FOUR_MOD_FIVE_CUBES = frozenset(
    {0b0000, 0b0001, 0b0010, 0b0011, 0b0100, 0b0110, 0b1000, 0b1001, 0b1100})


def test_constant_zero_has_empty_cube_set():
    for n in (1, 3, 5):
        tt = TruthTable(n, 1, tuple([0] * (1 << n)))
        assert anf_from_truth_table(tt).cubes == frozenset()


def test_single_variable_identity():
    tt = TruthTable(1, 1, (0, 1))
    expr = anf_from_truth_table(tt)
    assert expr.masks == frozenset({0b1})


def test_mod5_detector_normal_form():
    expr = anf_from_truth_table(FOUR_MOD_FIVE)
    assert expr.masks == FOUR_MOD_FIVE_CUBES
    # cross-check with the brute-force evaluator
    for x in range(16):
        assert expr.evaluate(x) == (FOUR_MOD_FIVE.rows[x] & 1)


def test_mod5_cube_list_back_to_table():
    expr = EsopExpression.from_masks(4, FOUR_MOD_FIVE_CUBES)
    tt = truth_table_from_anf(expr)
    assert tt.rows == FOUR_MOD_FIVE.rows


def test_empty_and_constant_expressions():
    assert truth_table_from_anf(EsopExpression.from_masks(2, [])).rows == (0,) * 4
    ones = truth_table_from_anf(EsopExpression.from_masks(2, [0]))
    assert ones.rows == (1,) * 4


def test_multi_output_tables_are_rejected():
    tt = TruthTable(2, 2, (0, 1, 2, 3))
    with pytest.raises(ValueError):
        anf_from_truth_table(tt)


def test_permutation_tables():
    assert truth_table_from_permutation(Permutation((0, 1, 2, 3))).rows == (0, 1, 2, 3)
    assert truth_table_from_permutation(Permutation((1, 0))).rows == (1, 0)
    t = truth_table_from_permutation(Permutation((0, 2, 3, 5, 7, 1, 4, 6)))
    assert t.n_inputs == t.n_outputs == 3
    assert t.rows == (0, 2, 3, 5, 7, 1, 4, 6)


def test_permutation_validation():
    with pytest.raises(ValueError):
        Permutation((0, 1, 2))          # not a power of two
    with pytest.raises(ValueError):
        Permutation((0, 0, 1, 1))       # not a bijection


def test_table_validation():
    with pytest.raises(ValueError):
        TruthTable(2, 1, (0, 1, 0))     # wrong row count
    with pytest.raises(ValueError):
        TruthTable(1, 1, (0, 2))        # row wider than outputs
    with pytest.raises(ValueError):
        TruthTable(2, 1, (0,) * 4, input_names=("a", "a"))


@given(st.integers(min_value=1, max_value=10), st.randoms())
@settings(max_examples=60, deadline=None)
def test_transform_is_an_involution(n, rnd):
    bits = rnd.getrandbits(1 << n)
    assert mobius_bits(mobius_bits(bits, n), n) == bits


@given(st.integers(min_value=1, max_value=4), st.randoms())
@settings(max_examples=40, deadline=None)
def test_round_trip_small(n, rnd):
    rows = tuple(rnd.getrandbits(1) for _ in range(1 << n))
    tt = TruthTable(n, 1, rows)
    back = truth_table_from_anf(anf_from_truth_table(tt))
    assert back.rows == tt.rows


def test_round_trip_larger_sizes():
    rng = random.Random(12)
    for n in range(5, 13):
        col = rng.getrandbits(1 << n)
        tt = TruthTable.from_columns(n, [col])
        expr = anf_from_truth_table(tt)
        assert truth_table_from_anf(expr).rows == tt.rows
        # spot-check the expression against the table
        for _ in range(16):
            x = rng.randrange(1 << n)
            assert expr.evaluate(x) == tt.rows[x]


def test_reversible_outputs_avoid_the_full_cube():
    # balanced outputs have even weight for n >= 2, so the all-variables
    # product never appears
    rng = random.Random(5)
    for n in (2, 3, 4):
        top = (1 << n) - 1
        for _ in range(20):
            images = list(range(1 << n))
            rng.shuffle(images)
            tt = truth_table_from_permutation(Permutation(tuple(images)))
            for j in range(n):
                expr = anf_from_truth_table(tt.single_output(j))
                assert top not in expr.masks


def test_cube_helpers():
    c = Cube(0b1011)
    assert c.degree == 3
    assert c.variables() == (0, 1, 3)
    assert str(c) == "x1x2x4"
    assert str(Cube(0)) == "1"
    assert Cube(0).evaluate(0) == 1 and Cube(0b10).evaluate(0b01) == 0
