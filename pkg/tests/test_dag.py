import random

import pytest

from esopsyn.dag import (
    T_AND, T_CONST, T_ID, T_XOR, build_dag, dag_to_expressions,
    dump_dot, dump_text, validate_dag,
)
from esopsyn.funcs import (
    EsopExpression, Permutation, anf_from_truth_table,
    truth_table_from_permutation,
)


def expr(n, masks):
    return EsopExpression.from_masks(n, masks)


def test_single_variable_output_is_a_bare_identifier():
    dag = build_dag([expr(2, [0b01])], 3)
    (child,) = dag.nodes[dag.root].children
    assert dag.nodes[child].kind == T_ID
    assert dag.nodes[child].label == "x1"


def test_mod5_shape_under_wide_gates():
    cubes = {0b0000, 0b0001, 0b0010, 0b0011, 0b0100, 0b0110, 0b1000, 0b1001,
             0b1100}
    dag = build_dag([expr(4, cubes)], 3)
    (top,) = dag.nodes[dag.root].children
    node = dag.nodes[top]
    assert node.kind == T_XOR
    kinds = [dag.nodes[c].kind for c in node.children]
    assert len(kinds) == 9
    assert kinds.count(T_CONST) == 1
    assert kinds.count(T_ID) == 4
    assert kinds.count(T_AND) == 4
    for c in node.children:
        if dag.nodes[c].kind == T_AND:
            assert len(dag.nodes[c].children) == 2


def test_wide_cube_is_chained_to_the_arity_bound():
    dag = build_dag([expr(3, [0b111])], 3)     # largest gate: 3 lines
    (top,) = dag.nodes[dag.root].children
    outer = dag.nodes[top]
    assert outer.kind == T_AND and len(outer.children) == 2
    inner = dag.nodes[outer.children[1]]
    assert inner.kind == T_AND and len(inner.children) == 2
    back = dag_to_expressions(dag)[0]
    assert back.masks == frozenset({0b111})


def test_arity_bound_validation():
    with pytest.raises(ValueError):
        build_dag([expr(2, [0b11])], 1)
    with pytest.raises(ValueError):
        build_dag([], 3)


def test_identical_cubes_share_one_node():
    dag = build_dag([expr(3, [0b011, 0b100]), expr(3, [0b011])], 4)
    ands = [n for n in dag.nodes.values() if n.kind == T_AND]
    assert len(ands) == 1
    assert len(ands[0].parents) == 2
    ids = [n for n in dag.nodes.values() if n.kind == T_ID]
    assert len(ids) == len({n.label for n in ids})


def test_readback_round_trip_random():
    rng = random.Random(31)
    for _ in range(30):
        n = rng.randint(1, 6)
        exprs = []
        for _ in range(rng.randint(1, 3)):
            masks = {rng.randrange(1 << n) for _ in range(rng.randint(0, 10))}
            exprs.append(expr(n, masks))
        for t in (2, 3, n + 1):
            dag = build_dag(exprs, max(t, 2))
            back = dag_to_expressions(dag)
            assert [b.masks for b in back] == [e.masks for e in exprs]
            assert validate_dag(dag) == []


def test_flat_children_count_matches_cube_count():
    # with sharing off and wide gates every non-constant cube keeps its
    # own child under the output's xor node
    rng = random.Random(8)
    for _ in range(20):
        n = rng.randint(2, 6)
        masks = {rng.randrange(1, 1 << n) for _ in range(rng.randint(2, 12))}
        dag = build_dag([expr(n, masks)], n + 1)
        (top,) = dag.nodes[dag.root].children
        node = dag.nodes[top]
        countable = [c for c in node.children
                     if dag.nodes[c].kind in (T_AND, T_ID)]
        assert len(countable) == len(masks)


def test_oracle_chain_for_the_prime_counter():
    tt = truth_table_from_permutation(Permutation((0, 2, 3, 5, 7, 1, 4, 6)))
    exprs = [anf_from_truth_table(tt.single_output(j)) for j in range(3)]
    dag = build_dag(exprs, 3, output_names=list(tt.output_names))
    back = dag_to_expressions(dag)
    assert [b.masks for b in back] == [e.masks for e in exprs]


def test_validate_reports_broken_mirrors():
    dag = build_dag([expr(2, [0b01, 0b10])], 3)
    assert validate_dag(dag) == []
    (top,) = dag.nodes[dag.root].children
    dag.nodes[top].parents.append(12345)
    problems = validate_dag(dag)
    assert any("dangling parent" in p for p in problems)


def test_validate_reports_bad_arity():
    dag = build_dag([expr(2, [0b01, 0b10])], 3)
    (top,) = dag.nodes[dag.root].children
    child = dag.nodes[top].children[1]
    dag.set_children(top, [dag.nodes[top].children[0]])
    del child
    assert any("arity" in p for p in validate_dag(dag))


def test_dumps_carry_depth_suffixes():
    dag = build_dag([expr(2, [0b01, 0b10, 0b11])], 3)
    text = dump_text(dag)
    assert "root0_0" in text
    assert "x1_" in text
    dot = dump_dot(dag)
    assert "digraph" in dot and "->" in dot


def test_long_random_rewrite_sequences_keep_the_graph_valid():
    # >1000 rewrite steps across sharing, parent reduction and mapping,
    # revalidating as we go
    from esopsyn.mapper import find_target, _Mapper
    from esopsyn.optimize import common_cube_sharing, parent_reduction_pass

    rng = random.Random(2718)
    steps = 0
    while steps < 1000:
        n = rng.randint(2, 5)
        exprs = [expr(n, {rng.randrange(1 << n)
                          for _ in range(rng.randint(1, 10))})
                 for _ in range(rng.randint(1, 3))]
        dag = build_dag(exprs, rng.choice([3, 4]))
        mapper = _Mapper(dag, n, [f"x{i+1}" for i in range(n)])
        while True:
            op = rng.randrange(3)
            if op == 0:
                rep = common_cube_sharing(dag, sweep_cap=1)
                steps += max(1, len(rep.events))
            elif op == 1:
                parent_reduction_pass(dag)
                steps += 1
            else:
                choice = find_target(dag)
                if choice is None:
                    break
                mapper.map_target(choice)
                steps += 1
            assert validate_dag(dag) == []


def test_depths_increase_along_edges():
    rng = random.Random(77)
    for _ in range(10):
        n = rng.randint(2, 5)
        masks = {rng.randrange(1 << n) for _ in range(6)}
        dag = build_dag([expr(n, masks)], 3)
        for nid, node in dag.nodes.items():
            for c in node.children:
                assert dag.nodes[c].depth > node.depth
