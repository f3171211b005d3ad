import random

import pytest

from esopsyn.circuit import CONSTANT, ROLE_GARBAGE, ROLE_OUTPUT, line_functions
from esopsyn.dag import T_XOR, build_dag
from esopsyn.funcs import EsopExpression, Permutation, TruthTable
from esopsyn.mapper import (
    RULE_AND_XOR_PARENT, RULE_MAX_CHILD, RULE_XOR_SINGLE, SynthesisError,
    find_target, order_outputs, synthesize,
)
from esopsyn.optimize import OptimizeParams

NTH_PRIME3 = Permutation((0, 2, 3, 5, 7, 1, 4, 6))


def expr(n, masks):
    return EsopExpression.from_masks(n, masks)


def test_rule_one_fires_on_an_exclusively_owned_leaf():
    dag = build_dag([expr(2, [0b01, 0b10])], 3)
    choice = find_target(dag)
    assert choice.rule == RULE_XOR_SINGLE
    assert dag.nodes[choice.node].kind == T_XOR


def test_rule_two_returns_the_xor_parent_of_a_deep_product():
    # y = x1.x2 ^ x3: the product sits one level above the leaves and its
    # xor parent exclusively owns x3
    dag = build_dag([expr(3, [0b011, 0b100])], 3)
    choice = find_target(dag)
    assert choice.rule == RULE_AND_XOR_PARENT
    assert dag.nodes[choice.node].kind == T_XOR


def test_rule_three_accepts_a_garbage_line():
    # every leaf is shared between two parents, so neither greedy branch
    # applies and a fresh line is the only way forward
    dag = build_dag([expr(2, [0b01, 0b10]), expr(2, [0b01, 0b11])], 3)
    choice = find_target(dag)
    assert choice.rule == RULE_MAX_CHILD


def test_completion_signal():
    dag = build_dag([expr(2, [0b01])], 3)
    assert find_target(dag) is None


def test_simplest_inverter():
    circ, rep = synthesize(Permutation((1, 0)))
    assert [str(g) for g in circ.gates] == ["t1 0"]
    assert (rep.quantum_cost, rep.gate_count, rep.garbage_count) == (1, 1, 0)


def test_cnot_emission_onto_a_consumed_input():
    circ, rep = synthesize(TruthTable(2, 1, (0, 1, 1, 0)))   # x1 ^ x2
    assert rep.gate_count == 1 and rep.quantum_cost == 1
    assert rep.line_count == 2 and rep.garbage_count == 1


def test_product_needs_a_fresh_line():
    circ, rep = synthesize(TruthTable(2, 1, (0, 0, 0, 1)))   # x1.x2
    assert [str(g) for g in circ.gates] == ["t3 0,1,2"]
    assert circ.lines[2].origin == CONSTANT
    assert rep.garbage_count == 2


def test_constant_one_child_inverts_last():
    circ, rep = synthesize(TruthTable(2, 1, (1, 0, 1, 0)))   # 1 ^ x1
    kinds = [str(g) for g in circ.gates]
    assert kinds[-1].startswith("t1")


def test_prime_counter_best_point():
    hits = set()
    results = {}
    for t in (3, 4):
        for c in (0, 1):
            for k in range(4):
                for p in (0, 1):
                    params = OptimizeParams(t, bool(c), k, bool(p))
                    _, rep = synthesize(NTH_PRIME3, params)
                    key = (rep.quantum_cost, rep.gate_count, rep.garbage_count)
                    results[params.tckp()] = key
                    hits.add(key)
    assert (6, 4, 0) in hits
    assert results["3111"] == (6, 4, 0)


def test_prime_counter_gate_list_at_the_best_point():
    circ, rep = synthesize(NTH_PRIME3, OptimizeParams(3, True, 1, True))
    assert [str(g) for g in circ.gates] == \
        ["t2 2,1", "t2 1,0", "t3 0,1,2", "t2 1,2"]
    assert rep.peres_pairs == 1
    assert rep.line_count == 3


def test_mod5_detector_with_kernels_enabled():
    col = 0
    for i in (0, 5, 10, 15):
        col |= 1 << i
    tt = TruthTable.from_columns(4, [col])
    _, rep = synthesize(tt, OptimizeParams(3, True, 1, False))
    assert (rep.quantum_cost, rep.gate_count, rep.garbage_count) == (9, 5, 4)


def test_every_output_lands_on_a_line():
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(1, 4)
        m = rng.randint(1, 3)
        tt = TruthTable(n, m, tuple(rng.randrange(1 << m)
                                    for _ in range(1 << n)))
        circ, rep = synthesize(tt, OptimizeParams(3, True, rng.randint(0, 3),
                                                  rng.random() < 0.5))
        assert set(circ.output_map()) == set(tt.output_names)
        assert rep.garbage_count + rep.ancilla_count + m == rep.line_count


def test_duplicate_outputs_cost_one_copy():
    tt = TruthTable(2, 2, (0, 3, 3, 0))     # both outputs are x1 ^ x2
    circ, rep = synthesize(tt)
    outs = circ.output_map()
    assert len(set(outs.values())) == 2
    assert rep.quantum_cost == 2            # one cnot plus one copy


def test_identity_outputs_reuse_input_lines():
    tt = TruthTable(2, 2, (0, 2, 1, 3))     # swapped wires, pure relabeling
    circ, rep = synthesize(tt)
    assert rep.gate_count == 0
    assert rep.garbage_count == 0


def test_constant_outputs():
    tt = TruthTable(1, 2, (2, 3))           # y1 = x1, y2 = 1
    circ, rep = synthesize(tt)
    assert rep.gate_count == 1              # one inverter on a fresh line
    assert circ.gates[0].family == "t" and not circ.gates[0].controls


def test_fresh_wire_names_avoid_user_input_names():
    tt = TruthTable(2, 1, (0, 0, 0, 1), input_names=("w1", "w2"))
    circ, _ = synthesize(tt)
    names = [l.name for l in circ.lines]
    assert len(names) == len(set(names))


def test_all_constant_outputs():
    tt = TruthTable(2, 3, (5, 5, 5, 5))     # y1 = 1, y2 = 0, y3 = 1
    circ, rep = synthesize(tt)
    assert sorted(circ.output_map()) == ["y1", "y2", "y3"]
    zero = synthesize(TruthTable(3, 1, (0,) * 8))[1]
    assert zero.gate_count == 0 and zero.garbage_count == 3


def test_input_limit_guard():
    with pytest.raises(SynthesisError):
        synthesize(TruthTable(5, 1, (0,) * 32), input_limit=4)


def test_relabeling_beats_copying():
    # two outputs living on each other's natural lines: claiming must not
    # emit any copy gates
    tt = TruthTable(2, 2, (0, 2, 1, 3))
    circ, _ = synthesize(tt)
    circ2 = order_outputs(circ, tt)
    assert circ2.gates == circ.gates
    assert set(circ2.output_map()) == {"y1", "y2"}


def test_order_outputs_recovers_dropped_labels():
    tt = TruthTable(2, 1, (0, 1, 1, 0))
    circ, rep = synthesize(tt)
    for line in circ.lines:
        if line.role == ROLE_OUTPUT:
            line.role = ROLE_GARBAGE
            line.output_name = None
    fixed = order_outputs(circ, tt)
    assert set(fixed.output_map()) == {"y1"}
    funcs = line_functions(fixed, 2, [0, 1])
    assert funcs[fixed.output_map()["y1"]] == tt.column_bits(0)


def test_parameter_sweep_stays_sound():
    rng = random.Random(10)
    for _ in range(25):
        n = rng.randint(2, 4)
        images = list(range(1 << n))
        rng.shuffle(images)
        spec = Permutation(tuple(images))
        params = OptimizeParams(rng.choice([2, 3, 4, 5]), rng.random() < 0.5,
                                rng.randint(0, 5), rng.random() < 0.5)
        synthesize(spec, params, check_invariants=True)
