"""The and-xor graph and the three optimization passes.

The per-output expressions become one shared directed acyclic graph whose
nodes are xor, and, identifier and constant.  Kernel factoring reshapes
each expression before the graph is built, cube sharing hoists common
child sets afterwards, and parent reduction reroutes a leaf through an
existing a^b node so the mapper can consume it in place.
"""

from esopsyn import (
    Permutation, anf_from_truth_table, build_dag,
    common_cube_sharing, dag_to_expressions, dump_text, extract_kernels,
    factor_expression, reduce_parents, select_divisor,
    truth_table_from_permutation, validate_dag,
)
from esopsyn.dag import build_dag_from_trees
from esopsyn.optimize import OptimizeParams

perm = Permutation((0, 2, 3, 5, 7, 1, 4, 6))
table = truth_table_from_permutation(perm)
exprs = [anf_from_truth_table(table.single_output(j)) for j in range(3)]

print("== flat graph ==")
dag = build_dag(exprs, max_and_arity=3, output_names=list(table.output_names))
print(dump_text(dag))

print("== kernels of y3 ==")
y3 = exprs[2]
print("y3 =", y3)
for e in extract_kernels(y3).entries:
    print(f"  kernel {e.kernel}  co-kernel {e.co_kernel}  remainder {e.remainder}")
pick = select_divisor(extract_kernels(y3), threshold=1)
print("selected divisor:", pick.kernel, "by minimum remainder")

print("\n== factored + shared graph ==")
params = OptimizeParams(kernel_threshold=1)
trees = [factor_expression(e, params) for e in exprs]
dag = build_dag_from_trees(trees, 3, 3, output_names=list(table.output_names))
report = common_cube_sharing(dag)
print("sharing events:", report.events)
print(dump_text(dag))
print("still sound:", [x.masks for x in dag_to_expressions(dag)]
      == [e.masks for e in exprs])

print("== parent reduction ==")
x1 = dag.var_node(0)
before = len(dag.nodes[x1].parents)
rep = reduce_parents(dag, x1)
print(f"x1 parents {before} -> {len(dag.nodes[x1].parents)}; "
      f"rewrites: {rep.events}")
print("graph still valid:", validate_dag(dag) == [])
