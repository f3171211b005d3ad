"""Optimization engines: kernel factoring, common cube sharing, parent reduction.

All three are independently switchable through OptimizeParams (the T/C/K/P
knobs).  Kernel extraction restructures each output expression before the
graph is built; cube sharing and parent reduction rewrite the graph, and
every rewrite here preserves the function computed by each output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dag import (
    EsopDag, FAnd, FCube, FXor, T_AND, T_ID, T_ROOT, T_XOR,
)
from .funcs import Cube, EsopExpression


@dataclass(frozen=True)
class OptimizeParams:
    """The four synthesis knobs plus implementation limits.

    kernel_threshold of 0 disables kernel extraction; otherwise only
    kernels with more than kernel_threshold cubes may become divisors.
    """

    max_and_arity: int = 3          # T
    cube_sharing: bool = True       # C
    kernel_threshold: int = 0       # K
    parent_reduction: bool = False  # P
    general_expansion: bool = False  # optional extra parent-reduction rewrite
    sharing_sweep_cap: int = 32
    kernel_cap: int = 2000

    def __post_init__(self):
        if self.max_and_arity < 2:
            raise ValueError("max_and_arity must be >= 2")
        if self.kernel_threshold < 0:
            raise ValueError("kernel_threshold must be >= 0")

    def tckp(self) -> str:
        return (f"{self.max_and_arity}{int(self.cube_sharing)}"
                f"{self.kernel_threshold}{int(self.parent_reduction)}")


@dataclass(frozen=True)
class KernelEntry:
    kernel: EsopExpression
    co_kernel: Cube
    remainder: EsopExpression


@dataclass(frozen=True)
class KernelSet:
    entries: tuple[KernelEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _kernel_pairs(masks: frozenset[int], n_vars: int, cap: int) -> list[tuple[frozenset[int], int]]:
    """(kernel cube set, co-kernel mask) pairs with non-trivial co-kernels.

    Recursive enumeration: divide by the largest common cube of the cubes
    containing each variable that occurs at least twice; co-kernels compose
    along the recursion.  Capped for very dense expressions.
    """
    out: list[tuple[frozenset[int], int]] = []
    seen: set[tuple[int, frozenset[int]]] = set()

    def recurse(g: frozenset[int], min_var: int, co: int):
        if len(out) >= cap:
            return
        for i in range(min_var, n_vars):
            bit = 1 << i
            with_i = [m for m in g if m & bit]
            if len(with_i) < 2:
                continue
            cc = with_i[0]
            for m in with_i[1:]:
                cc &= m
            if cc & (bit - 1):
                continue  # a smaller variable index reaches the same kernel
            q = frozenset(m & ~cc for m in with_i)
            key = (co | cc, q)
            if key not in seen:
                seen.add(key)
                out.append((q, co | cc))
                if len(out) >= cap:
                    return
            recurse(q, i + 1, co | cc)

    recurse(masks, 0, 0)
    return out


def extract_kernels(expr: EsopExpression, cap: int = 2000) -> KernelSet:
    """All kernel/co-kernel/remainder triples of an expression.

    Each entry satisfies co_kernel * kernel ^ remainder == expr over GF(2).
    Expressions with fewer than two cubes have no kernels.
    """
    masks = expr.masks
    if len(masks) < 2:
        return KernelSet(())
    entries = []
    for ker, co in _kernel_pairs(masks, expr.n_vars, cap):
        products = frozenset(co | k for k in ker)
        rem = masks - products
        entries.append(KernelEntry(
            EsopExpression.from_masks(expr.n_vars, ker),
            Cube(co),
            EsopExpression.from_masks(expr.n_vars, rem),
        ))
    return KernelSet(tuple(entries))


def select_divisor(kernels: KernelSet, threshold: int) -> KernelEntry | None:
    """Minimum-remainder kernel among those bigger than the threshold.

    Ties break toward the larger kernel, then the lowest co-kernel mask,
    then the kernel's sorted cube list, keeping runs reproducible.
    """
    best = None
    best_key = None
    for e in kernels.entries:
        if len(e.kernel.cubes) <= threshold:
            continue
        key = (
            len(e.remainder.cubes),
            -len(e.kernel.cubes),
            e.co_kernel.mask,
            tuple(e.kernel.sorted_masks()),
        )
        if best_key is None or key < best_key:
            best, best_key = e, key
    return best


def divide(masks: frozenset[int], divisor: frozenset[int]) -> tuple[frozenset[int], frozenset[int]]:
    """Weak division of a cube set by a multi-cube divisor over GF(2).

    Returns (quotient, remainder) with divisor*quotient ^ remainder == masks
    and all divisor-quotient products distinct (colliding quotient cubes are
    dropped so the identity stays exact).
    """
    d = sorted(divisor)
    q: set[int] | None = None
    for dj in d:
        qj = {m & ~dj for m in masks if m & dj == dj}
        q = qj if q is None else q & qj
    q = q or set()
    kept: list[int] = []
    used: set[int] = set()
    for qi in sorted(q):
        products = {dj | qi for dj in d}
        if len(products) == len(d) and not (products & used):
            kept.append(qi)
            used |= products
    quotient = frozenset(kept)
    remainder = masks - used
    return quotient, remainder


def factor_expression(expr: EsopExpression, params: OptimizeParams):
    """Recursively factored and/xor tree for one output expression.

    Splits off the selected divisor, then factors divisor, quotient and
    remainder the same way; when no kernel beats the threshold the flat
    two-level form is kept.
    """
    tree = _factor(expr.masks, expr.n_vars, params)
    return tree


def _flat_tree(masks: frozenset[int]):
    parts = tuple(FCube(m) for m in sorted(masks, key=lambda m: (m.bit_count(), m)))
    if len(parts) == 1:
        return parts[0]
    return FXor(parts)


def _factor(masks: frozenset[int], n_vars: int, params: OptimizeParams):
    if len(masks) < 2 or params.kernel_threshold == 0:
        return _flat_tree(masks)
    kernels = extract_kernels(
        EsopExpression.from_masks(n_vars, masks), params.kernel_cap)
    entry = select_divisor(kernels, params.kernel_threshold)
    if entry is None:
        return _flat_tree(masks)
    d = entry.kernel.masks
    quotient, remainder = divide(masks, d)
    if not quotient:
        return _flat_tree(masks)
    tree_d = _factor(d, n_vars, params)
    if len(quotient) == 1:
        (q0,) = quotient
        product = FAnd(q0, (tree_d,))
    else:
        tree_q = _factor(quotient, n_vars, params)
        product = FAnd(0, (tree_d, tree_q))
    tree_r = _factor(remainder, n_vars, params)
    if isinstance(tree_r, FXor):
        return FXor((product,) + tree_r.parts)
    return FXor((product, tree_r))


@dataclass
class MutationReport:
    pass_name: str
    events: list[str] = field(default_factory=list)
    nodes_before: int = 0
    nodes_after: int = 0

    @property
    def node_delta(self) -> int:
        return self.nodes_after - self.nodes_before

    def __bool__(self) -> bool:
        return bool(self.events)


# -- common cube sharing -------------------------------------------------------


def _shareable(dag: EsopDag, i: int, j: int) -> str | None:
    """Which sharing rule a node pair satisfies: merge, subset or overlap.

    Subset: one node's children all appear in the other.  Overlap: the
    common children outnumber half of each node's children (a majority of
    the combined count can never happen unless one side is a subset, so
    the test is per node).
    """
    ni, nj = dag.nodes[i], dag.nodes[j]
    if ni.kind != nj.kind or ni.kind not in (T_AND, T_XOR):
        return None
    ci, cj = set(ni.children), set(nj.children)
    if i in cj or j in ci:
        return None
    if ci == cj:
        return "merge"
    if ci < cj or cj < ci:
        return "subset"
    common = ci & cj
    if len(common) >= 2 and 2 * len(common) > len(ci) and 2 * len(common) > len(cj):
        return "overlap"
    return None


def _share(dag: EsopDag, i: int, j: int, rule: str) -> str | None:
    ni, nj = dag.nodes[i], dag.nodes[j]
    ci, cj = set(ni.children), set(nj.children)
    if rule == "merge":
        keep, drop = (i, j) if i < j else (j, i)
        dag.merge_nodes(keep, drop)
        return f"merge #{drop} into #{keep}"
    if rule == "subset":
        if cj < ci:
            i, j = j, i
            ni, nj = nj, ni
            ci, cj = cj, ci
        rest = [c for c in nj.children if c not in ci]
        dag.set_children(j, [i] + rest)
        return f"subset: #{j} now references #{i}"
    # overlap: hoist only onto an already existing node so the total node
    # count can never grow; fresh hoists are the kernel engine's job
    common = ci & cj
    s = _find_with_children(dag, ni.kind, common, exclude=(i, j))
    if s is None:
        return None
    for nid in (i, j):
        rest = [c for c in dag.nodes[nid].children if c not in common]
        dag.set_children(nid, [s] + rest)
    return f"overlap: #{i} and #{j} share #{s}"


def _find_with_children(dag: EsopDag, kind: str, child_set: set[int],
                        exclude=()) -> int | None:
    for nid in dag.internal_ids():
        if nid in exclude:
            continue
        node = dag.nodes[nid]
        if node.kind == kind and set(node.children) == child_set:
            return nid
    return None


def common_cube_sharing(dag: EsopDag, sweep_cap: int = 32) -> MutationReport:
    """Hoist shared child subsets so common subterms are computed once.

    Scans node pairs from one level above the deepest leaves toward the
    root, pairing each node with candidates at its own and every shallower
    level; at most one share is applied per node per sweep, and sweeps
    repeat to a fixpoint.
    """
    report = MutationReport("cube_sharing", nodes_before=len(dag))
    for _ in range(sweep_cap):
        changed = False
        dag.recompute_depths()
        for depth in range(dag.depth_max() - 1, 0, -1):
            level = [nid for nid in dag.internal_ids()
                     if nid in dag.nodes and dag.nodes[nid].depth == depth]
            for i in level:
                if i not in dag.nodes:
                    continue
                done = False
                for depth_j in range(depth, 0, -1):
                    for j in dag.internal_ids():
                        if j == i or j not in dag.nodes or i not in dag.nodes:
                            continue
                        if dag.nodes[j].depth != depth_j:
                            continue
                        rule = _shareable(dag, i, j)
                        if rule is None:
                            continue
                        event = _share(dag, i, j, rule)
                        if event:
                            report.events.append(event)
                            changed = True
                            done = True
                            break
                    if done:
                        break
        if not changed:
            break
    dag.recompute_depths()
    report.nodes_after = len(dag)
    return report


# -- parent reduction ------------------------------------------------------------


def _reaches(dag: EsopDag, src: int, dst: int) -> bool:
    """True when dst is reachable from src through child edges."""
    if src == dst:
        return True
    stack = [src]
    seen = {src}
    while stack:
        for c in dag.nodes[stack.pop()].children:
            if c == dst:
                return True
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return False


def _binary_xor_parents(dag: EsopDag, a: int) -> list[tuple[int, int]]:
    """(xor node, partner child) pairs where the node is exactly a ^ b."""
    out = []
    for p in sorted(set(dag.nodes[a].parents)):
        node = dag.nodes[p]
        if node.kind == T_XOR and len(node.children) == 2:
            b = node.children[1] if node.children[0] == a else node.children[0]
            if b != a:
                out.append((p, b))
    return out


def reduce_parents(dag: EsopDag, leaf: int,
                   general_expansion: bool = False) -> MutationReport:
    """Cut the leaf's parent count by routing parents through an existing
    a^b node:  a = (a^b)^b  for xor parents,  a.b = ((a^b)b)^b  for the
    two-child and node over the same pair.

    Applies until the leaf's parent count stops shrinking; a no-op when no
    a^b node exists.
    """
    report = MutationReport("parent_reduction", nodes_before=len(dag))
    node = dag.nodes.get(leaf)
    if node is None or node.kind != T_ID:
        report.nodes_after = len(dag)
        return report
    while True:
        rewrote = False
        for e, b in _binary_xor_parents(dag, leaf):
            for q in sorted(set(dag.nodes[leaf].parents)):
                if q == e:
                    continue
                qn = dag.nodes[q]
                if qn.kind == T_XOR:
                    if _reaches(dag, e, q):
                        continue  # routing through e would close a cycle
                    dag.xor_splice(q, leaf, [e, b])
                    surv = dag.normalize_node(q)
                    report.events.append(
                        f"xor expansion at #{q}" + ("" if surv == q else f" -> #{surv}"))
                    rewrote = True
                    break
                if qn.kind == T_AND and len(qn.children) == 2 \
                        and set(qn.children) == {leaf, b}:
                    if any(_reaches(dag, e, p)
                           for p in set(dag.nodes[q].parents)):
                        continue
                    _apply_product_expansion(dag, q, e, b)
                    report.events.append(f"and expansion at #{q}")
                    rewrote = True
                    break
            if rewrote:
                break
        if general_expansion and not rewrote:
            rewrote = _general_expansion_step(dag, leaf, report)
        if not rewrote:
            break
    dag.recompute_depths()
    report.nodes_after = len(dag)
    return report


def _apply_product_expansion(dag: EsopDag, q: int, e: int, b: int):
    """Replace and(a, b) by ((a^b) . b) ^ b everywhere q is referenced."""
    a2 = dag.get_or_create(T_AND, [e, b])
    v = None
    for p in sorted(set(dag.nodes[q].parents)):
        if p not in dag.nodes:
            continue
        pn = dag.nodes[p]
        if pn.kind == T_XOR:
            dag.xor_splice(p, q, [a2, b])
            dag.normalize_node(p)
        else:
            if v is None:
                v = dag.get_or_create(T_XOR, [a2, b])
            dag.set_children(p, [v if c == q else c for c in pn.children])
    if v is not None:
        dag.output_order = [
            (name, v if nid == q else nid) for name, nid in dag.output_order
        ]
    if q in dag.nodes and not dag.nodes[q].parents:
        dag._delete(q)


def _general_expansion_step(dag: EsopDag, leaf: int, report: MutationReport) -> bool:
    """a(b ^ x) ^ x  =  a(a ^ b ^ x) ^ (a ^ x): applied only when both the
    a^b^x and the a^x nodes already exist (otherwise it just grows the graph)."""
    a = leaf
    for q in sorted(set(dag.nodes[a].parents)):
        qn = dag.nodes[q]
        if qn.kind != T_AND or len(qn.children) != 2 or a not in qn.children:
            continue
        other = qn.children[1] if qn.children[0] == a else qn.children[0]
        on = dag.nodes.get(other)
        if on is None or on.kind != T_XOR or len(on.children) != 2:
            continue
        b, x = on.children
        for bb, xx in ((b, x), (x, b)):
            e2 = _find_with_children(dag, T_XOR, {a, bb, xx})
            ex = _find_with_children(dag, T_XOR, {a, xx})
            if e2 is None or ex is None:
                continue
            for p in sorted(set(dag.nodes[q].parents)):
                pn = dag.nodes[p]
                if pn.kind != T_XOR or xx not in pn.children:
                    continue
                if _reaches(dag, e2, p) or _reaches(dag, ex, p):
                    continue
                a2 = dag.get_or_create(T_AND, [a, e2])
                dag.xor_splice(p, q, [a2])
                dag.xor_splice(p, xx, [ex])
                dag.normalize_node(p)
                report.events.append(f"general expansion at #{p}")
                return True
    return False


def parent_reduction_pass(dag: EsopDag, general_expansion: bool = False) -> MutationReport:
    """One mapping-iteration's worth of parent reduction.

    Candidates are the minimum-parent leaves that a single rewrite turns
    into single-parent leaves (exactly two non-root parents), tried in
    line order; the first that admits a reduction is reduced and the pass
    stops until the next mapping iteration.
    """
    candidates = []
    for nid, node in sorted(dag.nodes.items()):
        if node.kind != T_ID:
            continue
        count = sum(1 for p in node.parents if dag.nodes[p].kind != T_ROOT)
        if count == 2:
            candidates.append((node.line if node.line is not None else nid, nid))
    candidates.sort()
    for _line, nid in candidates:
        report = reduce_parents(dag, nid, general_expansion)
        if report:
            return report
    return MutationReport("parent_reduction",
                          nodes_before=len(dag), nodes_after=len(dag))
