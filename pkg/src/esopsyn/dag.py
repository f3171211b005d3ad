"""N-ary and-xor DAG: the intermediate representation the whole flow runs on.

Five node kinds: t_root (collects the per-output top nodes), t_xor, t_and,
t_identifier (a variable, or a circuit line once mapping starts) and
t_constant.  Structural sharing is by hash-consing: one identifier node
per variable, identical subterms reuse one node.  Depth labels are
recomputed as longest-path-from-root after every mutation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .funcs import EsopExpression

T_CONST = "t_constant"
T_ID = "t_identifier"
T_ROOT = "t_root"
T_AND = "t_and"
T_XOR = "t_xor"

LEAF_KINDS = (T_CONST, T_ID)


# Factored forms accepted by the builder.  A cube mask plus optional
# subtrees under an AND, and an XOR of parts; a bare cube is the leaf.

@dataclass(frozen=True)
class FCube:
    mask: int


@dataclass(frozen=True)
class FAnd:
    cube_mask: int
    subs: tuple


@dataclass(frozen=True)
class FXor:
    parts: tuple


class DagNode:
    __slots__ = ("id", "kind", "children", "parents", "depth", "label", "line")

    def __init__(self, nid: int, kind: str, children=(), label=None, line=None):
        self.id = nid
        self.kind = kind
        self.children: list[int] = list(children)
        self.parents: list[int] = []
        self.depth = 0
        self.label = label
        self.line = line

    def is_leaf(self) -> bool:
        return self.kind in LEAF_KINDS

    def __repr__(self):
        return f"<{self.kind} #{self.id} {self.label if self.label is not None else ''}>"


class EsopDag:
    def __init__(self, n_vars: int):
        self.n_vars = n_vars
        self.nodes: dict[int, DagNode] = {}
        self._next = 0
        self._cons: dict[tuple, int] = {}
        self.root = self._fresh(T_ROOT)
        self.output_order: list[tuple[str, int]] = []

    # -- construction ------------------------------------------------------

    def _fresh(self, kind, children=(), label=None, line=None) -> int:
        nid = self._next
        self._next += 1
        node = DagNode(nid, kind, children, label, line)
        self.nodes[nid] = node
        for c in children:
            self.nodes[c].parents.append(nid)
        self._cons[self._key(node)] = nid
        return nid

    @staticmethod
    def _node_key(kind, children, label) -> tuple:
        return (kind, tuple(children), label)

    def _key(self, node: DagNode) -> tuple:
        return (node.kind, tuple(node.children), node.label)

    def get_or_create(self, kind, children=(), label=None, line=None) -> int:
        key = self._node_key(kind, children, label)
        nid = self._cons.get(key)
        if nid is not None and nid in self.nodes:
            return nid
        return self._fresh(kind, children, label, line)

    def var_node(self, index: int) -> int:
        return self.get_or_create(T_ID, label=f"x{index + 1}", line=index)

    def const_node(self, value: int) -> int:
        return self.get_or_create(T_CONST, label=value)

    # -- mutation (all child-list edits go through here) --------------------

    def set_children(self, nid: int, new_children: list[int]):
        node = self.nodes[nid]
        old_key = self._key(node)
        if self._cons.get(old_key) == nid:
            del self._cons[old_key]
        for c in node.children:
            self.nodes[c].parents.remove(nid)
        node.children = list(new_children)
        for c in node.children:
            self.nodes[c].parents.append(nid)
        self._cons.setdefault(self._key(node), nid)

    def xor_splice(self, nid: int, remove: int | None, add: list[int]):
        """Edit an xor node's child set with GF(2) cancellation."""
        node = self.nodes[nid]
        assert node.kind == T_XOR
        cur = list(node.children)
        if remove is not None:
            cur.remove(remove)
        for a in add:
            if a in cur:
                cur.remove(a)
            else:
                cur.append(a)
        self.set_children(nid, cur)

    def to_identifier(self, nid: int, line_id: int, label: str):
        """Collapse a mapped node into an identifier for a circuit line."""
        node = self.nodes[nid]
        self.set_children(nid, [])
        old_key = self._key(node)
        if self._cons.get(old_key) == nid:
            del self._cons[old_key]
        node.kind = T_ID
        node.label = label
        node.line = line_id
        self._cons.setdefault(self._key(node), nid)

    def merge_nodes(self, keep: int, drop: int):
        """Redirect every reference to `drop` onto `keep` and delete it."""
        assert keep != drop
        drop_node = self.nodes[drop]
        for p in list(drop_node.parents):
            parent = self.nodes[p]
            if parent.kind == T_XOR and keep in parent.children:
                # duplicate children of an xor cancel
                self.xor_splice(p, drop, [keep])
            else:
                kids = [keep if c == drop else c for c in parent.children]
                if parent.kind in (T_AND, T_ROOT):
                    seen, dedup = set(), []
                    for c in kids:
                        if c not in seen:
                            seen.add(c)
                            dedup.append(c)
                    kids = dedup
                self.set_children(p, kids)
        self.output_order = [
            (name, keep if nid == drop else nid) for name, nid in self.output_order
        ]
        self._delete(drop)

    def _delete(self, nid: int):
        node = self.nodes[nid]
        assert not node.parents, f"deleting referenced node {nid}"
        key = self._key(node)
        if self._cons.get(key) == nid:
            del self._cons[key]
        for c in node.children:
            self.nodes[c].parents.remove(nid)
        del self.nodes[nid]

    def normalize_node(self, nid: int) -> int:
        """Resolve degenerate arity after a rewrite; returns the surviving id."""
        node = self.nodes.get(nid)
        if node is None or node.kind not in (T_AND, T_XOR):
            return nid
        if len(node.children) == 1:
            child = node.children[0]
            self.merge_nodes(child, nid)
            return child
        if not node.children:
            const = self.const_node(0)
            self.merge_nodes(const, nid)
            return const
        return nid

    # -- depth / pruning -----------------------------------------------------

    def recompute_depths(self, prune: bool = True):
        reach = {self.root}
        stack = [self.root]
        while stack:
            for c in self.nodes[stack.pop()].children:
                if c not in reach:
                    reach.add(c)
                    stack.append(c)
        if prune:
            dead = [i for i in self.nodes if i not in reach]
            for nid in dead:
                node = self.nodes.pop(nid)
                key = self._key(node)
                if self._cons.get(key) == nid:
                    del self._cons[key]
                for c in node.children:
                    if c in self.nodes:
                        self.nodes[c].parents.remove(nid)
        indeg = {nid: sum(1 for p in self.nodes[nid].parents if p in reach)
                 for nid in reach}
        for nid in reach:
            self.nodes[nid].depth = 0
        queue = [self.root]
        while queue:
            u = queue.pop()
            un = self.nodes[u]
            for c in un.children:
                cn = self.nodes[c]
                if un.depth + 1 > cn.depth:
                    cn.depth = un.depth + 1
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)

    def depth_max(self) -> int:
        return max(n.depth for n in self.nodes.values())

    def internal_ids(self) -> list[int]:
        return sorted(
            nid for nid, n in self.nodes.items()
            if n.kind in (T_AND, T_XOR)
        )

    def merge_duplicates(self):
        """Re-establish structural sharing after rewrites."""
        changed = True
        while changed:
            changed = False
            index: dict[tuple, int] = {}
            for nid in sorted(self.nodes):
                node = self.nodes[nid]
                if node.kind == T_ROOT:
                    continue
                key = (node.kind, tuple(sorted(node.children)), node.label)
                other = index.get(key)
                if other is None:
                    index[key] = nid
                else:
                    self.merge_nodes(other, nid)
                    changed = True
                    break

    # -- semantics ----------------------------------------------------------

    def expand(self, nid: int, resolver=None, _memo=None) -> frozenset[int]:
        """Cube-mask set computed by structural GF(2) expansion.

        `resolver(line_id) -> frozenset[int]` supplies the function carried
        by a circuit line for identifiers created during mapping.
        """
        if _memo is None:
            _memo = {}
        hit = _memo.get(nid)
        if hit is not None:
            return hit
        node = self.nodes[nid]
        if node.kind == T_CONST:
            out = frozenset([0]) if node.label else frozenset()
        elif node.kind == T_ID:
            if node.line is not None and node.label == f"x{node.line + 1}":
                out = frozenset([1 << node.line])
            else:
                # "@<line>" identifiers stand for a circuit line mid-mapping
                if resolver is None:
                    raise ValueError(f"no resolver for line identifier {node.label}")
                out = frozenset(resolver(node.line))
        elif node.kind == T_XOR:
            acc: set[int] = set()
            for c in node.children:
                acc ^= self.expand(c, resolver, _memo)
            out = frozenset(acc)
        elif node.kind == T_AND:
            acc = {0}
            for c in node.children:
                child = self.expand(c, resolver, _memo)
                nxt: set[int] = set()
                for a in acc:
                    for b in child:
                        m = a | b
                        if m in nxt:
                            nxt.remove(m)
                        else:
                            nxt.add(m)
                acc = nxt
            out = frozenset(acc)
        else:
            raise ValueError(f"cannot expand {node.kind}")
        _memo[nid] = out
        return out

    def __len__(self) -> int:
        return len(self.nodes)


# -- building ----------------------------------------------------------------


def build_dag(exprs: list[EsopExpression], max_and_arity: int,
              output_names=None) -> EsopDag:
    """Turn per-output expressions into the shared and-xor graph.

    max_and_arity is the Toffoli-size knob T: any product wider than T-1
    literals is decomposed into a chain of T-1-ary and nodes, so every
    eventual Toffoli spans at most T lines.
    """
    trees = [FXor(tuple(FCube(m) for m in e.sorted_masks())) for e in exprs]
    n_vars = exprs[0].n_vars if exprs else 0
    return build_dag_from_trees(trees, n_vars, max_and_arity, output_names)


def build_dag_from_trees(trees, n_vars: int, max_and_arity: int,
                         output_names=None) -> EsopDag:
    if max_and_arity < 2:
        raise ValueError(f"Toffoli size bound must be >= 2, got {max_and_arity}")
    if not trees:
        raise ValueError("no output expressions")
    if output_names is None:
        output_names = [f"y{i + 1}" for i in range(len(trees))]
    # A 2-line library cannot compute a product, so the effective and-arity
    # floor is 2 even when T = 2.
    arity = max(2, max_and_arity - 1)
    dag = EsopDag(n_vars)
    tops = []
    for tree in trees:
        # wire each top into the root right away so later builds cannot
        # flatten it away as an unreferenced xor
        top = _node_of_tree(dag, tree, arity)
        tops.append(top)
        if top not in dag.nodes[dag.root].children:
            dag.set_children(dag.root, dag.nodes[dag.root].children + [top])
    dag.output_order = list(zip(output_names, tops))
    dag.recompute_depths()
    return dag


def _node_of_tree(dag: EsopDag, tree, arity: int) -> int:
    if isinstance(tree, FCube):
        return _node_of_cube(dag, tree.mask, arity)
    if isinstance(tree, FAnd):
        kids = [dag.var_node(i) for i in _bits(tree.cube_mask)]
        kids += [_node_of_tree(dag, s, arity) for s in tree.subs]
        return _and_chain(dag, kids, arity)
    if isinstance(tree, FXor):
        parity: dict[int, int] = {}
        order: list[int] = []
        for part in tree.parts:
            nid = _node_of_tree(dag, part, arity)
            for k in _xor_flatten(dag, nid):
                if k not in parity:
                    parity[k] = 0
                    order.append(k)
                parity[k] ^= 1
        kids = [k for k in order if parity[k]]
        if not kids:
            return dag.const_node(0)
        if len(kids) == 1:
            return kids[0]
        return dag.get_or_create(T_XOR, kids)
    raise TypeError(f"unexpected tree part {tree!r}")


def _xor_flatten(dag: EsopDag, nid: int):
    """Xor directly under xor is always flattened (GF(2) associativity)."""
    node = dag.nodes[nid]
    if node.kind == T_XOR and not node.parents:
        kids = list(node.children)
        dag._delete(nid)
        return kids
    return [nid]


def _node_of_cube(dag: EsopDag, mask: int, arity: int) -> int:
    deg = mask.bit_count()
    if deg == 0:
        return dag.const_node(1)
    if deg == 1:
        return dag.var_node(mask.bit_length() - 1)
    kids = [dag.var_node(i) for i in _bits(mask)]
    return _and_chain(dag, kids, arity)


def _and_chain(dag: EsopDag, kids: list[int], arity: int) -> int:
    """Left-associative chain keeping every and node within the arity bound."""
    dedup = []
    for k in kids:
        if k not in dedup:
            dedup.append(k)
    kids = dedup
    if len(kids) == 1:
        return kids[0]
    if len(kids) <= arity:
        return dag.get_or_create(T_AND, kids)
    tail = _and_chain(dag, kids[arity - 1:], arity)
    return dag.get_or_create(T_AND, kids[:arity - 1] + [tail])


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- read-back / validation ----------------------------------------------------


def dag_to_expressions(dag: EsopDag, resolver=None) -> list[EsopExpression]:
    """Flatten each output subgraph over GF(2); the verification read-back."""
    problems = validate_dag(dag)
    if problems:
        raise ValueError("malformed graph: " + "; ".join(problems))
    memo: dict[int, frozenset[int]] = {}
    out = []
    for _name, nid in dag.output_order:
        out.append(EsopExpression.from_masks(
            dag.n_vars, dag.expand(nid, resolver, memo)))
    return out


def validate_dag(dag: EsopDag) -> list[str]:
    issues = []
    roots = [nid for nid, n in dag.nodes.items() if n.kind == T_ROOT]
    if roots != [dag.root]:
        issues.append(f"expected exactly one root ({dag.root}), found {roots}")
    seen_labels: dict = {}
    for nid in sorted(dag.nodes):
        node = dag.nodes[nid]
        for c in node.children:
            if c not in dag.nodes:
                issues.append(f"node {nid} has dangling child {c}")
            elif nid not in dag.nodes[c].parents:
                issues.append(f"edge {nid}->{c} missing from child's parent list")
        for p in node.parents:
            if p not in dag.nodes:
                issues.append(f"node {nid} has dangling parent {p}")
            elif nid not in dag.nodes[p].children:
                issues.append(f"parent list of {nid} names {p}, which lacks the edge")
        if node.is_leaf() and node.children:
            issues.append(f"leaf node {nid} has children")
        if node.kind in (T_AND, T_XOR) and len(node.children) < 2:
            issues.append(f"{node.kind} node {nid} has arity {len(node.children)}")
        if node.kind == T_ID:
            if node.label in seen_labels:
                issues.append(f"duplicate identifier {node.label!r}")
            seen_labels[node.label] = nid
    # acyclicity via iterative DFS with colors
    WHITE, GREY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in dag.nodes}
    for start in sorted(dag.nodes):
        if color[start] != WHITE:
            continue
        stack = [(start, iter(dag.nodes[start].children))]
        color[start] = GREY
        while stack:
            nid, it = stack[-1]
            adv = next(it, None)
            if adv is None:
                color[nid] = BLACK
                stack.pop()
            elif adv in dag.nodes:
                if color[adv] == GREY:
                    issues.append(f"cycle through node {adv}")
                    color[adv] = BLACK
                elif color[adv] == WHITE:
                    color[adv] = GREY
                    stack.append((adv, iter(dag.nodes[adv].children)))
    for nid, n in dag.nodes.items():
        for c in n.children:
            if c in dag.nodes and dag.nodes[c].depth <= n.depth:
                issues.append(f"depth of {c} not below its parent {nid}")
                break
    return issues


# -- debug dumps ----------------------------------------------------------------


def _node_tag(node: DagNode) -> str:
    if node.kind == T_CONST:
        return f"const{node.label}_{node.depth}"
    if node.kind == T_ID:
        return f"{node.label}_{node.depth}"
    base = {T_ROOT: "root", T_AND: "and", T_XOR: "xor"}[node.kind]
    return f"{base}{node.id}_{node.depth}"


def dump_text(dag: EsopDag) -> str:
    lines = [f"dag n_vars={dag.n_vars} nodes={len(dag.nodes)}"]
    for name, nid in dag.output_order:
        lines.append(f"output {name} -> #{nid}")
    for nid in sorted(dag.nodes):
        node = dag.nodes[nid]
        kids = " ".join(_node_tag(dag.nodes[c]) for c in node.children)
        lines.append(f"#{nid} {_node_tag(node)}" + (f" [{kids}]" if kids else ""))
    return "\n".join(lines) + "\n"


def dump_dot(dag: EsopDag) -> str:
    out = ["digraph esop {"]
    shapes = {T_ROOT: "doublecircle", T_XOR: "ellipse", T_AND: "box",
              T_ID: "plaintext", T_CONST: "plaintext"}
    for nid in sorted(dag.nodes):
        node = dag.nodes[nid]
        out.append(f'  n{nid} [label="{_node_tag(node)}" shape={shapes[node.kind]}];')
    for nid in sorted(dag.nodes):
        for c in dag.nodes[nid].children:
            out.append(f"  n{nid} -> n{c};")
    out.append("}")
    return "\n".join(out) + "\n"
