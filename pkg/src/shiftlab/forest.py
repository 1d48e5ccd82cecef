"""Finite directed forests given by a total parent map.

A forest is a nonempty vertex set with a parent function whose only cycles
are fixed points; fixed points are the roots.  All iteration and
serialization follow the sorted order of the string vertex ids, so results
are deterministic.
"""
from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import (
    CycleError,
    DanglingParentError,
    EmptyFamily,
    EmptyForestError,
    NotATree,
    NotRootedTree,
    UnknownVertex,
    VertexCollision,
)

VertexId = str


class DirectedForest:
    """Immutable finite directed forest (vertices + total parent map)."""

    __slots__ = ("vertices", "parent", "roots", "_children")

    def __init__(self, vertices: Iterable[VertexId], parent: Mapping[VertexId, VertexId]):
        verts = tuple(sorted(set(map(str, vertices))))
        if not verts:
            raise EmptyForestError("a forest needs at least one vertex")
        vset = set(verts)
        pmap: dict[VertexId, VertexId] = {}
        for v in verts:
            if v not in parent:
                raise DanglingParentError(f"no parent assigned to {v!r}")
            p = str(parent[v])
            if p not in vset:
                raise DanglingParentError(f"parent of {v!r} is {p!r}, outside the vertex set")
            pmap[v] = p
        _check_acyclic(verts, pmap)
        children: dict[VertexId, list[VertexId]] = {v: [] for v in verts}
        for v in verts:
            p = pmap[v]
            if p != v:
                children[p].append(v)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "parent", pmap)
        object.__setattr__(self, "roots", tuple(v for v in verts if pmap[v] == v))
        object.__setattr__(self, "_children", {v: tuple(sorted(c)) for v, c in children.items()})

    def __setattr__(self, name, value):
        raise AttributeError("DirectedForest is immutable")

    def __eq__(self, other):
        if not isinstance(other, DirectedForest):
            return NotImplemented
        return self.vertices == other.vertices and self.parent == other.parent

    def __hash__(self):
        return hash((self.vertices, tuple(sorted(self.parent.items()))))

    def __repr__(self):
        return f"DirectedForest({len(self.vertices)} vertices, {len(self.roots)} roots)"

    def __contains__(self, v) -> bool:
        return v in self.parent

    def require(self, v: VertexId) -> VertexId:
        if v not in self.parent:
            raise UnknownVertex(f"unknown vertex {v!r}")
        return v

    def parent_of(self, v: VertexId) -> VertexId:
        return self.parent[self.require(v)]

    def is_root(self, v: VertexId) -> bool:
        return self.parent[self.require(v)] == v

    def children_of(self, v: VertexId) -> tuple[VertexId, ...]:
        return self._children[self.require(v)]

    def is_leaf(self, v: VertexId) -> bool:
        """Leaves are childless non-roots; a childless root is not a leaf."""
        return not self._children[self.require(v)] and not self.is_root(v)

    def leaves(self) -> tuple[VertexId, ...]:
        return tuple(v for v in self.vertices if self.is_leaf(v))

    def is_leafless(self) -> bool:
        return not self.leaves()

    def depth_of(self, v: VertexId) -> int:
        self.require(v)
        d = 0
        while self.parent[v] != v:
            v = self.parent[v]
            d += 1
        return d

    def ancestor(self, v: VertexId, n: int) -> VertexId:
        """n-fold parent; stabilizes at the root."""
        self.require(v)
        for _ in range(n):
            v = self.parent[v]
        return v


def _check_acyclic(vertices: Sequence[VertexId], parent: Mapping[VertexId, VertexId]) -> None:
    # pointer chasing with three-state marks; a nontrivial cycle is any
    # closed parent orbit longer than a self-loop
    state: dict[VertexId, int] = {}  # 1 = on current path, 2 = done
    for start in vertices:
        if state.get(start):
            continue
        path = []
        v = start
        while True:
            mark = state.get(v)
            if mark == 2:
                break
            if mark == 1:
                cycle = path[path.index(v):]
                if len(cycle) > 1:
                    raise CycleError(cycle)
                break
            state[v] = 1
            path.append(v)
            p = parent[v]
            if p == v:
                break
            v = p
        for u in path:
            state[u] = 2


def validate_forest(vertices: Iterable[VertexId], parent: Mapping[VertexId, VertexId]) -> DirectedForest:
    """Build a forest from raw data, rejecting cycles and dangling parents."""
    return DirectedForest(vertices, parent)


def roots(f: DirectedForest) -> tuple[VertexId, ...]:
    return f.roots


def children(f: DirectedForest, v: VertexId) -> tuple[VertexId, ...]:
    return f.children_of(v)


def chi_k(f: DirectedForest, v: VertexId, k: int) -> tuple[VertexId, ...]:
    """k-th children of v, computed by peeling one generation at a time."""
    f.require(v)
    if k < 0:
        raise ValueError("k must be nonnegative")
    level = [v]
    for _ in range(k):
        level = [u for w in level for u in f.children_of(w)]
    return tuple(sorted(level)) if k else (v,)


def descendants(f: DirectedForest, v: VertexId) -> tuple[VertexId, ...]:
    f.require(v)
    seen = {v}
    stack = [v]
    while stack:
        for u in f.children_of(stack.pop()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return tuple(sorted(seen))


def des_subtree(f: DirectedForest, v: VertexId) -> DirectedForest:
    """Rooted subtree on the descendants of v, with v turned into a root."""
    keep = set(descendants(f, v))
    parent = {u: (f.parent[u] if f.parent[u] in keep and u != v else u) for u in keep}
    return DirectedForest(keep, parent)


def components(f: DirectedForest) -> list[DirectedForest]:
    """Split into trees: the classes of the relation generated by the parent map."""
    label: dict[VertexId, VertexId] = {}
    for v in f.vertices:
        chain = []
        u = v
        while u not in label and f.parent[u] != u:
            chain.append(u)
            u = f.parent[u]
        rep = label.get(u, u)
        label[u] = rep
        for w in chain:
            label[w] = rep
    groups: dict[VertexId, list[VertexId]] = {}
    for v in f.vertices:
        groups.setdefault(label[v], []).append(v)
    out = []
    for rep in sorted(groups):
        verts = groups[rep]
        out.append(DirectedForest(verts, {u: f.parent[u] for u in verts}))
    return out


def _merge(forests: Sequence[DirectedForest], auto_prefix: bool) -> tuple[list[VertexId], dict[VertexId, VertexId], list[list[VertexId]]]:
    verts: list[VertexId] = []
    parent: dict[VertexId, VertexId] = {}
    renamed_roots: list[list[VertexId]] = []
    seen: set[VertexId] = set()
    for i, g in enumerate(forests):
        ren = (lambda v, i=i: f"{i}:{v}") if auto_prefix else (lambda v: v)
        for v in g.vertices:
            nv = ren(v)
            if nv in seen:
                raise VertexCollision(f"duplicate vertex id {nv!r}; pass auto_prefix=True")
            seen.add(nv)
            verts.append(nv)
            parent[nv] = ren(g.parent[v])
        renamed_roots.append([ren(r) for r in g.roots])
    return verts, parent, renamed_roots


def direct_sum(forests: Sequence[DirectedForest], auto_prefix: bool = False) -> DirectedForest:
    """Disjoint union of forests; ids must not collide unless auto_prefix."""
    if not forests:
        raise EmptyFamily("direct_sum needs a nonempty family")
    verts, parent, _ = _merge(forests, auto_prefix)
    return DirectedForest(verts, parent)


def _fresh_id(base: VertexId, taken: set[VertexId]) -> VertexId:
    while base in taken:
        base = "_" + base
    return base


def rooted_sum(trees: Sequence[DirectedForest], auto_prefix: bool = False) -> DirectedForest:
    """Join rooted trees under one fresh root; the empty family gives a single vertex."""
    for i, t in enumerate(trees):
        if len(t.roots) != 1 or len(components(t)) != 1:
            raise NotRootedTree(f"input {i} is not a rooted tree")
    if not trees:
        return DirectedForest(["root"], {"root": "root"})
    verts, parent, renamed_roots = _merge(trees, auto_prefix)
    new_root = _fresh_id("root", set(verts))
    verts.append(new_root)
    parent[new_root] = new_root
    for (old_root,) in renamed_roots:
        parent[old_root] = new_root
    return DirectedForest(verts, parent)


def backward_extension_chain(k: int, taken: Iterable[VertexId]) -> list[VertexId]:
    """Fresh ids for a k-step extension chain, shallowest first."""
    used = set(taken)
    out = []
    for j in range(1, k + 1):
        nid = _fresh_id(f"ext{j}", used)
        used.add(nid)
        out.append(nid)
    return out


def backward_extend_tree(t: DirectedForest, k: int) -> DirectedForest:
    """Prepend a chain of k fresh vertices above the root; k=0 is the identity."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if len(t.roots) != 1 or len(components(t)) != 1:
        raise NotRootedTree("backward extension needs a rooted tree")
    if k == 0:
        return t
    chain = backward_extension_chain(k, t.vertices)
    verts = list(t.vertices) + chain
    parent = dict(t.parent)
    parent[t.roots[0]] = chain[0]
    for j in range(k - 1):
        parent[chain[j]] = chain[j + 1]
    parent[chain[-1]] = chain[-1]
    return DirectedForest(verts, parent)


def power_k(f: DirectedForest, k: int) -> DirectedForest:
    """Forest on the same vertices whose children are the k-th children."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return f
    rootset = set(f.roots)
    parent: dict[VertexId, VertexId] = {}
    for v in f.vertices:
        if f.ancestor(v, k - 1) in rootset:
            parent[v] = v
        else:
            parent[v] = f.ancestor(v, k)
    out = DirectedForest(f.vertices, parent)
    expected_roots = set()
    for r in f.roots:
        for j in range(k):
            expected_roots.update(chi_k(f, r, j))
    if set(out.roots) != expected_roots:
        raise AssertionError("power roots disagree with the child-set formula")
    return out


def canonical_form(f: DirectedForest) -> str:
    """Canonical string: isomorphic forests (and only those) get equal forms."""

    def canon(v: VertexId) -> str:
        return "(" + "".join(sorted(canon(u) for u in f.children_of(v))) + ")"

    return "|".join(sorted(canon(r) for r in f.roots))


def is_isomorphic(f1: DirectedForest, f2: DirectedForest) -> bool:
    return canonical_form(f1) == canonical_form(f2)


class ForestKind:
    """Shape classes used by the all-powers shortcut."""

    N_ARM_STAR = "n-arm-star"
    LINEAR_SEGMENT = "linear-segment"
    NOT_FORKLESS = "not-forkless"
    DEGENERATE_TREE = "degenerate-tree"


class ForestClassification:
    __slots__ = ("kind", "arms")

    def __init__(self, kind: str, arms: int | None = None):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "arms", arms)

    def __setattr__(self, name, value):
        raise AttributeError("ForestClassification is immutable")

    def __eq__(self, other):
        if not isinstance(other, ForestClassification):
            return NotImplemented
        return self.kind == other.kind and self.arms == other.arms

    def __repr__(self):
        if self.kind == ForestKind.N_ARM_STAR:
            return f"ForestClassification({self.kind}, arms={self.arms})"
        return f"ForestClassification({self.kind})"


def classify_forkless(f: DirectedForest, tailed_leaves: Iterable[VertexId] = ()) -> ForestClassification:
    """Classify a single tree; tailed leaves count as continuing arms.

    Non-root vertices must each continue in exactly one way for the tree to
    be forkless; a star is a forkless rooted tree whose every arm continues
    forever (each end tailed).
    """
    if len(components(f)) != 1:
        raise NotATree("classification needs a single tree")
    tails = {f.require(v) for v in tailed_leaves}
    root = f.roots[0]

    def degree(v: VertexId) -> int:
        return len(f.children_of(v)) + (1 if v in tails else 0)

    for v in f.vertices:
        if v != root and degree(v) >= 2:
            return ForestClassification(ForestKind.NOT_FORKLESS)
    dead_ends = [v for v in f.vertices if v != root and degree(v) == 0]
    if dead_ends:
        return ForestClassification(ForestKind.LINEAR_SEGMENT)
    return ForestClassification(ForestKind.N_ARM_STAR, arms=degree(root))
