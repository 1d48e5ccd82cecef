"""Weighted shifts on tailed forests.

Weights are stored squared, as exact nonnegative rationals; roots carry
weight zero.  Infinite unary continuations of core leaves are encoded by
tail profiles (a finite squared-weight prefix followed by a constant), and
tail positions are addressed as ``(leaf, depth)`` pairs without ever being
materialized.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import HasLeaf, NotProper, UnknownVertex
from .forest import DirectedForest, VertexId, components, des_subtree, power_k
from .measures import AtomicMeasure, mixture
from .rationals import GaussianRational, RatioLike, parse_ratio, rational_sqrt

ExtVertex = Union[VertexId, tuple[VertexId, int]]


class TailProfile:
    """Squared weights of an infinite unary continuation below a core leaf."""

    __slots__ = ("prefix_sq", "constant_sq")

    def __init__(self, prefix_sq: Iterable[RatioLike] = (), constant_sq: RatioLike = 1):
        prefix = tuple(parse_ratio(x) for x in prefix_sq)
        const = parse_ratio(constant_sq)
        if any(x <= 0 for x in prefix) or const <= 0:
            raise ValueError("tail squared weights must be positive")
        object.__setattr__(self, "prefix_sq", prefix)
        object.__setattr__(self, "constant_sq", const)

    def __setattr__(self, name, value):
        raise AttributeError("TailProfile is immutable")

    def __eq__(self, other):
        if not isinstance(other, TailProfile):
            return NotImplemented
        return self.prefix_sq == other.prefix_sq and self.constant_sq == other.constant_sq

    def __hash__(self):
        return hash((self.prefix_sq, self.constant_sq))

    def __repr__(self):
        return f"TailProfile({list(self.prefix_sq)}, {self.constant_sq})"

    def sq_at(self, depth: int) -> Fraction:
        """Squared weight of the tail edge at 1-based depth."""
        if depth < 1:
            raise ValueError("tail depth starts at 1")
        if depth <= len(self.prefix_sq):
            return self.prefix_sq[depth - 1]
        return self.constant_sq

    def product(self, start: int, count: int) -> Fraction:
        """Product of ``count`` consecutive squared weights from 1-based ``start``."""
        out = Fraction(1)
        for d in range(start, start + count):
            out *= self.sq_at(d)
        return out


class WeightedShift:
    """A forest, squared weights and tail profiles, frozen after validation."""

    __slots__ = ("forest", "sq", "tails", "allow_leaves", "_moments", "_measure_state")

    def __init__(
        self,
        forest: DirectedForest,
        sq: Mapping[VertexId, RatioLike],
        tails: Mapping[VertexId, TailProfile] | None = None,
        allow_leaves: bool = False,
    ):
        tails = dict(tails or {})
        weights: dict[VertexId, Fraction] = {}
        for v in forest.vertices:
            if v not in sq:
                raise ValueError(f"missing squared weight for {v!r}")
            w = parse_ratio(sq[v])
            if w < 0:
                raise ValueError(f"negative squared weight at {v!r}")
            if forest.is_root(v) and w != 0:
                raise ValueError(f"root {v!r} must have weight zero")
            weights[v] = w
        extra = set(sq) - set(forest.vertices)
        if extra:
            raise UnknownVertex(f"weights for unknown vertices {sorted(extra)}")
        for leaf, profile in tails.items():
            forest.require(leaf)
            if forest.children_of(leaf):
                raise ValueError(f"tail host {leaf!r} must be childless")
            if not isinstance(profile, TailProfile):
                raise TypeError("tails must map leaves to TailProfile")
        if not allow_leaves:
            bare = [v for v in forest.leaves() if v not in tails]
            if bare:
                raise HasLeaf(f"leaves without tails: {bare}; pass allow_leaves=True")
        object.__setattr__(self, "forest", forest)
        object.__setattr__(self, "sq", weights)
        object.__setattr__(self, "tails", tails)
        object.__setattr__(self, "allow_leaves", allow_leaves)
        object.__setattr__(self, "_moments", {})
        object.__setattr__(self, "_measure_state", None)

    def __setattr__(self, name, value):
        raise AttributeError("WeightedShift is immutable")

    def __repr__(self):
        return f"WeightedShift({len(self.forest.vertices)} core vertices, {len(self.tails)} tails)"

    # -- extended addressing ------------------------------------------------

    def is_core(self, v: ExtVertex) -> bool:
        return isinstance(v, str)

    def require_ext(self, v: ExtVertex) -> ExtVertex:
        if isinstance(v, str):
            self.forest.require(v)
            return v
        leaf, depth = v
        if leaf not in self.tails or depth < 1:
            raise UnknownVertex(f"no tail position {v!r}")
        return v

    def ext_parent(self, v: ExtVertex) -> ExtVertex:
        self.require_ext(v)
        if isinstance(v, str):
            return self.forest.parent[v]
        leaf, depth = v
        return leaf if depth == 1 else (leaf, depth - 1)

    def ext_ancestor(self, v: ExtVertex, n: int) -> ExtVertex:
        for _ in range(n):
            v = self.ext_parent(v)
        return v

    def ext_children(self, v: ExtVertex) -> list[ExtVertex]:
        self.require_ext(v)
        if isinstance(v, str):
            out: list[ExtVertex] = list(self.forest.children_of(v))
            if v in self.tails:
                out.append((v, 1))
            return out
        leaf, depth = v
        return [(leaf, depth + 1)]

    def ext_sq(self, v: ExtVertex) -> Fraction:
        self.require_ext(v)
        if isinstance(v, str):
            return self.sq[v]
        leaf, depth = v
        return self.tails[leaf].sq_at(depth)

    def is_ext_root(self, v: ExtVertex) -> bool:
        return isinstance(v, str) and self.forest.is_root(v)

    def child_sq_sum(self, v: ExtVertex) -> Fraction:
        return sum((self.ext_sq(u) for u in self.ext_children(v)), Fraction(0))

    def is_proper(self) -> bool:
        return all(self.sq[v] > 0 for v in self.forest.vertices if not self.forest.is_root(v))

    def is_leafless(self) -> bool:
        return all(v in self.tails for v in self.forest.leaves())

    def require_proper_leafless(self) -> None:
        if not self.is_proper():
            bad = [v for v in self.forest.vertices if not self.forest.is_root(v) and self.sq[v] == 0]
            raise NotProper(f"zero weights off the roots: {bad}")
        if not self.is_leafless():
            bare = [v for v in self.forest.leaves() if v not in self.tails]
            raise HasLeaf(f"leaves without tails: {bare}")

    # -- moments -------------------------------------------------------------

    def moment(self, v: ExtVertex, n: int) -> Fraction:
        """Squared norm of the n-th power applied to the basis vector at v."""
        self.require_ext(v)
        if n < 0:
            raise ValueError("moment order must be nonnegative")
        if not isinstance(v, str):
            leaf, depth = v
            return self.tails[leaf].product(depth + 1, n)
        key = (v, n)
        cached = self._moments.get(key)
        if cached is not None:
            return cached
        if n == 0:
            out = Fraction(1)
        else:
            out = Fraction(0)
            for u in self.forest.children_of(v):
                out += self.sq[u] * self.moment(u, n - 1)
            if v in self.tails:
                tail = self.tails[v]
                out += tail.sq_at(1) * tail.product(2, n - 1)
        self._moments[key] = out
        return out


def ext_key(v: ExtVertex) -> str:
    """Stable string form of an extended vertex, used in reports."""
    if isinstance(v, str):
        return v
    leaf, depth = v
    return f"{leaf}@{depth}"


def shift_norm_sq(s: WeightedShift) -> Fraction:
    """Squared operator norm: the supremum of the child squared-weight sums."""
    best = Fraction(0)
    for v in s.forest.vertices:
        best = max(best, s.child_sq_sum(v))
    for tail in s.tails.values():
        best = max(best, tail.constant_sq, *tail.prefix_sq[1:])
    return best


def _amplitude(s: WeightedShift, v: ExtVertex, mode: str):
    w = s.ext_sq(v)
    if mode == "float":
        return math.sqrt(float(w))
    r = rational_sqrt(w)
    if r is None:
        raise ValueError(
            f"squared weight {w} at {v!r} has no rational square root; use mode='float'"
        )
    return r


def apply(s: WeightedShift, f: Mapping[ExtVertex, object], mode: str = "exact") -> dict[ExtVertex, object]:
    """Apply the shift to a finitely supported vector: push values to children."""
    out: dict[ExtVertex, object] = {}
    for v, value in f.items():
        s.require_ext(v)
        for u in s.ext_children(v):
            amp = _amplitude(s, u, mode)
            out[u] = out.get(u, 0) + amp * value
    return {v: x for v, x in out.items() if x != 0}


def apply_adjoint(s: WeightedShift, f: Mapping[ExtVertex, object], mode: str = "exact") -> dict[ExtVertex, object]:
    """Apply the adjoint: pull values along the parent map with conjugate weights."""
    out: dict[ExtVertex, object] = {}
    for v, value in f.items():
        s.require_ext(v)
        if s.is_ext_root(v):
            continue
        amp = _amplitude(s, v, mode)
        amp = amp.conjugate() if isinstance(amp, complex) else amp
        p = s.ext_parent(v)
        out[p] = out.get(p, 0) + amp * value
    return {v: x for v, x in out.items() if x != 0}


def make_proper(s: WeightedShift) -> WeightedShift:
    """Cut every zero-weight non-root edge; the operator action is unchanged."""
    parent = dict(s.forest.parent)
    for v in s.forest.vertices:
        if s.sq[v] == 0:
            parent[v] = v
    forest = DirectedForest(s.forest.vertices, parent)
    return WeightedShift(forest, s.sq, s.tails, allow_leaves=True)


def _materialized_ids(s: WeightedShift, leaf: VertexId, upto: int) -> list[VertexId]:
    taken = set(s.forest.vertices)
    out = []
    for d in range(1, upto + 1):
        nid = f"{leaf}@{d}"
        while nid in taken:
            nid = "_" + nid
        taken.add(nid)
        out.append(nid)
    return out


def materialize_tails(s: WeightedShift, extra: int) -> WeightedShift:
    """Move the first ``prefix length + extra`` tail positions into the core.

    The result is the same operator on a relabeled index set; remaining
    tails are pure constants.
    """
    if extra < 0:
        raise ValueError("extra must be nonnegative")
    if not s.tails:
        return s
    verts = list(s.forest.vertices)
    parent = dict(s.forest.parent)
    sq: dict[VertexId, RatioLike] = dict(s.sq)
    tails: dict[VertexId, TailProfile] = {}
    for leaf in sorted(s.tails):
        tail = s.tails[leaf]
        upto = len(tail.prefix_sq) + extra
        ids = _materialized_ids(s, leaf, upto)
        prev = leaf
        for d, nid in enumerate(ids, start=1):
            verts.append(nid)
            parent[nid] = prev
            sq[nid] = tail.sq_at(d)
            prev = nid
        tails[prev] = TailProfile((), tail.constant_sq)
    forest = DirectedForest(verts, parent)
    return WeightedShift(forest, sq, tails, allow_leaves=s.allow_leaves)


def power_weights(s: WeightedShift, k: int) -> WeightedShift:
    """The k-th operator power as a shift on the k-th power of the forest.

    Tail prefixes are first materialized deep enough that every surviving
    tail of the power is a pure constant.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return s
    base = materialize_tails(s, k)
    f = base.forest
    pf = power_k(f, k)
    sq: dict[VertexId, Fraction] = {}
    for v in f.vertices:
        if pf.is_root(v):
            sq[v] = Fraction(0)
            continue
        prod = Fraction(1)
        u = v
        for _ in range(k):
            prod *= base.sq[u]
            u = f.parent[u]
        sq[v] = prod
    tails: dict[VertexId, TailProfile] = {}
    for leaf, tail in base.tails.items():
        # the k interleaved continuations of a constant tail are constant
        host = leaf
        chain = [leaf]
        for _ in range(k - 1):
            host = f.parent[host]
            chain.append(host)
        const = tail.constant_sq**k
        for v in chain:
            if not pf.children_of(v):
                tails[v] = TailProfile((), const)
    return WeightedShift(pf, sq, tails, allow_leaves=s.allow_leaves)


def restrict(s: WeightedShift, v: VertexId) -> WeightedShift:
    """Restriction to the invariant subspace spanned by the descendants of v."""
    sub = des_subtree(s.forest, v)
    sq = {u: (Fraction(0) if u == v else s.sq[u]) for u in sub.vertices}
    tails = {u: t for u, t in s.tails.items() if u in sub.parent}
    return WeightedShift(sub, sq, tails, allow_leaves=s.allow_leaves)


def make_isometric(f: DirectedForest) -> WeightedShift:
    """Equal-split weights making every basis vector norm one under all powers."""
    sq: dict[VertexId, Fraction] = {}
    for v in f.vertices:
        kids = f.children_of(v)
        for u in kids:
            sq[u] = Fraction(1, len(kids))
    for r in f.roots:
        sq[r] = Fraction(0)
    for v in f.vertices:
        sq.setdefault(v, Fraction(0))
    tails = {leaf: TailProfile((), 1) for leaf in f.leaves()}
    return WeightedShift(f, sq, tails)


# -- phase gauge --------------------------------------------------------------

Phase = Union[complex, GaussianRational]


def _as_gaussian(z) -> GaussianRational:
    if isinstance(z, GaussianRational):
        return z
    if isinstance(z, (int, Fraction)):
        return GaussianRational(z, 0)
    raise TypeError(f"expected exact complex weight, got {type(z).__name__}")


def phase_gauge(forest: DirectedForest, lam: Mapping[VertexId, object], mode: str = "exact") -> dict[VertexId, Phase]:
    """Unit phases conjugating complex weights to their absolute values.

    Starting from phase one at the smallest vertex of each component, phases
    propagate down edges (and up toward the root) so that
    ``beta_v * conj(beta_parent) * lambda_v = |lambda_v|`` wherever the
    weight is nonzero.  Exact mode needs every nonzero weight to have a
    rational modulus.
    """
    for v in forest.vertices:
        if v not in lam:
            raise ValueError(f"missing weight for {v!r}")
        if forest.is_root(v):
            z = lam[v]
            nonzero = (not z.is_zero()) if isinstance(z, GaussianRational) else z != 0
            if nonzero:
                raise ValueError(f"root {v!r} must carry weight zero")

    exact = mode == "exact"

    def phase_step(z) -> Phase:
        # |z| / z for nonzero z, as a unit factor multiplying the parent phase
        if exact:
            g = _as_gaussian(z)
            if g.is_zero():
                return GaussianRational(1, 0)
            mod = g.modulus()
            if mod is None:
                raise ValueError(f"|{g!r}| is irrational; use mode='float'")
            return GaussianRational(mod, 0) / g
        zc = complex(z) if not isinstance(z, GaussianRational) else z.to_complex()
        if zc == 0:
            return 1.0 + 0j
        return abs(zc) / zc

    beta: dict[VertexId, Phase] = {}
    one: Phase = GaussianRational(1, 0) if exact else (1.0 + 0j)
    for comp in components(forest):
        rep = comp.vertices[0]
        beta[rep] = one
        # climb from the representative to the root, inverting the edge rule
        v = rep
        while comp.parent[v] != v:
            p = comp.parent[v]
            beta[p] = beta[v] / phase_step(lam[v])
            v = p
        # sweep down from every settled vertex
        stack = [u for u in beta if u in comp.parent]
        while stack:
            v = stack.pop()
            for u in comp.children_of(v):
                if u in beta:
                    continue
                beta[u] = beta[v] * phase_step(lam[u])
                stack.append(u)
    return beta


def gauge_conjugation_defect(
    forest: DirectedForest,
    lam: Mapping[VertexId, object],
    beta: Mapping[VertexId, Phase],
    mode: str = "exact",
):
    """Largest entrywise deviation of the conjugated matrix from the modulus shift.

    Exact mode returns the maximal squared modulus of the defect as a
    Fraction (zero iff the gauge is perfect); float mode returns the
    maximal absolute deviation as a float.
    """
    exact = mode == "exact"
    worst = Fraction(0) if exact else 0.0
    for u in forest.vertices:
        if forest.is_root(u):
            continue
        p = forest.parent[u]
        if exact:
            z = _as_gaussian(lam[u])
            mod = z.modulus()
            if mod is None:
                raise ValueError(f"|lambda[{u!r}]| is irrational; use mode='float'")
            delta = beta[u] * beta[p].conjugate() * z - GaussianRational(mod, 0)
            worst = max(worst, delta.abs_sq())
        else:
            z = lam[u].to_complex() if isinstance(lam[u], GaussianRational) else complex(lam[u])
            b_u = beta[u].to_complex() if isinstance(beta[u], GaussianRational) else complex(beta[u])
            b_p = beta[p].to_complex() if isinstance(beta[p], GaussianRational) else complex(beta[p])
            worst = max(worst, abs(b_u * b_p.conjugate() * z - abs(z)))
    return worst


# -- vertex measures -----------------------------------------------------------


class MeasureReport:
    """Outcome of the per-vertex measure reconstruction."""

    __slots__ = ("vertex", "measure", "defect", "feasible", "excess")

    def __init__(self, vertex, measure, defect, feasible, excess):
        object.__setattr__(self, "vertex", vertex)
        object.__setattr__(self, "measure", measure)
        object.__setattr__(self, "defect", defect)
        object.__setattr__(self, "feasible", feasible)
        object.__setattr__(self, "excess", excess)

    def __setattr__(self, name, value):
        raise AttributeError("MeasureReport is immutable")

    def __repr__(self):
        if self.feasible:
            return f"MeasureReport({self.vertex!r}, {self.measure}, defect={self.defect})"
        return f"MeasureReport({self.vertex!r}, infeasible, excess={self.excess})"


def _push_through_edge(measure: AtomicMeasure, edge_sq: Fraction):
    """One backward step: scale by the edge weight and divide atoms by t.

    Returns (measure with unit mass, defect) or (None, excess) when the
    reconstructed mass exceeds one or the child measure charges zero.
    """
    if measure.mass_at_zero() > 0:
        return None, math.inf
    atoms = [(t, edge_sq * w / t) for t, w in measure.atoms]
    c = sum((w for _, w in atoms), Fraction(0))
    if c > 1:
        return None, c - 1
    defect = 1 - c
    if defect > 0:
        atoms.append((Fraction(0), defect))
    return AtomicMeasure(atoms), defect


def _measure_state(s: WeightedShift) -> dict[VertexId, MeasureReport]:
    if s._measure_state is not None:
        return s._measure_state
    s.require_proper_leafless()
    state: dict[VertexId, MeasureReport] = {}
    order = sorted(s.forest.vertices, key=s.forest.depth_of, reverse=True)
    for v in order:
        if v in s.tails:
            tail = s.tails[v]
            measure = AtomicMeasure([(tail.constant_sq, 1)])
            defect = Fraction(0)
            failed = None
            for d in range(len(tail.prefix_sq), 0, -1):
                measure, defect = _push_through_edge(measure, tail.sq_at(d))
                if measure is None:
                    failed = defect  # excess, possibly inf
                    break
                if defect > 0 and d > 1:
                    failed = math.inf
                    break
            if failed is not None:
                state[v] = MeasureReport(v, None, None, False, failed)
            else:
                state[v] = MeasureReport(v, measure, defect, True, None)
            continue
        kids = s.forest.children_of(v)
        if not kids:
            # childless root of a degenerate component: zero operator
            state[v] = MeasureReport(v, AtomicMeasure([(Fraction(0), 1)]), Fraction(1), True, None)
            continue
        if any(not state[u].feasible for u in kids):
            state[v] = MeasureReport(v, None, None, False, None)
            continue
        blend = []
        blocked = False
        for u in kids:
            rep = state[u]
            if rep.defect > 0:
                blocked = True
                break
            blend.append((s.sq[u], rep.measure))
        if blocked:
            state[v] = MeasureReport(v, None, None, False, math.inf)
            continue
        rho = mixture(blend)
        c = rho.neg_moment(1)
        if c > 1:
            state[v] = MeasureReport(v, None, None, False, c - 1)
            continue
        atoms = [(t, w / t) for t, w in rho.atoms]
        defect = 1 - c
        if defect > 0:
            atoms.append((Fraction(0), defect))
        state[v] = MeasureReport(v, AtomicMeasure(atoms), defect, True, None)
    object.__setattr__(s, "_measure_state", state)
    return state


def vertex_measure(s: WeightedShift, v: VertexId) -> MeasureReport:
    """Unique atomic measure matching the moment sequence at v, when it exists."""
    s.forest.require(v)
    return _measure_state(s)[v]


def moment(s: WeightedShift, v: ExtVertex, n: int) -> Fraction:
    s.require_proper_leafless()
    return s.moment(v, n)
