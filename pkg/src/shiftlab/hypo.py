"""Hyponormality of shift powers and the fork counterexample construction.

A power is hyponormal iff the powered forest is leafless and, at every
vertex, the weighted ratio sum hip_k stays at or below one.  Along a
constant tail the ratios are exactly one, so checking a finite window of
tail positions certifies the infinite forest.
"""
from __future__ import annotations

from fractions import Fraction

from .errors import ForklessInput, NotATree, NotProper, RootFork
from .forest import (
    DirectedForest,
    ForestKind,
    VertexId,
    backward_extend_tree,
    children,
    classify_forkless,
    components,
    descendants,
)
from .posdef import is_psd
from .shifts import ExtVertex, TailProfile, WeightedShift, ext_key

VERDICT_HYPONORMAL = "hyponormal"
VERDICT_NOT_HYPONORMAL = "not-hyponormal"
VERDICT_LEAF_OBSTRUCTION = "leaf-obstruction"


class HipReport:
    """Per-vertex hip_k values plus the verdict for one power."""

    __slots__ = ("k", "values", "verdict", "witness")

    def __init__(self, k: int, values: dict[str, Fraction], verdict: str, witness: str | None):
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "verdict", verdict)
        object.__setattr__(self, "witness", witness)

    def __setattr__(self, name, value):
        raise AttributeError("HipReport is immutable")

    def holds(self) -> bool:
        return self.verdict == VERDICT_HYPONORMAL

    def __repr__(self):
        tail = "" if self.witness is None else f", witness={self.witness!r}"
        return f"HipReport(k={self.k}, {self.verdict}{tail})"


def chi_k_ext(s: WeightedShift, v: ExtVertex, k: int) -> list[ExtVertex]:
    """k-th children in the forest extended by its tails."""
    s.require_ext(v)
    level = [v]
    for _ in range(k):
        level = [u for w in level for u in s.ext_children(w)]
    return level


def edge_product_sq(s: WeightedShift, u: ExtVertex, k: int) -> Fraction:
    """Squared weight of the k-edge path ending at u."""
    prod = Fraction(1)
    w = u
    for _ in range(k):
        prod *= s.ext_sq(w)
        w = s.ext_parent(w)
    return prod


def hip_k(s: WeightedShift, v: ExtVertex, k: int) -> Fraction:
    """Ratio sum over the k-th children; at most one iff the power form is PSD here."""
    if k < 1:
        raise ValueError("k must be positive")
    s.require_proper_leafless()
    total = Fraction(0)
    for u in chi_k_ext(s, v, k):
        total += edge_product_sq(s, u, k) / s.moment(u, k)
    return total


def _tail_window(s: WeightedShift, leaf: VertexId, k: int) -> list[ExtVertex]:
    # beyond the prefix the k-window sits in the constant region and hip is 1
    tail = s.tails[leaf]
    return [(leaf, d) for d in range(1, len(tail.prefix_sq) + 2 * k + 1)]


def checked_vertices(s: WeightedShift, k: int) -> list[ExtVertex]:
    """Core vertices plus the finitely many tail positions not yet stabilized."""
    out: list[ExtVertex] = list(s.forest.vertices)
    for leaf in sorted(s.tails):
        out.extend(_tail_window(s, leaf, k))
    return out


def check_hyponormal_power(s: WeightedShift, k: int) -> HipReport:
    """Decide hyponormality of the k-th power of a proper shift."""
    if k < 1:
        raise ValueError("k must be positive")
    if not s.is_proper():
        raise NotProper("hyponormality checks need a proper shift")
    rootset = set(s.forest.roots)
    for v in s.forest.vertices:
        if chi_k_ext(s, v, k):
            continue
        anc = s.forest.ancestor(v, k - 1)
        if anc not in rootset:
            return HipReport(k, {}, VERDICT_LEAF_OBSTRUCTION, v)
    values: dict[str, Fraction] = {}
    witness: str | None = None
    for v in checked_vertices(s, k):
        val = Fraction(0)
        for u in chi_k_ext(s, v, k):
            val += edge_product_sq(s, u, k) / s.moment(u, k)
        values[ext_key(v)] = val
        if witness is None and val > 1:
            witness = ext_key(v)
    if witness is not None:
        return HipReport(k, values, VERDICT_NOT_HYPONORMAL, witness)
    return HipReport(k, values, VERDICT_HYPONORMAL, None)


class PowerHypoResult:
    """Reports for k = 1..k_max, with an all-powers certificate when forkless."""

    __slots__ = ("reports", "forkless", "all_k_certified")

    def __init__(self, reports: list[HipReport], forkless: bool, all_k_certified: bool):
        object.__setattr__(self, "reports", reports)
        object.__setattr__(self, "forkless", forkless)
        object.__setattr__(self, "all_k_certified", all_k_certified)

    def __setattr__(self, name, value):
        raise AttributeError("PowerHypoResult is immutable")

    def holds(self) -> bool:
        return all(r.holds() for r in self.reports)

    def first_failure(self) -> HipReport | None:
        for r in self.reports:
            if not r.holds():
                return r
        return None

    def __repr__(self):
        status = "holds" if self.holds() else f"fails at k={self.first_failure().k}"
        cert = ", certified for all k" if self.all_k_certified else ""
        return f"PowerHypoResult({status}{cert})"


def _is_forkless_forest(s: WeightedShift) -> bool:
    for comp in components(s.forest):
        tailed = [v for v in comp.vertices if v in s.tails]
        try:
            kind = classify_forkless(comp, tailed)
        except NotATree:  # pragma: no cover - components are single trees
            return False
        if kind.kind != ForestKind.N_ARM_STAR:
            return False
    return True


def check_power_hyponormal(s: WeightedShift, k_max: int) -> PowerHypoResult:
    """Check powers 1..k_max; on forkless forests the first power decides all."""
    if k_max < 1:
        raise ValueError("k_max must be positive")
    forkless = _is_forkless_forest(s)
    reports = [check_hyponormal_power(s, 1)]
    if forkless:
        first = reports[0]
        certified = first.holds()
        for k in range(2, k_max + 1):
            reports.append(check_hyponormal_power(s, k))
        return PowerHypoResult(reports, True, certified)
    for k in range(2, k_max + 1):
        reports.append(check_hyponormal_power(s, k))
        if not reports[-1].holds():
            break
    return PowerHypoResult(reports, False, False)


def psd_oracle(s: WeightedShift, v: ExtVertex, k: int) -> bool:
    """Independent PSD test of the local power form at v.

    The form ``sum |f(u)|^2 m_u(k) - |sum f(u) w_u|^2`` on the k-th children
    is congruent, via scaling by the path weights, to the rational matrix
    ``diag(m_u(k) z_u) - z z^T`` with ``z_u`` the squared path weight.
    """
    if k < 1:
        raise ValueError("k must be positive")
    kids = chi_k_ext(s, v, k)
    if not kids:
        return True
    z = [edge_product_sq(s, u, k) for u in kids]
    d = [s.moment(u, k) * z[i] for i, u in enumerate(kids)]
    n = len(kids)
    mat = [[d[i] - z[i] * z[i] if i == j else -z[i] * z[j] for j in range(n)] for i in range(n)]
    ok, _ = is_psd(mat)
    return ok


class Counterexample:
    """A hyponormal shift whose square fails, with its construction data."""

    __slots__ = ("shift", "v0", "v1", "v2", "beta", "grafted", "hip2_at_v0")

    def __init__(self, shift, v0, v1, v2, beta, grafted, hip2_at_v0):
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "v0", v0)
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "grafted", grafted)
        object.__setattr__(self, "hip2_at_v0", hip2_at_v0)

    def __setattr__(self, name, value):
        raise AttributeError("Counterexample is immutable")

    def __repr__(self):
        return f"Counterexample(v0={self.v0!r}, v1={self.v1!r}, beta={self.beta}, hip2={self.hip2_at_v0})"


def _pick_fork(tree: DirectedForest, v1: VertexId | None) -> tuple[DirectedForest, VertexId, bool]:
    forks = [v for v in tree.vertices if len(tree.children_of(v)) >= 2]
    if v1 is not None:
        tree.require(v1)
        if v1 not in forks:
            raise ForklessInput(f"{v1!r} has fewer than two children")
        if tree.is_root(v1):
            raise RootFork(f"{v1!r} is a root; the construction needs a parent above the fork")
        return tree, v1, False
    if not forks:
        raise ForklessInput("the tree has no fork")
    candidates = [v for v in forks if not tree.is_root(v)]
    if candidates:
        return tree, min(candidates), False
    # all forks sit at the root: graft one fresh vertex above it first
    return backward_extend_tree(tree, 1), min(forks), True


def make_counterexample(tree: DirectedForest, v1: VertexId | None = None) -> Counterexample:
    """Weights on a forked tree that are hyponormal but fail at the square.

    Child sums are one outside the distinguished cone, two below the chosen
    grandchild, and the fork edges are tuned so the first power sits exactly
    on the boundary while the square exceeds it at the fork's parent.
    """
    if len(components(tree)) != 1:
        raise NotATree("the counterexample construction needs a single tree")
    tree, v1, grafted = _pick_fork(tree, v1)
    v0 = tree.parent_of(v1)
    v2 = min(tree.children_of(v1))
    c1 = tuple(u for u in tree.children_of(v0) if u != v1)
    c2 = tuple(u for u in tree.children_of(v1) if u != v2)
    beta = Fraction(0) if not c1 else Fraction(1, 2)
    double_region = set(descendants(tree, v2))  # child sums of two; one elsewhere

    sq: dict[VertexId, Fraction] = {v: Fraction(0) for v in tree.roots}
    sq[v1] = Fraction(4, 3) * (1 - beta)
    sq[v2] = Fraction(2, 3)
    for u in c1:
        sq[u] = beta / len(c1)
    for u in c2:
        sq[u] = Fraction(2, 3) / len(c2)
    tails: dict[VertexId, TailProfile] = {}
    for v in tree.vertices:
        target = Fraction(2) if v in double_region else Fraction(1)
        if v in (v0, v1):
            continue
        kids = children(tree, v)
        if not kids:
            tails[v] = TailProfile((), target)
            continue
        for u in kids:
            if u not in sq:
                sq[u] = target / len(kids)
    for v in tree.vertices:
        sq.setdefault(v, Fraction(0))

    shift = WeightedShift(tree, sq, tails)
    first = check_hyponormal_power(shift, 1)
    if not first.holds():
        raise AssertionError("constructed weights must pass the first power")
    hip2 = hip_k(shift, v0, 2)
    expected = (10 - beta) / 9
    if hip2 != expected:
        raise AssertionError(f"hip_2 at {v0!r} is {hip2}, expected {expected}")
    return Counterexample(shift, v0, v1, v2, beta, grafted, hip2)
