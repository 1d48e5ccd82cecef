"""Subnormality certificates and constructive backward extensions.

Certification runs bottom-up: each vertex pulls its children's measures one
step back; the verdict is positive when every reconstructed mass stays at
or below one and only roots park mass at zero.  The extension builders
invert this process, turning feasibility margins into explicit weights.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import (
    EmptyFamily,
    FrontierMismatch,
    InfeasibleExtension,
    MemberInfeasible,
    MemberNotExtendable,
    NotRootedTree,
    NotSubnormalInput,
    ScaleOutOfRange,
    VertexCollision,
)
from .forest import (
    DirectedForest,
    VertexId,
    backward_extension_chain,
    chi_k,
    components,
    rooted_sum,
)
from .hypo import check_power_hyponormal, hip_k
from .measures import AtomicMeasure, backward_extend_moments, mixture
from .rationals import RatioLike, parse_ratio
from .shifts import (
    TailProfile,
    WeightedShift,
    _measure_state,
    shift_norm_sq,
)

VERDICT_SUBNORMAL = "subnormal"
VERDICT_NOT_SUBNORMAL = "not-subnormal"


class SubnormalCert:
    """Per-vertex measures and defects, or the first infeasible vertex."""

    __slots__ = ("verdict", "witness", "excess", "measures", "defects")

    def __init__(self, verdict, witness, excess, measures, defects):
        object.__setattr__(self, "verdict", verdict)
        object.__setattr__(self, "witness", witness)
        object.__setattr__(self, "excess", excess)
        object.__setattr__(self, "measures", measures)
        object.__setattr__(self, "defects", defects)

    def __setattr__(self, name, value):
        raise AttributeError("SubnormalCert is immutable")

    def holds(self) -> bool:
        return self.verdict == VERDICT_SUBNORMAL

    def __repr__(self):
        if self.holds():
            return f"SubnormalCert(subnormal, {len(self.measures)} vertices)"
        return f"SubnormalCert(not subnormal at {self.witness!r}, excess={self.excess})"


def check_subnormal(s: WeightedShift) -> SubnormalCert:
    """Certify subnormality of a proper leafless shift by explicit measures."""
    state = _measure_state(s)
    bad_primary = sorted(v for v, rep in state.items() if not rep.feasible and rep.excess is not None)
    if bad_primary:
        w = bad_primary[0]
        return SubnormalCert(VERDICT_NOT_SUBNORMAL, w, state[w].excess, {}, {})
    measures = {v: rep.measure for v, rep in state.items()}
    defects = {v: rep.defect for v, rep in state.items()}
    return SubnormalCert(VERDICT_SUBNORMAL, None, None, measures, defects)


def _root_of_single_tree(s: WeightedShift) -> VertexId:
    if len(components(s.forest)) != 1 or len(s.forest.roots) != 1:
        raise NotRootedTree("the operation needs a shift on a single rooted tree")
    return s.forest.roots[0]


def _root_measure(s: WeightedShift, index: int | None = None) -> AtomicMeasure:
    root = _root_of_single_tree(s)
    cert = check_subnormal(s)
    if not cert.holds():
        if index is None:
            raise NotSubnormalInput(f"shift is not subnormal (witness {cert.witness!r})")
        raise MemberInfeasible(index, "not subnormal")
    return cert.measures[root]


def backward_extension_feasible(s: WeightedShift, k: int) -> Fraction | None:
    """Inverse k-th moment of the root measure, or None when it charges zero."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    mu = _root_measure(s)
    if k == 0:
        return Fraction(1)
    c0 = mu.neg_moment(k)
    if c0 is math.inf:
        return None
    return c0


class ExtensionPlan:
    """New edge weights for a k-step backward extension, shallowest first."""

    __slots__ = ("k", "edge_sq", "scale")

    def __init__(self, k: int, edge_sq: Sequence[Fraction], scale: Fraction):
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "edge_sq", tuple(edge_sq))
        object.__setattr__(self, "scale", scale)

    def __setattr__(self, name, value):
        raise AttributeError("ExtensionPlan is immutable")

    def __repr__(self):
        return f"ExtensionPlan(k={self.k}, edge_sq={list(self.edge_sq)}, scale={self.scale})"


def construct_backward_extension(
    s: WeightedShift, k: int, scale: RatioLike | None = None
) -> tuple[WeightedShift, ExtensionPlan]:
    """Prepend k weighted vertices above the root, preserving subnormality.

    The root moments are scaled by C in (0, 1/C0] and extended backward with
    the new leading term normalized to one; consecutive quotients of the
    extended prefix become the new squared weights.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    root = _root_of_single_tree(s)
    if k == 0:
        _root_measure(s)  # validates subnormality
        return s, ExtensionPlan(0, (), Fraction(1))
    c0 = backward_extension_feasible(s, k)
    if c0 is None:
        raise InfeasibleExtension("the root measure charges zero")
    c = 1 / c0 if scale is None else parse_ratio(scale)
    if not 0 < c <= 1 / c0:
        raise ScaleOutOfRange(f"scale {c} outside (0, {1 / c0}]")
    mu = _root_measure(s)
    ext = backward_extend_moments(mu.scaled(c), k, require_probability=False)
    if ext is None:  # pragma: no cover - c * c0 <= 1 by construction
        raise InfeasibleExtension("scaled inverse moment exceeds one")
    # a_{-k}..a_{-1} then a_0 = C; new weights are consecutive quotients
    series = list(ext.prefix) + [c]
    edge_sq = [series[k - l] / series[k - l - 1] for l in range(k)]
    chain = backward_extension_chain(k, s.forest.vertices)
    verts = list(s.forest.vertices) + chain
    parent = dict(s.forest.parent)
    parent[root] = chain[0]
    for j in range(k - 1):
        parent[chain[j]] = chain[j + 1]
    parent[chain[-1]] = chain[-1]
    sq = dict(s.sq)
    sq[root] = edge_sq[0]
    for l in range(1, k):
        sq[chain[l - 1]] = edge_sq[l]
    sq[chain[-1]] = Fraction(0)
    extended = WeightedShift(DirectedForest(verts, parent), sq, s.tails)
    new_root = chain[-1]
    for j in range(k + 1):
        expected = series[j]
        if extended.moment(new_root, j) != expected:
            raise AssertionError("extension moments disagree with the extended prefix")
    if not check_subnormal(extended).holds():
        raise AssertionError("constructed extension failed recertification")
    return extended, ExtensionPlan(k, edge_sq, c)


def _extension_coefficients(
    measures: Sequence[AtomicMeasure], k: int
) -> tuple[list[Fraction], list[Fraction], list[Fraction]]:
    """Root-edge coefficients making the joined moments a unit-mass pullback.

    The first member absorbs the slack; the rest take dyadically shrinking
    shares capped by their feasibility margins.  Exactly sum(a_j * C_j) = 1.
    """
    c_vals: list[Fraction] = []
    d_vals: list[Fraction] = []
    for j, mu in enumerate(measures):
        d = mu.neg_moment(k + 1)
        if d is math.inf:
            raise MemberInfeasible(j, f"no ({k + 1})-step backward extension")
        c_vals.append(mu.neg_moment(1))
        d_vals.append(d)
    coeffs = [Fraction(0)] * len(measures)
    taken = Fraction(0)
    for i in range(1, len(measures)):
        share = Fraction(1, 2**i) * min(Fraction(1), 1 / c_vals[i], 1 / d_vals[i])
        coeffs[i] = share
        taken += share * c_vals[i]
    coeffs[0] = (1 - taken) / c_vals[0]
    if coeffs[0] <= 0:  # pragma: no cover - shares are capped below one
        raise AssertionError("leading coefficient must stay positive")
    total = sum((coeffs[j] * c_vals[j] for j in range(len(measures))), Fraction(0))
    if total != 1:  # pragma: no cover - equality holds by construction
        raise AssertionError("coefficient normalization must be exact")
    return coeffs, c_vals, d_vals


def _pull_back(measures: Sequence[AtomicMeasure], coeffs: Sequence[Fraction]) -> AtomicMeasure:
    parts = []
    for a, mu in zip(coeffs, measures):
        parts.append((a, AtomicMeasure([(t, w / t) for t, w in mu.atoms])))
    return mixture(parts)


class RootedSumExtension:
    """Joint shift over a fresh root together with its construction data."""

    __slots__ = ("shift", "theta_sq", "c_values", "d_values", "root", "member_roots")

    def __init__(self, shift, theta_sq, c_values, d_values, root, member_roots):
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "theta_sq", tuple(theta_sq))
        object.__setattr__(self, "c_values", tuple(c_values))
        object.__setattr__(self, "d_values", tuple(d_values))
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "member_roots", tuple(member_roots))

    def __setattr__(self, name, value):
        raise AttributeError("RootedSumExtension is immutable")

    def __repr__(self):
        return f"RootedSumExtension(theta_sq={list(self.theta_sq)})"


def rooted_sum_extend(shifts: Sequence[WeightedShift], k: int) -> RootedSumExtension:
    """Join subnormal shifts under one root so the result extends k more steps.

    Feasible iff every member admits a (k+1)-step backward extension; the
    joint shift is subnormal, k-step extendable, and its norm is the family
    maximum.
    """
    if not shifts:
        raise EmptyFamily("rooted_sum_extend needs members")
    if k < 0:
        raise ValueError("k must be nonnegative")
    measures = [_root_measure(s, index=j) for j, s in enumerate(shifts)]
    coeffs, c_vals, d_vals = _extension_coefficients(measures, k)
    joint_forest = rooted_sum([s.forest for s in shifts], auto_prefix=True)
    root = joint_forest.roots[0]
    sq: dict[VertexId, Fraction] = {root: Fraction(0)}
    tails: dict[VertexId, TailProfile] = {}
    member_roots = []
    for j, s in enumerate(shifts):
        member_root = f"{j}:{s.forest.roots[0]}"
        member_roots.append(member_root)
        for v in s.forest.vertices:
            sq[f"{j}:{v}"] = s.sq[v]
        sq[member_root] = coeffs[j]
        for leaf, tail in s.tails.items():
            tails[f"{j}:{leaf}"] = tail
    joint = WeightedShift(joint_forest, sq, tails)
    if not check_subnormal(joint).holds():
        raise AssertionError("joint shift failed recertification")
    if k >= 1 and backward_extension_feasible(joint, k) is None:
        raise AssertionError("joint shift lost its k-step feasibility")
    expected_norm = max(shift_norm_sq(s) for s in shifts)
    if shift_norm_sq(joint) != expected_norm:
        raise AssertionError("joint norm must equal the family maximum")
    return RootedSumExtension(joint, coeffs, c_vals, d_vals, root, member_roots)


class JointExtension:
    """Weights filling an envelope above a family grafted at its frontier."""

    __slots__ = ("shift", "frontier", "k")

    def __init__(self, shift, frontier, k):
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "frontier", tuple(frontier))
        object.__setattr__(self, "k", k)

    def __setattr__(self, name, value):
        raise AttributeError("JointExtension is immutable")

    def __repr__(self):
        return f"JointExtension(k={self.k}, frontier={list(self.frontier)})"


def _envelope_frontier(envelope: DirectedForest, k: int, family_size: int) -> list[VertexId]:
    if len(components(envelope)) != 1 or len(envelope.roots) != 1:
        raise NotRootedTree("the envelope must be a rooted tree")
    root = envelope.roots[0]
    frontier = sorted(chi_k(envelope, root, k))
    for v in envelope.vertices:
        depth = envelope.depth_of(v)
        if depth > k:
            raise FrontierMismatch(f"envelope vertex {v!r} lies below depth {k}")
        if depth < k and not envelope.children_of(v):
            raise FrontierMismatch(f"envelope dead-ends at {v!r} above the frontier")
    if len(frontier) != family_size:
        raise FrontierMismatch(
            f"frontier has {len(frontier)} slots for {family_size} members"
        )
    return frontier


def join_at_depth(
    shifts: Sequence[WeightedShift], envelope: DirectedForest, k: int
) -> JointExtension:
    """Fill an arbitrary depth-k envelope over the family with subnormal weights.

    Members are grafted at the sorted frontier in list order.  Feasibility
    depends only on the members' k-step margins, never on the envelope
    shape; the construction collapses the envelope level by level.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if not shifts:
        raise EmptyFamily("join_at_depth needs members")
    frontier = _envelope_frontier(envelope, k, len(shifts))
    measures = {
        frontier[j]: _root_measure(s, index=j) for j, s in enumerate(shifts)
    }
    # members must clear k steps; deeper levels then stay feasible automatically
    for j, s in enumerate(shifts):
        if measures[frontier[j]].neg_moment(k) is math.inf:
            raise MemberInfeasible(j, f"no {k}-step backward extension")

    verts = list(envelope.vertices)
    parent = dict(envelope.parent)
    sq: dict[VertexId, Fraction] = {}
    tails: dict[VertexId, TailProfile] = {}
    taken = set(verts)
    for j, s in enumerate(shifts):
        member_root = s.forest.roots[0]
        rename = {}
        for v in s.forest.vertices:
            nv = frontier[j] if v == member_root else f"m{j}:{v}"
            if nv in taken and v != member_root:
                raise VertexCollision(f"envelope already uses {nv!r}")
            rename[v] = nv
        for v in s.forest.vertices:
            if v == member_root:
                continue
            nv = rename[v]
            verts.append(nv)
            taken.add(nv)
            parent[nv] = rename[s.forest.parent[v]]
            sq[nv] = s.sq[v]
        for leaf, tail in s.tails.items():
            tails[rename[leaf]] = tail
    level_measures = dict(measures)
    root = envelope.roots[0]
    for depth in range(k - 1, -1, -1):
        next_level: dict[VertexId, AtomicMeasure] = {}
        for u in sorted(chi_k(envelope, root, depth)):
            kids = sorted(envelope.children_of(u))
            kid_measures = [level_measures[v] for v in kids]
            try:
                coeffs, _, _ = _extension_coefficients(kid_measures, depth)
            except MemberInfeasible as exc:  # pragma: no cover - prechecked above
                raise MemberInfeasible(exc.index, "member infeasible at inner level")
            for v, a in zip(kids, coeffs):
                sq[v] = a
            next_level[u] = _pull_back(kid_measures, coeffs)
        level_measures = next_level
    sq[root] = Fraction(0)
    joint = WeightedShift(DirectedForest(verts, parent), sq, tails)
    if not check_subnormal(joint).holds():
        raise AssertionError("joint envelope shift failed recertification")
    return JointExtension(joint, frontier, k)


class PowerHypoExtension:
    """Joint one-step power-hyponormal extension of a family."""

    __slots__ = ("shift", "root_sq", "scales_sq", "root", "member_roots", "checked_k")

    def __init__(self, shift, root_sq, scales_sq, root, member_roots, checked_k):
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "root_sq", tuple(root_sq))
        object.__setattr__(self, "scales_sq", tuple(scales_sq))
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "member_roots", tuple(member_roots))
        object.__setattr__(self, "checked_k", checked_k)

    def __setattr__(self, name, value):
        raise AttributeError("PowerHypoExtension is immutable")

    def __repr__(self):
        return f"PowerHypoExtension(root_sq={list(self.root_sq)}, k<={self.checked_k})"


def powerhypo_rooted_sum_extend(
    members: Sequence[tuple[WeightedShift, RatioLike]],
    k_max: int,
    scales_sq: Sequence[RatioLike] | None = None,
) -> PowerHypoExtension:
    """Join shifts whose one-step extensions are power hyponormal.

    Each member supplies the squared weight of its own one-step extension;
    dyadic scales shrunk below the supplied weights keep every power's
    ratio sum at the new root strictly under one.
    """
    if not members:
        raise EmptyFamily("powerhypo_rooted_sum_extend needs members")
    if k_max < 1:
        raise ValueError("k_max must be positive")
    ext_shifts = []
    ext_roots = []
    for j, (s, raw) in enumerate(members):
        w = parse_ratio(raw)
        if w <= 0:
            raise ValueError(f"member {j}: extension weight must be positive")
        old_root = _root_of_single_tree(s)
        chain = backward_extension_chain(1, s.forest.vertices)
        verts = list(s.forest.vertices) + chain
        parent = dict(s.forest.parent)
        parent[old_root] = chain[0]
        parent[chain[0]] = chain[0]
        ext_forest = DirectedForest(verts, parent)
        sq = dict(s.sq)
        sq[old_root] = w
        sq[chain[0]] = Fraction(0)
        ext = WeightedShift(ext_forest, sq, s.tails, allow_leaves=s.allow_leaves)
        result = check_power_hyponormal(ext, k_max)
        if not result.holds():
            raise MemberNotExtendable(j, result.first_failure().k)
        ext_shifts.append(ext)
        ext_roots.append(chain[0])
    weights = [parse_ratio(members[j][1]) for j in range(len(members))]
    if scales_sq is None:
        scales = [Fraction(1, 2 ** (j + 2)) / max(Fraction(1), weights[j]) for j in range(len(members))]
    else:
        scales = [parse_ratio(x) for x in scales_sq]
        if len(scales) != len(members) or any(x <= 0 for x in scales):
            raise ValueError("scales must be positive, one per member")
        if sum(scales) > 1:
            raise ValueError("scales must sum to at most one")
    joint_forest = rooted_sum([s.forest for s, _ in members], auto_prefix=True)
    root = joint_forest.roots[0]
    sq = {root: Fraction(0)}
    tails: dict[VertexId, TailProfile] = {}
    member_roots = []
    root_sq = []
    for j, (s, _) in enumerate(members):
        member_root = f"{j}:{s.forest.roots[0]}"
        member_roots.append(member_root)
        for v in s.forest.vertices:
            sq[f"{j}:{v}"] = s.sq[v]
        root_sq.append(scales[j] * weights[j])
        sq[member_root] = root_sq[-1]
        for leaf, tail in s.tails.items():
            tails[f"{j}:{leaf}"] = tail
    allow = any(s.allow_leaves for s, _ in members)
    joint = WeightedShift(joint_forest, sq, tails, allow_leaves=allow)
    for k in range(1, k_max + 1):
        lhs = hip_k(joint, root, k)
        rhs = sum(
            (scales[j] * hip_k(ext_shifts[j], ext_roots[j], k) for j in range(len(members))),
            Fraction(0),
        )
        if lhs != rhs or lhs > 1:
            raise AssertionError("joint root ratios must split over the members")
    if not check_power_hyponormal(joint, k_max).holds():
        raise AssertionError("joint shift failed the power recertification")
    return PowerHypoExtension(joint, root_sq, scales, root, member_roots, k_max)
