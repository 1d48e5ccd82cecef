"""Shared builders and independent oracles for the test suite.

The oracles recompute quantities from definitions (dense matrices, explicit
path enumeration) rather than through the library's own recursions, so they
can cross-check the fast paths.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from shiftlab.forest import DirectedForest, validate_forest
from shiftlab.shifts import TailProfile, WeightedShift


@pytest.fixture
def fork_tree() -> DirectedForest:
    """Root 0 with child 1; vertex 1 forks into 2 and 3."""
    return validate_forest(["0", "1", "2", "3"], {"0": "0", "1": "0", "2": "1", "3": "1"})


@pytest.fixture
def two_chain() -> DirectedForest:
    return validate_forest(["a", "b"], {"a": "a", "b": "a"})


@pytest.fixture
def single_vertex() -> DirectedForest:
    return validate_forest(["x"], {"x": "x"})


def unilateral(constant_sq="1", prefix=()) -> WeightedShift:
    """Classical unilateral weighted shift: one tailed root."""
    f = validate_forest(["x"], {"x": "x"})
    return WeightedShift(f, {"x": 0}, {"x": TailProfile(prefix, constant_sq)})


def chain_shift(*sq, tail_const="1", tail_prefix=()) -> WeightedShift:
    """Rooted chain with the given non-root squared weights, then a tail."""
    names = [f"c{i}" for i in range(len(sq) + 1)]
    parent = {names[0]: names[0]}
    for i in range(1, len(names)):
        parent[names[i]] = names[i - 1]
    f = validate_forest(names, parent)
    weights = {names[0]: Fraction(0)}
    for i, w in enumerate(sq, start=1):
        weights[names[i]] = w
    return WeightedShift(f, weights, {names[-1]: TailProfile(tail_prefix, tail_const)})


# -- extended-graph oracles ----------------------------------------------------


def ext_vertices_window(s: WeightedShift, depth: int):
    out = list(s.forest.vertices)
    for leaf in sorted(s.tails):
        out.extend((leaf, d) for d in range(1, depth + 1))
    return out


def brute_chi_k(s: WeightedShift, v, k: int, window: int):
    """k-th children by the raw definition: p^k(u) = v != p^{k-1}(u)."""
    if k == 0:
        return [v]
    hits = []
    for u in ext_vertices_window(s, window):
        if s.ext_ancestor(u, k) == v and s.ext_ancestor(u, k - 1) != v:
            hits.append(u)
    return hits


def brute_moment(s: WeightedShift, v, n: int, window: int | None = None) -> Fraction:
    """Norm of the n-th power on a basis vector, by explicit path products."""
    if window is None:
        window = n + max((len(t.prefix_sq) for t in s.tails.values()), default=0) + 1
    total = Fraction(0)
    for u in brute_chi_k(s, v, n, window):
        prod = Fraction(1)
        w = u
        for _ in range(n):
            prod *= s.ext_sq(w)
            w = s.ext_parent(w)
        total += prod
    return total


# -- dense float oracles ---------------------------------------------------------


def dense_matrix(s: WeightedShift, depth: int = 4):
    """Dense float matrix of the shift on the core plus a tail window."""
    verts = ext_vertices_window(s, depth)
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)
    mat = [[0.0] * n for _ in range(n)]
    for u in verts:
        if s.is_ext_root(u):
            continue
        p = s.ext_parent(u)
        if p in index:
            mat[index[u]][index[p]] = math.sqrt(float(s.ext_sq(u)))
    return verts, mat


def operator_norm_sq_oracle(s: WeightedShift, depth: int = 4, iters: int = 200) -> float:
    """Largest eigenvalue of S*S by power iteration on the dense truncation."""
    verts, mat = dense_matrix(s, depth)
    n = len(verts)
    rng = random.Random(7)
    x = [rng.random() + 0.1 for _ in range(n)]
    lam = 0.0
    for _ in range(iters):
        y = [sum(mat[r][c] * x[c] for c in range(n)) for r in range(n)]  # S x
        z = [sum(mat[r][c] * y[r] for r in range(n)) for c in range(n)]  # S^T y
        norm = math.sqrt(sum(t * t for t in z))
        if norm == 0:
            return 0.0
        lam = norm
        x = [t / norm for t in z]
    return lam
