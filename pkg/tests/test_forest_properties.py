"""Algebraic laws of forest operations on randomized inputs."""
from __future__ import annotations

from random import Random

from hypothesis import given, settings
from hypothesis import strategies as st

from shiftlab.forest import (
    canonical_form,
    chi_k,
    components,
    des_subtree,
    power_k,
    rooted_sum,
)
from shiftlab.generators import random_forest, random_rooted_tree


@st.composite
def forests(draw, n_max=40):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_forest(Random(seed), n_max=n_max)


@st.composite
def rooted_trees(draw, n_max=25):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_rooted_tree(Random(seed), n_max=n_max)


@settings(max_examples=60, deadline=None)
@given(forests(), st.integers(0, 4))
def test_chi_sets_disjoint(f, k):
    seen = set()
    for v in f.vertices:
        block = set(chi_k(f, v, k))
        assert not block & seen
        seen |= block


@settings(max_examples=60, deadline=None)
@given(forests(), st.integers(1, 4))
def test_chi_recursion_matches_definition(f, k):
    for v in f.vertices:
        direct = {
            u
            for u in f.vertices
            if f.ancestor(u, k) == v and f.ancestor(u, k - 1) != v
        }
        assert set(chi_k(f, v, k)) == direct


@settings(max_examples=60, deadline=None)
@given(forests())
def test_components_have_one_root(f):
    for comp in components(f):
        assert len(comp.roots) == 1


@settings(max_examples=60, deadline=None)
@given(forests(), st.integers(1, 3), st.integers(1, 3))
def test_power_multiplicative(f, k, l):
    assert power_k(power_k(f, k), l) == power_k(f, k * l)


@settings(max_examples=60, deadline=None)
@given(forests(), st.integers(1, 4))
def test_power_roots_formula(f, k):
    expected = set()
    for r in f.roots:
        for j in range(k):
            expected.update(chi_k(f, r, j))
    assert set(power_k(f, k).roots) == expected


@settings(max_examples=60, deadline=None)
@given(rooted_trees(), st.integers(1, 4))
def test_component_count_bound(t, k):
    degrees = [len(t.children_of(v)) for v in t.vertices]
    n_bound = max(degrees) if degrees else 0
    count = len(components(power_k(t, k)))
    if n_bound >= 2:
        assert count <= (n_bound**k - 1) // (n_bound - 1)
    else:
        assert count <= k


@settings(max_examples=40, deadline=None)
@given(st.lists(rooted_trees(n_max=10), min_size=1, max_size=4))
def test_rooted_sum_round_trip(trees):
    joined = rooted_sum(trees, auto_prefix=True)
    root = joined.roots[0]
    got = sorted(canonical_form(des_subtree(joined, u)) for u in joined.children_of(root))
    want = sorted(canonical_form(t) for t in trees)
    assert got == want
