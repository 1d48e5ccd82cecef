"""Seeded random instances: forests, tailed shifts, and certified families.

Everything is driven by a caller-supplied ``random.Random`` so CLI runs and
test suites replay exactly from a seed.
"""
from __future__ import annotations

from fractions import Fraction
from random import Random

from .forest import DirectedForest, VertexId, validate_forest
from .measures import AtomicMeasure
from .shifts import TailProfile, WeightedShift


def rand_fraction(rng: Random, lo: int = 1, hi: int = 6) -> Fraction:
    """Positive rational with small numerator and denominator."""
    return Fraction(rng.randint(lo, hi), rng.randint(1, hi))


def random_forest(rng: Random, n_max: int = 40, n_min: int = 1) -> DirectedForest:
    """Random parent map where each vertex attaches to an earlier one or roots."""
    n = rng.randint(n_min, n_max)
    names = [f"v{i:02d}" for i in range(n)]
    parent = {names[0]: names[0]}
    for i in range(1, n):
        if rng.random() < 0.12:
            parent[names[i]] = names[i]
        else:
            parent[names[i]] = names[rng.randrange(i)]
    return validate_forest(names, parent)


def random_rooted_tree(rng: Random, n_max: int = 20, n_min: int = 1) -> DirectedForest:
    n = rng.randint(n_min, n_max)
    names = [f"v{i:02d}" for i in range(n)]
    parent = {names[0]: names[0]}
    for i in range(1, n):
        parent[names[i]] = names[rng.randrange(i)]
    return validate_forest(names, parent)


def random_tail(rng: Random, max_prefix: int = 2, perfect_squares: bool = False) -> TailProfile:
    def draw() -> Fraction:
        w = rand_fraction(rng)
        return w * w if perfect_squares else w

    prefix = [draw() for _ in range(rng.randint(0, max_prefix))]
    return TailProfile(prefix, draw())


def random_tailed_shift(
    rng: Random,
    core_max: int = 25,
    perfect_squares: bool = False,
    max_prefix: int = 2,
) -> WeightedShift:
    """Proper leafless shift: random weights, every core leaf continued."""
    forest = random_forest(rng, n_max=core_max)
    sq = {}
    for v in forest.vertices:
        if forest.is_root(v):
            sq[v] = Fraction(0)
        else:
            w = rand_fraction(rng)
            sq[v] = w * w if perfect_squares else w
    tails = {
        leaf: random_tail(rng, max_prefix, perfect_squares) for leaf in forest.leaves()
    }
    return WeightedShift(forest, sq, tails)


def random_star_hyponormal(rng: Random, max_arms: int = 6) -> WeightedShift:
    """Hyponormal shift on a star: nondecreasing arms, first-step ratios within one."""
    arms = rng.randint(1, max_arms)
    names = ["w"] + [f"a{i}" for i in range(arms)]
    parent = {"w": "w", **{f"a{i}": "w" for i in range(arms)}}
    forest = validate_forest(names, parent)
    sq: dict[VertexId, Fraction] = {"w": Fraction(0)}
    tails = {}
    shares = [Fraction(rng.randint(1, 3), 4 * arms) for _ in range(arms)]
    for i in range(arms):
        # nondecreasing squared weights along each arm keep every power in check
        prefix = sorted(rand_fraction(rng) for _ in range(rng.randint(0, 2)))
        base = prefix[-1] if prefix else rand_fraction(rng)
        const = base + Fraction(rng.randint(0, 2), 3)
        tails[f"a{i}"] = TailProfile(prefix, const)
        first_tail_sq = prefix[0] if prefix else const
        sq[f"a{i}"] = shares[i] * first_tail_sq
    return WeightedShift(forest, sq, tails)


def random_nonforkless_tree(rng: Random, n_max: int = 20) -> DirectedForest:
    """Rooted tree guaranteed to contain a vertex with two children."""
    tree = random_rooted_tree(rng, n_max=max(3, n_max - 2), n_min=1)
    forks = [v for v in tree.vertices if len(tree.children_of(v)) >= 2]
    if forks:
        return tree
    host = tree.vertices[rng.randrange(len(tree.vertices))]
    extra = ["x0", "x1"]
    verts = list(tree.vertices) + extra
    parent = dict(tree.parent)
    parent["x0"] = host
    parent["x1"] = host
    return validate_forest(verts, parent)


def random_subnormal_shift(
    rng: Random, core_max: int = 12, root_slack: bool | None = None, core_min: int = 1
) -> WeightedShift:
    """Shift certified subnormal by construction.

    Child weights are normalized so every interior vertex pulls its
    children's measures back to exactly unit mass; only the root may keep a
    defect, and only when slack is requested.  With ``root_slack=False`` and
    at least two vertices the root measure stays clear of zero, so every
    backward extension is feasible.
    """
    forest = random_rooted_tree(rng, n_max=core_max, n_min=core_min)
    tails = {leaf: TailProfile((), rand_fraction(rng)) for leaf in forest.leaves()}
    measures: dict[VertexId, AtomicMeasure] = {}
    sq: dict[VertexId, Fraction] = {v: Fraction(0) for v in forest.roots}
    order = sorted(forest.vertices, key=forest.depth_of, reverse=True)
    for v in order:
        if v in tails:
            measures[v] = AtomicMeasure.point(tails[v].constant_sq)
            continue
        kids = forest.children_of(v)
        if not kids:
            measures[v] = AtomicMeasure.point(0)  # childless root: zero operator
            continue
        shares = [rand_fraction(rng) for _ in kids]
        pulled = [sum((w / t for t, w in measures[u].atoms), Fraction(0)) for u in kids]
        scale = sum((s * c for s, c in zip(shares, pulled)), Fraction(0))
        is_root = forest.is_root(v)
        slack = Fraction(1)
        if is_root and (root_slack if root_slack is not None else rng.random() < 0.5):
            slack = Fraction(rng.randint(1, 3), 4)
        atoms: list[tuple[Fraction, Fraction]] = []
        for u, share in zip(kids, shares):
            w = share * slack / scale
            sq[u] = w
            atoms.extend((t, w * m / t) for t, m in measures[u].atoms)
        if slack < 1:
            atoms.append((Fraction(0), 1 - slack))
        measures[v] = AtomicMeasure(atoms)
    return WeightedShift(forest, sq, tails)


def random_envelope(rng: Random, members: int, k: int) -> DirectedForest:
    """Rooted tree whose childless vertices all sit at depth k, members in total."""
    if members < 1 or k < 1:
        raise ValueError("need at least one member and depth one")
    sizes = [1]
    for _ in range(k - 1):
        sizes.append(rng.randint(sizes[-1], members))
    sizes.append(members)
    names = [[f"e{d}n{i}" for i in range(sizes[d])] for d in range(k + 1)]
    parent = {names[0][0]: names[0][0]}
    for d in range(1, k + 1):
        prev, cur = names[d - 1], names[d]
        for i, v in enumerate(cur):
            # surjective onto the previous level so nothing dead-ends early
            parent[v] = prev[i] if i < len(prev) else prev[rng.randrange(len(prev))]
    return validate_forest([v for level in names for v in level], parent)


PYTHAGOREAN_UNITS = [
    (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)),
    (Fraction(-1), Fraction(0)),
    (Fraction(0), Fraction(-1)),
    (Fraction(3, 5), Fraction(4, 5)),
    (Fraction(-3, 5), Fraction(4, 5)),
    (Fraction(5, 13), Fraction(-12, 13)),
    (Fraction(8, 17), Fraction(15, 17)),
]


def random_gaussian_weights(rng: Random, forest: DirectedForest):
    """Exact complex weights with rational moduli (unit phases times rationals)."""
    from .rationals import GaussianRational

    lam = {}
    for v in forest.vertices:
        if forest.is_root(v):
            lam[v] = GaussianRational(0, 0)
        else:
            re, im = PYTHAGOREAN_UNITS[rng.randrange(len(PYTHAGOREAN_UNITS))]
            r = rand_fraction(rng)
            lam[v] = GaussianRational(re * r, im * r)
    return lam


def random_complex_weights(rng: Random, forest: DirectedForest):
    """Float complex weights with random phases."""
    import cmath

    lam = {}
    for v in forest.vertices:
        if forest.is_root(v):
            lam[v] = 0j
        else:
            lam[v] = float(rand_fraction(rng)) * cmath.exp(2j * cmath.pi * rng.random())
    return lam
