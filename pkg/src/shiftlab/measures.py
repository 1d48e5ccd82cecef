"""Finite atomic measures on [0, inf) and Stieltjes moment machinery."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidMomentSequence, NotProbability
from .posdef import is_psd, principal_minor_det
from .rationals import RatioLike, parse_ratio


class AtomicMeasure:
    """Finite nonnegative combination of point masses; atoms sorted and distinct."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[tuple[RatioLike, RatioLike]] = ()):
        merged: dict[Fraction, Fraction] = {}
        for t, w in atoms:
            t = parse_ratio(t)
            w = parse_ratio(w)
            if t < 0:
                raise ValueError("atoms must sit in [0, inf)")
            if w < 0:
                raise ValueError("masses must be nonnegative")
            if w == 0:
                continue
            merged[t] = merged.get(t, Fraction(0)) + w
        object.__setattr__(self, "atoms", tuple(sorted(merged.items())))

    def __setattr__(self, name, value):
        raise AttributeError("AtomicMeasure is immutable")

    def __eq__(self, other):
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        body = " + ".join(f"{w}*d[{t}]" for t, w in self.atoms)
        return f"AtomicMeasure({body or '0'})"

    @classmethod
    def point(cls, t: RatioLike, w: RatioLike = 1) -> "AtomicMeasure":
        return cls([(t, w)])

    @classmethod
    def zero(cls) -> "AtomicMeasure":
        return cls()

    def total_mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    def mass_at_zero(self) -> Fraction:
        for t, w in self.atoms:
            if t == 0:
                return w
        return Fraction(0)

    def moment(self, n: int) -> Fraction:
        """n-th power moment with the 0**0 = 1 convention."""
        if n < 0:
            raise ValueError("use neg_moment for negative orders")
        return sum((w * t**n for t, w in self.atoms), Fraction(0))

    def neg_moment(self, k: int):
        """Integral of t**-k; infinite when the measure charges zero."""
        if k < 1:
            raise ValueError("k must be positive")
        if self.mass_at_zero() > 0:
            return math.inf
        return sum((w / t**k for t, w in self.atoms), Fraction(0))

    def scaled(self, c: RatioLike) -> "AtomicMeasure":
        c = parse_ratio(c)
        if c < 0:
            raise ValueError("scale must be nonnegative")
        return AtomicMeasure([(t, c * w) for t, w in self.atoms])

    def positive_part(self) -> "AtomicMeasure":
        return AtomicMeasure([(t, w) for t, w in self.atoms if t > 0])


def mixture(parts: Sequence[tuple[RatioLike, AtomicMeasure]]) -> AtomicMeasure:
    """Nonnegative combination; moments are the matching combination of moments."""
    atoms: list[tuple[Fraction, Fraction]] = []
    for coeff, m in parts:
        coeff = parse_ratio(coeff)
        if coeff < 0:
            raise ValueError("mixture coefficients must be nonnegative")
        if coeff == 0:
            continue
        atoms.extend((t, coeff * w) for t, w in m.atoms)
    return AtomicMeasure(atoms)


def neg_moment(m: AtomicMeasure, k: int):
    return m.neg_moment(k)


class MomentSeq:
    """Finite prefix of a candidate Stieltjes moment sequence."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable[RatioLike]):
        vals = tuple(parse_ratio(x) for x in values)
        if not vals:
            raise InvalidMomentSequence("a moment sequence needs at least one entry")
        if any(x < 0 for x in vals):
            raise InvalidMomentSequence("moments must be nonnegative")
        # a zero anywhere past index 0 forces zeros from index 1 on
        if any(x == 0 for x in vals[1:]) and any(x != 0 for x in vals[1:]):
            raise InvalidMomentSequence("zeros must propagate through all positive orders")
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):
        raise AttributeError("MomentSeq is immutable")

    def __eq__(self, other):
        if not isinstance(other, MomentSeq):
            return NotImplemented
        return self.values == other.values

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def __repr__(self):
        return f"MomentSeq({list(self.values)})"


def moments_of(m: AtomicMeasure, n_max: int) -> MomentSeq:
    """Exact power moments of an atomic measure up to order n_max."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    return MomentSeq([m.moment(n) for n in range(n_max + 1)])


class HankelVerdict:
    __slots__ = ("consistent", "upto", "witness_indices", "witness_det")

    def __init__(self, consistent, upto=None, witness_indices=None, witness_det=None):
        object.__setattr__(self, "consistent", consistent)
        object.__setattr__(self, "upto", upto)
        object.__setattr__(self, "witness_indices", witness_indices)
        object.__setattr__(self, "witness_det", witness_det)

    def __setattr__(self, name, value):
        raise AttributeError("HankelVerdict is immutable")

    def __repr__(self):
        if self.consistent:
            return f"HankelVerdict(consistent up to {self.upto})"
        return f"HankelVerdict(inconsistent, minor {self.witness_indices}, det {self.witness_det})"


def hankel_check(seq: MomentSeq) -> HankelVerdict:
    """Necessary Stieltjes test: both shifted Hankel matrices must be PSD.

    An inconsistency certifies the prefix is not a moment sequence and comes
    with an explicit negative principal minor; consistency is necessary only.
    """
    n = len(seq) - 1
    for offset in (0, 1):
        size = (n - offset) // 2 + 1
        if size < 1:
            continue
        mat = [[seq[i + j + offset] for j in range(size)] for i in range(size)]
        ok, witness = is_psd(mat)
        if not ok:
            det = principal_minor_det(mat, witness)
            shifted = tuple(witness)
            return HankelVerdict(False, None, {"offset": offset, "indices": shifted}, det)
    return HankelVerdict(True, upto=n)


def determinacy_guard(seq: MomentSeq, norm_sq_bound: RatioLike) -> bool:
    """Growth certificate making the representing measure unique.

    Checks the even entries against the geometric envelope
    ``a_{2n} <= r^{2n} * a_0`` with ``r`` the squared operator norm.
    """
    r = parse_ratio(norm_sq_bound)
    if r < 0:
        raise ValueError("norm bound must be nonnegative")
    a0 = seq[0]
    for n in range(0, (len(seq) - 1) // 2 + 1):
        if seq[2 * n] > r ** (2 * n) * a0:
            return False
    return True


class BackwardMoments:
    """Result of a k-step backward extension of a moment prefix."""

    __slots__ = ("k", "prefix", "measure")

    def __init__(self, k: int, prefix: tuple[Fraction, ...], measure: AtomicMeasure):
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "measure", measure)

    def __setattr__(self, name, value):
        raise AttributeError("BackwardMoments is immutable")

    def __repr__(self):
        return f"BackwardMoments(k={self.k}, prefix={list(self.prefix)})"


def backward_extend_moments(
    m: AtomicMeasure, k: int, require_probability: bool = True
) -> BackwardMoments | None:
    """Extend the moments of ``m`` by k earlier terms normalized to one.

    Feasible exactly when the inverse k-th moment is at most one; the
    extending measure divides out t**k and parks the slack at zero.  Returns
    None when infeasible.  The probability requirement can be lifted for
    internal pre-scaled uses.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if require_probability and m.total_mass() != 1:
        raise NotProbability(f"total mass is {m.total_mass()}, expected 1")
    c = m.neg_moment(k)
    if c is math.inf or c > 1:
        return None
    atoms = [(t, w / t**k) for t, w in m.atoms]
    if c < 1:
        atoms.append((Fraction(0), 1 - c))
    mu_k = AtomicMeasure(atoms)
    prefix = tuple(mu_k.moment(k - j) for j in range(k, 0, -1))
    return BackwardMoments(k, prefix, mu_k)
