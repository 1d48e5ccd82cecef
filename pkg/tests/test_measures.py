"""Atomic measures, moment sequences, Hankel tests, backward extension."""
from __future__ import annotations

import math
from fractions import Fraction as Fr
from random import Random

import pytest

from shiftlab.errors import InvalidMomentSequence, NotProbability
from shiftlab.generators import rand_fraction
from shiftlab.measures import (
    AtomicMeasure,
    MomentSeq,
    backward_extend_moments,
    determinacy_guard,
    hankel_check,
    mixture,
    moments_of,
    neg_moment,
)
from shiftlab.posdef import is_psd, principal_minor_det


def random_measure(rng: Random, max_atoms: int = 4) -> AtomicMeasure:
    return AtomicMeasure(
        [(rand_fraction(rng), rand_fraction(rng)) for _ in range(rng.randint(1, max_atoms))]
    )


class TestMoments:
    def test_point_mass_all_ones(self):
        assert moments_of(AtomicMeasure.point(1), 5).values == (1,) * 6

    def test_two_atoms(self):
        m = AtomicMeasure([(1, "1/2"), (4, "1/2")])
        assert moments_of(m, 3).values == (1, Fr(5, 2), Fr(17, 2), Fr(65, 2))

    def test_zero_measure(self):
        assert moments_of(AtomicMeasure.zero(), 4).values == (0,) * 5

    def test_zero_to_the_zero_is_one(self):
        assert AtomicMeasure.point(0).moment(0) == 1
        assert AtomicMeasure.point(0).moment(3) == 0


class TestMomentSeq:
    def test_rejects_negative(self):
        with pytest.raises(InvalidMomentSequence):
            MomentSeq([1, -1])

    def test_zero_propagation_enforced(self):
        with pytest.raises(InvalidMomentSequence):
            MomentSeq([1, 0, 5])
        MomentSeq([1, 0, 0, 0])
        MomentSeq([0, 0, 0])


class TestHankel:
    def test_delta_one_consistent(self):
        assert hankel_check(MomentSeq([1, 1, 1, 1])).consistent

    def test_1_2_3_inconsistent_with_witness(self):
        verdict = hankel_check(MomentSeq([1, 2, 3]))
        assert not verdict.consistent
        assert verdict.witness_det == -1

    def test_measures_always_pass(self):
        rng = Random(17)
        for _ in range(25):
            m = random_measure(rng)
            assert hankel_check(moments_of(m, rng.randint(2, 9))).consistent

    def test_witness_minor_is_negative(self):
        rng = Random(19)
        found = 0
        while found < 10:
            vals = sorted(rand_fraction(rng) for _ in range(5))
            try:
                seq = MomentSeq(vals)
            except InvalidMomentSequence:
                continue
            verdict = hankel_check(seq)
            if verdict.consistent:
                continue
            found += 1
            assert verdict.witness_det < 0

    def test_psd_module_agrees_with_minors(self):
        rng = Random(23)
        for _ in range(40):
            n = rng.randint(1, 4)
            sym = [[rand_fraction(rng) - 1 for _ in range(n)] for _ in range(n)]
            for i in range(n):
                for j in range(i):
                    sym[i][j] = sym[j][i]
            ok, witness = is_psd(sym)
            if not ok:
                assert principal_minor_det(sym, witness) < 0


class TestNegMoment:
    def test_point_4(self):
        assert neg_moment(AtomicMeasure.point(4), 1) == Fr(1, 4)

    def test_atom_at_zero_infinite(self):
        m = AtomicMeasure([(0, "1/2"), (1, "1/2")])
        assert neg_moment(m, 1) is math.inf
        assert neg_moment(m, 5) is math.inf

    def test_delta_one_any_order(self):
        assert neg_moment(AtomicMeasure.point(1), 7) == 1


class TestBackwardExtend:
    def test_delta_one_three_steps(self):
        ext = backward_extend_moments(AtomicMeasure.point(1), 3)
        assert ext.prefix == (1, 1, 1)
        assert ext.measure == AtomicMeasure.point(1)

    def test_delta_four_one_step(self):
        ext = backward_extend_moments(AtomicMeasure.point(4), 1)
        assert ext.measure == AtomicMeasure([(4, "1/4"), (0, "3/4")])
        assert ext.prefix == (1,)
        assert ext.measure.moment(1) == 1

    def test_mixed_two_step_feasible(self):
        m = AtomicMeasure([(1, "1/2"), (4, "1/2")])
        assert neg_moment(m, 2) == Fr(17, 32)
        assert backward_extend_moments(m, 2) is not None

    def test_infeasible_when_inverse_moment_large(self):
        m = AtomicMeasure.point("1/4")
        assert backward_extend_moments(m, 1) is None

    def test_probability_required(self):
        with pytest.raises(NotProbability):
            backward_extend_moments(AtomicMeasure.point(1, 2), 1)

    def test_round_trip_restores_moments(self):
        rng = Random(29)
        done = 0
        while done < 20:
            m = random_measure(rng)
            m = m.scaled(1 / m.total_mass())
            k = rng.randint(1, 4)
            ext = backward_extend_moments(m, k)
            if ext is None:
                continue
            done += 1
            for n in range(0, 8):
                assert ext.measure.moment(n + k) == m.moment(n)
            assert ext.prefix[0] == 1
            # extended run is itself a moment prefix
            run = list(ext.prefix) + [m.moment(n) for n in range(6)]
            assert hankel_check(MomentSeq(run)).consistent


class TestMixture:
    def test_merges_atoms(self):
        m = mixture([(Fr(1, 2), AtomicMeasure.point(1)), (Fr(1, 2), AtomicMeasure.point(1))])
        assert m == AtomicMeasure.point(1)

    def test_drops_zero_coefficients(self):
        m = mixture([(1, AtomicMeasure.point(2)), (0, AtomicMeasure.point(5))])
        assert m == AtomicMeasure.point(2)

    def test_linearity_of_moments(self):
        rng = Random(37)
        for _ in range(20):
            parts = [(rand_fraction(rng), random_measure(rng)) for _ in range(rng.randint(1, 6))]
            mixed = mixture(parts)
            for n in range(0, 7):
                want = sum((c * m.moment(n) for c, m in parts), Fr(0))
                assert mixed.moment(n) == want

    def test_index_shift_measure(self):
        # x^k d(mu) represents the k-shifted moment sequence
        rng = Random(43)
        for _ in range(10):
            m = random_measure(rng)
            k = rng.randint(1, 3)
            shifted = AtomicMeasure([(t, w * t**k) for t, w in m.atoms])
            for n in range(0, 6):
                assert shifted.moment(n) == m.moment(n + k)


class TestDeterminacy:
    def test_isometric_moments(self):
        assert determinacy_guard(MomentSeq([1, 1, 1, 1, 1]), 1)

    def test_growth_bound_respected(self):
        rng = Random(47)
        for _ in range(10):
            m = random_measure(rng)
            bound = max((t for t, _ in m.atoms), default=Fr(0))
            seq = moments_of(m, 8)
            if m.total_mass() <= 1:
                assert determinacy_guard(seq, bound)

    def test_violation_detected(self):
        assert not determinacy_guard(MomentSeq([1, 1, 9]), 1)
