"""Subnormality certificates and the extension constructions."""
from __future__ import annotations

import math
from fractions import Fraction as Fr
from random import Random

import pytest

from shiftlab.errors import (
    EmptyFamily,
    FrontierMismatch,
    MemberInfeasible,
    MemberNotExtendable,
    NotSubnormalInput,
    ScaleOutOfRange,
)
from shiftlab.forest import canonical_form, validate_forest
from shiftlab.generators import random_envelope, random_subnormal_shift
from shiftlab.hypo import check_power_hyponormal, make_counterexample
from shiftlab.measures import AtomicMeasure
from shiftlab.shifts import make_isometric, restrict, shift_norm_sq, vertex_measure
from shiftlab.subnormal import (
    backward_extension_feasible,
    check_subnormal,
    construct_backward_extension,
    join_at_depth,
    powerhypo_rooted_sum_extend,
    rooted_sum_extend,
)

from .conftest import chain_shift, unilateral


class TestCheckSubnormal:
    def test_isometric_point_masses(self, fork_tree):
        cert = check_subnormal(make_isometric(fork_tree))
        assert cert.holds()
        assert all(m == AtomicMeasure.point(1) for m in cert.measures.values())

    def test_excess_chain(self):
        cert = check_subnormal(chain_shift(2, tail_const=1))
        assert not cert.holds()
        assert cert.witness == "c0" and cert.excess == 1

    def test_geometric_chain(self):
        cert = check_subnormal(chain_shift(1, tail_const=2))
        assert cert.holds()
        assert cert.measures["c0"] == AtomicMeasure([(2, "1/2"), (0, "1/2")])

    def test_midchain_defect_blocks(self):
        # defect strictly inside the tree makes the parent infeasible
        cert = check_subnormal(chain_shift(1, 1, tail_const=2))
        assert not cert.holds() and cert.excess is math.inf

    def test_soundness_random(self):
        rng = Random(3)
        for _ in range(20):
            s = random_subnormal_shift(rng, core_max=8)
            cert = check_subnormal(s)
            assert cert.holds()
            for v, mu in cert.measures.items():
                for n in range(0, 2 * len(mu.atoms) + 5):
                    assert mu.moment(n) == s.moment(v, n)

    def test_restriction_stays_subnormal(self):
        rng = Random(5)
        for _ in range(10):
            s = random_subnormal_shift(rng, core_max=8)
            for v in s.forest.vertices:
                assert check_subnormal(restrict(s, v)).holds()

    def test_subnormal_implies_power_hyponormal(self):
        rng = Random(7)
        for _ in range(10):
            s = random_subnormal_shift(rng, core_max=8)
            assert check_power_hyponormal(s, 5).holds()


class TestFeasibility:
    def test_isometric_always_one(self, fork_tree):
        iso = make_isometric(fork_tree)
        for k in range(5):
            assert backward_extension_feasible(iso, k) == 1

    def test_atom_at_zero_infeasible(self):
        assert backward_extension_feasible(chain_shift(1, tail_const=2), 1) is None

    def test_doubling_chain(self):
        assert backward_extension_feasible(unilateral(constant_sq=2), 3) == Fr(1, 8)

    def test_not_subnormal_rejected(self):
        with pytest.raises(NotSubnormalInput):
            backward_extension_feasible(chain_shift(2, tail_const=1), 1)


class TestConstructExtension:
    def test_isometric_two_steps_unit_scale(self, fork_tree):
        ext, plan = construct_backward_extension(make_isometric(fork_tree), 2, scale=1)
        assert plan.edge_sq == (1, 1)
        assert shift_norm_sq(ext) == 1
        assert check_subnormal(ext).holds()

    def test_default_scale_doubling_chain(self):
        s = unilateral(constant_sq=2)
        ext, plan = construct_backward_extension(s, 1)
        assert plan.scale == 2 and plan.edge_sq == (2,)
        assert check_subnormal(ext).holds()

    def test_scale_out_of_range(self):
        with pytest.raises(ScaleOutOfRange):
            construct_backward_extension(unilateral(constant_sq=2), 1, scale=4)

    def test_moment_identities(self):
        rng = Random(11)
        done = 0
        while done < 15:
            s = random_subnormal_shift(rng, core_max=7, root_slack=False, core_min=2)
            k = rng.randint(1, 4)
            c0 = backward_extension_feasible(s, k)
            assert c0 is not None
            ext, plan = construct_backward_extension(s, k)
            done += 1
            new_root = ext.forest.roots[0]
            series = [ext.moment(new_root, j) for j in range(k + 1)]
            assert series[0] == 1
            assert series[k] == plan.scale
            # restriction brings back the original measures
            old_root = s.forest.roots[0]
            back = restrict(ext, old_root)
            for v in s.forest.vertices:
                assert vertex_measure(back, v).measure == vertex_measure(s, v).measure


class TestRootedSumExtend:
    def test_two_isometries_halves(self):
        u = unilateral()
        res = rooted_sum_extend([u, u], 0)
        assert res.theta_sq == (Fr(1, 2), Fr(1, 2))
        assert check_subnormal(res.shift).holds()

    def test_coefficient_identity_exact(self):
        rng = Random(13)
        for _ in range(10):
            members = [
                random_subnormal_shift(rng, core_max=6, root_slack=False, core_min=2)
                for _ in range(rng.randint(1, 4))
            ]
            k = rng.randint(0, 3)
            res = rooted_sum_extend(members, k)
            total = sum(a * c for a, c in zip(res.theta_sq, res.c_values))
            assert total == 1
            assert check_subnormal(res.shift).holds()
            if k >= 1:
                assert backward_extension_feasible(res.shift, k) is not None

    def test_norm_is_family_max(self):
        rng = Random(17)
        members = [random_subnormal_shift(rng, core_max=6, root_slack=False, core_min=2) for _ in range(3)]
        res = rooted_sum_extend(members, 1)
        assert shift_norm_sq(res.shift) == max(shift_norm_sq(m) for m in members)

    def test_member_with_zero_atom_infeasible(self):
        with pytest.raises(MemberInfeasible) as err:
            rooted_sum_extend([chain_shift(1, tail_const=2), unilateral()], 0)
        assert err.value.index == 0

    def test_not_subnormal_member(self):
        with pytest.raises(MemberInfeasible):
            rooted_sum_extend([chain_shift(2, tail_const=1)], 0)

    def test_empty_family(self):
        with pytest.raises(EmptyFamily):
            rooted_sum_extend([], 1)

    def test_isometric_family_joint_feasibility(self):
        u = unilateral()
        res = rooted_sum_extend([u, u, u], 3)
        assert backward_extension_feasible(res.shift, 3) == sum(res.theta_sq)


class TestJoinAtDepth:
    def test_two_envelopes_same_verdict_feasible(self):
        u = unilateral()
        env_chain = validate_forest(
            ["e0", "e1", "e2", "e3"], {"e0": "e0", "e1": "e0", "e2": "e1", "e3": "e1"}
        )
        env_fork = validate_forest(
            ["e0", "e1", "e2", "e3", "e4"],
            {"e0": "e0", "e1": "e0", "e2": "e0", "e3": "e1", "e4": "e2"},
        )
        assert not canonical_form(env_chain) == canonical_form(env_fork)
        ja = join_at_depth([u, u], env_chain, 2)
        jb = join_at_depth([u, u], env_fork, 2)
        assert check_subnormal(ja.shift).holds()
        assert check_subnormal(jb.shift).holds()

    def test_envelope_independence_randomized(self):
        rng = Random(19)
        for _ in range(10):
            k = rng.choice([2, 3])
            n = rng.randint(2, 4)
            feasible = rng.random() < 0.5
            members = [
                random_subnormal_shift(rng, core_max=5, root_slack=False, core_min=2) for _ in range(n)
            ]
            if not feasible:
                members[rng.randrange(n)] = chain_shift(1, tail_const=2)
            env_a = random_envelope(rng, n, k)
            env_b = random_envelope(rng, n, k)
            verdicts = []
            for env in (env_a, env_b):
                try:
                    join_at_depth(members, env, k)
                    verdicts.append(True)
                except MemberInfeasible:
                    verdicts.append(False)
            assert verdicts[0] == verdicts[1] == feasible

    def test_frontier_mismatch(self):
        u = unilateral()
        env = validate_forest(
            ["e0", "e1", "e2", "e3"], {"e0": "e0", "e1": "e0", "e2": "e1", "e3": "e1"}
        )
        with pytest.raises(FrontierMismatch):
            join_at_depth([u], env, 2)
        with pytest.raises(FrontierMismatch):
            join_at_depth([u, u, u], env, 2)

    def test_dead_end_envelope_rejected(self):
        u = unilateral()
        env = validate_forest(
            ["e0", "e1", "e2", "e3"], {"e0": "e0", "e1": "e0", "e2": "e0", "e3": "e1"}
        )
        with pytest.raises(FrontierMismatch):
            join_at_depth([u], env, 2)


class TestPowerhypoJoint:
    def test_two_isometric_members(self):
        u = unilateral()
        res = powerhypo_rooted_sum_extend([(u, 1), (u, 1)], 4)
        assert res.root_sq == (Fr(1, 4), Fr(1, 8))
        assert check_power_hyponormal(res.shift, 4).holds()

    def test_single_member_scaled(self):
        u = unilateral()
        res = powerhypo_rooted_sum_extend([(u, 1)], 3)
        assert len(res.root_sq) == 1
        assert check_power_hyponormal(res.shift, 3).holds()

    def test_counterexample_member_rejected(self):
        tree = validate_forest(
            ["r", "v1", "v2", "c2"], {"r": "r", "v1": "r", "v2": "v1", "c2": "v1"}
        )
        ce = make_counterexample(tree)
        with pytest.raises(MemberNotExtendable) as err:
            powerhypo_rooted_sum_extend([(ce.shift, Fr(1, 2))], 3)
        assert err.value.index == 0 and err.value.k == 2

    def test_explicit_scales_validated(self):
        u = unilateral()
        with pytest.raises(ValueError):
            powerhypo_rooted_sum_extend([(u, 1), (u, 1)], 2, scales_sq=[1, 1])
