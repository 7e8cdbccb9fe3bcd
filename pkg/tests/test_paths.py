import math
from fractions import Fraction

import pytest

from connsched.evaluate import check_feasible, make_schedule
from connsched.generators import (
    blocked_chain_instance,
    partition_chain,
    preemption_gap_instance,
    random_path_instance,
    staircase_instance,
)
from connsched.model import Objective, PreconditionError, Preemption, with_preemption
from connsched.oracles import brute_mixed, brute_nonpreemptive, SearchBudget
from connsched.paths import (
    exact_nonpreemptive_path,
    maintenance_profile,
    mixed_two_approx,
    split_nonpreemptive,
)
from connsched.preemptive import solve_preemptive
from helpers import path_instance


def preemptive_path(seed, edges=5):
    return random_path_instance(seed, edge_count=edges, max_window=6, max_p=3)


class TestMaintenanceProfile:
    def test_empty_schedule(self):
        inst = path_instance([(0, 3, 0)])
        profile = maintenance_profile(inst, make_schedule({"e1": []}))
        assert profile.active_time == 0 and profile.segments == ()

    def test_union_of_overlaps(self):
        inst = path_instance([(0, 3, 2), (0, 3, 2)])
        sched = make_schedule({"e1": [(0, 2)], "e2": [(1, 3)]})
        profile = maintenance_profile(inst, sched)
        assert profile.segments == ((0, 3),)
        assert profile.active_time == 3

    def test_blocked_chain_preemptive_optimum_active_three(self):
        inst = blocked_chain_instance(Preemption.ARBITRARY)
        schedule, value = solve_preemptive(inst, Objective.MAX_CONNECT)
        assert value == 1
        assert maintenance_profile(inst, schedule).active_time == 3

    def test_rejects_non_path(self):
        inst = preemption_gap_instance()
        with pytest.raises(PreconditionError):
            maintenance_profile(inst, make_schedule({e.id: [] for e in inst.edges}))


class TestSplitProcedure:
    def test_single_job_centered(self):
        inst = path_instance([(0, 4, 2)])
        pre = make_schedule({"e1": [(0, 1), (3, 4)]})  # split halves, midpoint lands at 3
        out = split_nonpreemptive(inst, pre)
        [(a, b)] = out.intervals("e1").intervals
        assert b - a == 2
        assert check_feasible(inst, out).feasible

    def test_tight_jobs_forced(self):
        inst = path_instance([(0, 2, 2), (2, 3, 1)])
        pre = make_schedule({"e1": [(0, 2)], "e2": [(2, 3)]})
        out = split_nonpreemptive(inst, pre)
        assert out.intervals("e1").intervals == ((0, 2),)
        assert out.intervals("e2").intervals == ((2, 3),)

    def cost_of(self, inst):
        pre_sched, active = solve_preemptive(inst, Objective.MIN_DISCONNECT)
        out = split_nonpreemptive(inst, pre_sched)
        report = check_feasible(inst, out)
        assert report.feasible
        for e in inst.edges:
            assert len(out.intervals(e.id).intervals) <= 1  # non-preemptive shape
        return active, maintenance_profile(inst, out).active_time

    def test_staircase_bound_and_lower_bound(self):
        inst = staircase_instance(3, 6)
        active, cost = self.cost_of(inst)
        assert active == 6  # preemptive optimum equals the scale
        edges = len(inst.edges)
        assert cost <= 2 * active * (math.floor(math.log2(edges)) + 1)
        brute = brute_nonpreemptive(
            with_preemption(inst, Preemption.NONE), Objective.MIN_DISCONNECT
        )
        assert brute.value >= Fraction(11 * 6, 6)  # harmonic lower bound for 3 levels
        assert cost >= brute.value

    def test_staircase_level_one_trivial(self):
        inst = staircase_instance(1, 2)
        active, cost = self.cost_of(inst)
        assert active == cost == 2

    def test_random_paths_bound(self):
        for seed in range(40):
            inst = preemptive_path(seed)
            active, cost = self.cost_of(inst)
            edges = len(inst.edges)
            assert cost <= 2 * active * (math.floor(math.log2(edges)) + 1), seed

    def test_rejects_non_path_and_infeasible(self):
        with pytest.raises(PreconditionError):
            split_nonpreemptive(preemption_gap_instance(), make_schedule({}))
        inst = path_instance([(0, 4, 2)])
        with pytest.raises(ValueError):
            split_nonpreemptive(inst, make_schedule({"e1": [(0, 1)]}))


class TestExactPath:
    def test_blocked_chain_never_connects(self):
        inst = blocked_chain_instance(Preemption.NONE)
        result = exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT)
        assert result.value == 4
        assert exact_nonpreemptive_path(inst, Objective.MAX_CONNECT).value == 0

    def test_single_job_costs_processing(self):
        inst = path_instance([(0, 5, 2)], mode=Preemption.NONE)
        assert exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT).value == 2

    def test_two_identical_jobs_stack(self):
        inst = path_instance([(0, 4, 2), (0, 4, 2)], mode=Preemption.NONE)
        result = exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT)
        assert result.value == 2

    def test_agrees_with_general_brute(self):
        for seed in range(25):
            inst = random_path_instance(seed, edge_count=4, max_window=4, max_p=2,
                                        preemption_mix=(0, 0, 1))
            fast = exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT)
            slow = brute_nonpreemptive(inst, Objective.MIN_DISCONNECT)
            assert fast.value == slow.value, seed

    def test_half_integral_paranoia_never_improves(self):
        for seed in range(12):
            inst = random_path_instance(seed, edge_count=4, max_window=4, max_p=2,
                                        preemption_mix=(0, 0, 1))
            whole = exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT)
            half = exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT, half_integral=True)
            assert whole.value == half.value, seed

    def test_budget_exceeded_reported(self):
        inst = path_instance([(0, 8, 1)] * 4, mode=Preemption.NONE)
        result = exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT, SearchBudget(5))
        assert result.exceeded and result.schedule is None

    def test_rejects_fractional_data(self):
        inst = path_instance([(0, Fraction(5, 2), 1)], mode=Preemption.NONE)
        with pytest.raises(PreconditionError):
            exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT)


class TestMixedTwoApprox:
    def test_all_preemptive_matches_optimal(self):
        inst = preemptive_path(2)
        _, expected = solve_preemptive(inst, Objective.MIN_DISCONNECT)
        _, got = mixed_two_approx(inst)
        assert got == expected

    def test_all_nonpreemptive_matches_exact(self):
        inst = random_path_instance(9, edge_count=4, max_window=4, max_p=2,
                                    preemption_mix=(0, 0, 1))
        expected = exact_nonpreemptive_path(inst, Objective.MIN_DISCONNECT).value
        _, got = mixed_two_approx(inst)
        assert got == expected

    @pytest.mark.parametrize("numbers", [[1, 1], [2, 2], [1, 3]])
    def test_partition_instances_within_factor_two(self, numbers):
        inst = partition_chain(numbers)
        opt = brute_mixed(inst, Objective.MIN_DISCONNECT).value
        _, got = mixed_two_approx(inst)
        assert opt <= got <= 2 * opt

    def test_rejects_integral_jobs(self):
        inst = path_instance([(0, 2, 1)], mode=Preemption.INTEGRAL)
        with pytest.raises(PreconditionError):
            mixed_two_approx(inst)
