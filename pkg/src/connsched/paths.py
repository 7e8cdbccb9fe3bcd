"""Solvers specialised to path networks.

On a path, one maintained edge disconnects the terminals, so disconnected
time equals the measure of the union of all maintenance (the busy time of an
unbounded-parallelism machine). This module provides the maintenance profile,
a halving split procedure that converts an optimal preemptive schedule into a
non-preemptive one at a logarithmic cost factor, an exact search for the
non-preemptive optimum, and the two-piece approximation for mixed instances.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .evaluate import Schedule, check_feasible, disconnected_time, make_schedule
from .model import (
    Edge,
    Instance,
    Objective,
    PreconditionError,
    Preemption,
    ValidationError,
    is_integral,
    path_order,
    replace_jobs,
    validate,
)
from .oracles import BruteResult, SearchBudget, _BudgetHit
from .preemptive import solve_preemptive


@dataclass(frozen=True)
class MaintenanceProfile:
    """Indicator step function of "some edge is under maintenance"."""

    segments: tuple[tuple[Fraction, Fraction], ...]  # merged, positive length
    active_time: Fraction


def _merged_segments(pairs) -> list[tuple[Fraction, Fraction]]:
    out: list[tuple[Fraction, Fraction]] = []
    for a, b in sorted(pairs):
        if a >= b:
            continue
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def maintenance_profile(instance: Instance, schedule: Schedule) -> MaintenanceProfile:
    """Union of all maintenance; on a path its measure is the disconnected time."""
    if path_order(instance) is None:
        raise PreconditionError("maintenance profiles are defined for path instances only")
    report = check_feasible(instance, schedule)
    if not report:
        raise ValidationError(f"infeasible schedule: {report.violations}")
    segments = _merged_segments(
        iv for e in instance.edges for iv in schedule.intervals(e.id).intervals
    )
    active = sum((b - a for a, b in segments), Fraction(0))
    return MaintenanceProfile(tuple(segments), active)


def split_nonpreemptive(instance: Instance, preemptive_schedule: Schedule) -> Schedule:
    """Non-preemptive schedule from a preemptive one by recursive halving.

    Find the earliest time where half of the remaining maintenance mass is
    done, schedule every job whose window straddles it centered there (clamped
    into its window), then recurse on the jobs entirely left and entirely
    right of the split point. Output cost is within 2*(floor(log2 |E|) + 1)
    times the input's active time.
    """
    if path_order(instance) is None:
        raise PreconditionError("the split procedure runs on path instances only")
    report = check_feasible(instance, preemptive_schedule)
    if not report:
        raise ValidationError(f"infeasible input schedule: {report.violations}")

    result: dict[str, list[tuple[Fraction, Fraction]]] = {}

    def recurse(subset: list[Edge]) -> None:
        if not subset:
            return
        segments = _merged_segments(
            iv for e in subset for iv in preemptive_schedule.intervals(e.id).intervals
        )
        active = sum((b - a for a, b in segments), Fraction(0))
        if active == 0:
            for e in subset:
                assert e.processing == 0
                result[e.id] = []
            return
        half = active / 2
        acc = Fraction(0)
        t_bar = None
        for a, b in segments:
            if acc + (b - a) >= half:
                t_bar = a + (half - acc)
                break
            acc += b - a
        assert t_bar is not None
        straddling = [e for e in subset if e.release <= t_bar <= e.deadline]
        assert straddling, "the split point always hits some job's window"
        for e in straddling:
            start = t_bar - e.processing / 2
            if start < e.release:
                start = e.release
            elif start + e.processing > e.deadline:
                start = e.deadline - e.processing
            result[e.id] = [(start, start + e.processing)] if e.processing > 0 else []
        recurse([e for e in subset if e.deadline < t_bar])
        recurse([e for e in subset if e.release > t_bar])

    recurse(list(instance.edges))
    assert set(result) == {e.id for e in instance.edges}
    schedule = make_schedule(result)
    assert check_feasible(instance, schedule).feasible
    return schedule


def exact_nonpreemptive_path(
    instance: Instance,
    objective: Objective,
    budget: SearchBudget | None = None,
    half_integral: bool = False,
) -> BruteResult:
    """Exact non-preemptive optimum on a path by branch and bound over starts.

    Integer data is required; starts are searched on the integral grid, where
    an optimal solution is known to exist. `half_integral` doubles the grid as
    a paranoia cross-check of that assumption.
    """
    if path_order(instance) is None:
        raise PreconditionError("this solver runs on path instances only")
    report = validate(instance)
    if not report:
        raise ValidationError(f"invalid instance: {report.violations}")
    if not is_integral(instance):
        raise PreconditionError("exact search requires integer releases, deadlines and processing times")
    for e in instance.edges:
        if e.preemptable is not Preemption.NONE:
            raise PreconditionError(f"edge {e.id} is preemptable; this solver is non-preemptive only")
    budget = budget or SearchBudget()
    step = Fraction(1, 2) if half_integral else Fraction(1)

    jobs = sorted(
        (e for e in instance.edges if e.processing > 0),
        key=lambda e: (e.deadline - e.release, e.id),
    )
    best_busy: Fraction | None = None
    best_starts: dict[str, Fraction] = {}
    starts: dict[str, Fraction] = {}
    nodes = 0

    def busy(segs: list[tuple[Fraction, Fraction]]) -> Fraction:
        total = Fraction(0)
        cursor = None
        for a, b in sorted(segs):
            if cursor is None or a > cursor:
                total += b - a
                cursor = b
            elif b > cursor:
                total += b - cursor
                cursor = b
        return total

    def recurse(depth: int) -> None:
        nonlocal nodes, best_busy, best_starts
        placed_busy = busy([(s, s + instance.edge(eid).processing) for eid, s in starts.items()])
        if best_busy is not None and placed_busy >= best_busy:
            return
        if depth == len(jobs):
            best_busy = placed_busy
            best_starts = dict(starts)
            return
        e = jobs[depth]
        s = e.release
        while s <= e.latest_start:
            nodes += 1
            if nodes > budget.max_nodes:
                raise _BudgetHit
            starts[e.id] = s
            recurse(depth + 1)
            del starts[e.id]
            s += step

    try:
        recurse(0)
    except _BudgetHit:
        return BruteResult(None, None, nodes, exceeded=True)
    assert best_busy is not None
    assignment = {
        e.id: ([(best_starts[e.id], best_starts[e.id] + e.processing)] if e.processing > 0 else [])
        for e in instance.edges
    }
    schedule = make_schedule(assignment)
    value = best_busy if objective is Objective.MIN_DISCONNECT else instance.horizon - best_busy
    return BruteResult(schedule, value, nodes, exceeded=False)


def mixed_two_approx(instance: Instance, budget: SearchBudget | None = None) -> tuple[Schedule, Fraction]:
    """Disconnection-minimizing 2-approximation for mixed preemption on a path.

    Solves the arbitrarily-preemptable jobs and the non-preemptable jobs as
    two separate exact subproblems and overlays the schedules; the overlay
    disconnects for at most twice the mixed optimum.
    """
    if path_order(instance) is None:
        raise PreconditionError("the mixed approximation runs on path instances only")
    report = validate(instance)
    if not report:
        raise ValidationError(f"invalid instance: {report.violations}")
    if any(e.preemptable is Preemption.INTEGRAL for e in instance.edges):
        raise PreconditionError("mixed instances may not contain integrally-preemptable jobs")

    def restricted(keep: Preemption) -> Instance:
        jobs = []
        for e in instance.edges:
            if e.preemptable is keep:
                jobs.append(e)
            else:
                # edge stays in the graph but carries no work
                jobs.append(
                    replace(e, release=Fraction(0), deadline=instance.horizon,
                            processing=Fraction(0), preemptable=keep)
                )
        return replace_jobs(instance, jobs)

    sched_p, _ = solve_preemptive(restricted(Preemption.ARBITRARY), Objective.MIN_DISCONNECT)
    np_result = exact_nonpreemptive_path(restricted(Preemption.NONE), Objective.MIN_DISCONNECT, budget)
    if np_result.exceeded:
        raise RuntimeError("non-preemptive subproblem exceeded the search budget")

    combined = {
        e.id: list(
            (sched_p if e.preemptable is Preemption.ARBITRARY else np_result.schedule)
            .intervals(e.id).intervals
        )
        for e in instance.edges
    }
    schedule = make_schedule(combined)
    return schedule, disconnected_time(instance, schedule)
