"""Candidate-schedule approximation for non-preemptive connectivity maximization.

The distinct latest start times d_e - p_e cut the horizon into at most l+1
windows. For each window there is one candidate schedule that provably
maximizes connectivity inside it: jobs whose latest start lies before the
window are anchored at their release date, all others at their latest start.
The best-scoring candidate is an (l+1)-approximation of the overall optimum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .evaluate import Schedule, connected_time, make_schedule, reachable
from .model import Instance, PreconditionError, Preemption, ValidationError, validate


@dataclass(frozen=True)
class CandidateFamily:
    cut_points: tuple[Fraction, ...]  # t_0 = 0, t_1 < .. < t_l, t_{l+1} = T
    schedules: tuple[Schedule, ...]
    scores: tuple[Fraction, ...]


def _require_nonpreemptive(instance: Instance) -> None:
    report = validate(instance)
    if not report:
        raise ValidationError(f"invalid instance: {report.violations}")
    for e in instance.edges:
        if e.preemptable is not Preemption.NONE:
            raise PreconditionError(f"edge {e.id} is preemptable; this solver is non-preemptive only")


def latest_start_points(instance: Instance) -> list[Fraction]:
    """Sorted distinct values of deadline minus processing time."""
    return sorted({e.latest_start for e in instance.edges})


def cut_points(instance: Instance) -> list[Fraction]:
    return [Fraction(0)] + latest_start_points(instance) + [instance.horizon]


def build_candidate(instance: Instance, i: int) -> Schedule:
    """Candidate S_i: late anchors for jobs still startable at t_i, early otherwise."""
    points = cut_points(instance)
    if not 1 <= i <= len(points) - 1:
        raise ValueError(f"candidate index {i} out of range")
    t_i = points[i]
    assignment = {}
    for e in instance.edges:
        start = e.release if e.latest_start < t_i else e.latest_start
        assignment[e.id] = [(start, start + e.processing)] if e.processing > 0 else []
    return make_schedule(assignment)


def score_candidate(instance: Instance, schedule: Schedule, window: tuple[Fraction, Fraction]) -> Fraction:
    """Connected measure of the schedule inside the window.

    The window is partitioned at every release, completion-if-started-early and
    deadline; reachability is tested at subinterval midpoints.
    """
    lo, hi = window
    if lo >= hi:
        return Fraction(0)
    bounds = {lo, hi}
    for e in instance.edges:
        for p in (e.release, e.release + e.processing, e.deadline):
            if lo < p < hi:
                bounds.add(p)
    points = sorted(bounds)
    score = Fraction(0)
    for a, b in zip(points, points[1:]):
        mid = (a + b) / 2
        blocked = frozenset(e.id for e in instance.edges if schedule.intervals(e.id).covers(mid))
        if reachable(instance, blocked):
            score += b - a
    return score


def candidate_family(instance: Instance) -> CandidateFamily:
    points = cut_points(instance)
    schedules = []
    scores = []
    for i in range(1, len(points)):
        sched = build_candidate(instance, i)
        schedules.append(sched)
        scores.append(score_candidate(instance, sched, (points[i - 1], points[i])))
    return CandidateFamily(tuple(points), tuple(schedules), tuple(scores))


def approx_max_connectivity(instance: Instance) -> tuple[Schedule, Fraction, Fraction]:
    """Returns (schedule, window score used as the guarantee, full connected time).

    The optimum is at most (l+1) times the returned score, l being the number
    of distinct latest start times. Ties pick the earliest candidate.
    """
    _require_nonpreemptive(instance)
    family = candidate_family(instance)
    best = max(range(len(family.scores)), key=lambda idx: (family.scores[idx], -idx))
    schedule = family.schedules[best]
    return schedule, family.scores[best], connected_time(instance, schedule)
