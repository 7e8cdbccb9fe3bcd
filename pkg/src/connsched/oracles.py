"""Exhaustive exact solvers for desk-scale instances.

These are the ground truth that every approximation and gap test is checked
against. Searches run depth-first over integral placements, most-constrained
edge first, pruning with a partial-objective bound; exceeding the node budget
is a reported outcome, never a silently wrong answer.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _Q = Fraction

from .evaluate import Schedule, make_schedule
from .lp import GE, Constraint, LinearProgram, Variable, solve_lp
from .model import (
    Instance,
    PreconditionError,
    ValidationError,
    Objective,
    Preemption,
    is_integral,
    path_order,
    relevant_time_points,
    replace_jobs,
    validate,
)


@dataclass(frozen=True)
class SearchBudget:
    """Cap on explored search states; exceeding it aborts with a flag."""

    max_nodes: int = 2_000_000


@dataclass(frozen=True)
class BruteResult:
    schedule: Schedule | None
    value: Fraction | None
    nodes: int
    exceeded: bool = False


class _BudgetHit(Exception):
    pass


class _SweepEvaluator:
    """Connectivity sweep with adjacency built once, for tight search loops."""

    def __init__(self, instance: Instance):
        self.horizon = instance.horizon
        self.horizon_q = _Q(instance.horizon.numerator, instance.horizon.denominator)
        self.zero = _Q(0)
        self.source = instance.source
        self.sink = instance.sink
        self.adjacency: dict[str, list[tuple[str, str]]] = {n: [] for n in instance.nodes}
        for e in instance.edges:
            self.adjacency[e.u].append((e.v, e.id))
            self.adjacency[e.v].append((e.u, e.id))

    def reachable(self, blocked: set[str]) -> bool:
        if self.source == self.sink:
            return True
        seen = {self.source}
        frontier = [self.source]
        while frontier:
            node = frontier.pop()
            for nxt, eid in self.adjacency[node]:
                if eid in blocked or nxt in seen:
                    continue
                if nxt == self.sink:
                    return True
                seen.add(nxt)
                frontier.append(nxt)
        return False

    def partial_objective(self, placed: dict[str, list], maximize: bool) -> object:
        """Connected (or disconnected) measure when unplaced edges are always free.

        Placing more maintenance can only lower connectivity, so this is an
        upper bound for maximization and a lower bound for minimization.
        Endpoints are expected in the evaluator's fast rational type.
        """
        horizon = self.horizon_q
        events = {self.zero, horizon}
        for ivs in placed.values():
            for a, b in ivs:
                if a < horizon:
                    events.add(a)
                if b < horizon:
                    events.add(b)
        connected = self.zero
        points = sorted(events)
        for lo, hi in zip(points, points[1:]):
            mid = (lo + hi) / 2
            blocked = {
                eid
                for eid, ivs in placed.items()
                if any(a <= mid < b for a, b in ivs)
            }
            if self.reachable(blocked):
                connected += hi - lo
        return connected if maximize else horizon - connected


def _search(
    instance: Instance,
    objective: Objective,
    budget: SearchBudget | None,
    per_edge_choices: list[tuple[str, list[list[tuple[Fraction, Fraction]]]]],
) -> BruteResult:
    """Shared DFS: per_edge_choices lists (edge id, candidate interval sets)."""
    budget = budget or SearchBudget()
    maximize = objective is Objective.MAX_CONNECT
    evaluator = _SweepEvaluator(instance)
    fast_choices = [
        (eid, [[(_Q(a.numerator, a.denominator), _Q(b.numerator, b.denominator)) for a, b in ivs] for ivs in choices])
        for eid, choices in per_edge_choices
    ]
    best_value = None
    best_placed: dict[str, list] | None = None
    placed: dict[str, list] = {}
    nodes = 0

    def better(candidate) -> bool:
        if best_value is None:
            return True
        return candidate > best_value if maximize else candidate < best_value

    def recurse(depth: int) -> None:
        nonlocal nodes, best_value, best_placed
        bound = evaluator.partial_objective(placed, maximize)
        if best_value is not None:
            if maximize and bound <= best_value:
                return
            if not maximize and bound >= best_value:
                return
        if depth == len(fast_choices):
            if better(bound):
                best_value = bound
                best_placed = {eid: list(ivs) for eid, ivs in placed.items()}
            return
        eid, choices = fast_choices[depth]
        for intervals in choices:
            nodes += 1
            if nodes > budget.max_nodes:
                raise _BudgetHit
            placed[eid] = intervals
            recurse(depth + 1)
            del placed[eid]

    try:
        recurse(0)
    except _BudgetHit:
        return BruteResult(None, None, nodes, exceeded=True)
    assert best_value is not None and best_placed is not None
    assignment = {
        e.id: [
            (Fraction(a.numerator, a.denominator), Fraction(b.numerator, b.denominator))
            for a, b in best_placed.get(e.id, [])
        ]
        for e in instance.edges
    }
    value = Fraction(best_value.numerator, best_value.denominator)
    return BruteResult(make_schedule(assignment), value, nodes, exceeded=False)


def _by_window(instance: Instance) -> list:
    return sorted(instance.edges, key=lambda e: (e.deadline - e.release, e.id))


def brute_nonpreemptive(
    instance: Instance,
    objective: Objective,
    budget: SearchBudget | None = None,
    start_candidates: dict[str, list[Fraction]] | None = None,
) -> BruteResult:
    """Exact optimum over integral start times for non-preemptable jobs.

    `start_candidates` may restrict the searched starts per edge (used for
    instance families where a subset of starts is known to be lossless).
    """
    _require(instance, Preemption.NONE)
    per_edge = []
    for e in _by_window(instance):
        if e.processing == 0:
            continue
        if start_candidates and e.id in start_candidates:
            starts = start_candidates[e.id]
        else:
            starts = [Fraction(t) for t in range(int(e.release), int(e.latest_start) + 1)]
        per_edge.append((e.id, [[(s, s + e.processing)] for s in starts]))
    return _search(instance, objective, budget, per_edge)


def brute_integral_preemptive(
    instance: Instance, objective: Objective, budget: SearchBudget | None = None
) -> BruteResult:
    """Exact optimum when jobs may preempt only at integral time points."""
    _require(instance, Preemption.INTEGRAL)
    per_edge = []
    for e in _by_window(instance):
        if e.processing == 0:
            continue
        slots = range(int(e.release), int(e.deadline))
        combos = [
            [(Fraction(t), Fraction(t + 1)) for t in combo]
            for combo in itertools.combinations(slots, int(e.processing))
        ]
        per_edge.append((e.id, combos))
    return _search(instance, objective, budget, per_edge)


def _require(instance: Instance, mode: Preemption) -> None:
    report = validate(instance)
    if not report:
        raise ValidationError(f"invalid instance: {report.violations}")
    if not is_integral(instance):
        raise PreconditionError("exhaustive search requires integer releases, deadlines and processing times")
    for e in instance.edges:
        if e.preemptable is not mode:
            raise PreconditionError(f"edge {e.id}: expected preemption mode {mode.value}, got {e.preemptable.value}")


def fluid_min_busy(instance: Instance) -> Fraction:
    """Minimum busy time on a path when every job may be split arbitrarily.

    With unlimited parallel maintenance the only requirement on the busy set M
    is |M intersect window_e| >= p_e per edge, a covering problem over the
    atomic intervals between relevant time points.
    """
    if path_order(instance) is None:
        raise PreconditionError("busy-time covering applies to path instances only")
    points = relevant_time_points(instance)
    widths = [(points[i - 1], points[i]) for i in range(1, len(points))]
    variables = [
        Variable(f"m{i}", Fraction(0), hi - lo) for i, (lo, hi) in enumerate(widths, start=1)
    ]
    constraints = []
    for e in instance.edges:
        if e.processing == 0:
            continue
        coeffs = {}
        for i, (lo, hi) in enumerate(widths, start=1):
            inside = e.release <= lo and hi <= e.deadline
            assert inside or hi <= e.release or lo >= e.deadline
            if inside:
                coeffs[f"m{i}"] = Fraction(1)
        constraints.append(Constraint(coeffs, GE, e.processing))
    lp = LinearProgram("min", {v.name: Fraction(1) for v in variables}, tuple(variables), tuple(constraints))
    out = solve_lp(lp)
    assert out.status == "optimal"
    return out.value


def brute_mixed(
    instance: Instance,
    objective: Objective,
    budget: SearchBudget | None = None,
    half_integral: bool = False,
) -> BruteResult:
    """Exact mixed-preemption optimum on a path.

    Enumerates integral starts for the non-preemptable jobs; each placement
    pins those jobs to tight windows, leaving a purely preemptive subproblem
    whose busy time is the covering optimum. Exactness for the non-preemptive
    part rests on integral starts being optimal for integer data; the
    half-integral mode doubles the start grid as a cross-check.
    """
    report = validate(instance)
    if not report:
        raise ValidationError(f"invalid instance: {report.violations}")
    if path_order(instance) is None:
        raise PreconditionError("brute_mixed runs on path instances only")
    if not is_integral(instance):
        raise PreconditionError("brute_mixed requires integer data")
    if any(e.preemptable is Preemption.INTEGRAL for e in instance.edges):
        raise PreconditionError("brute_mixed handles arbitrary or no preemption, not integral")
    budget = budget or SearchBudget()

    np_edges = [e for e in _by_window(instance) if e.preemptable is Preemption.NONE and e.processing > 0]
    step = Fraction(1, 2) if half_integral else Fraction(1)

    best_busy: Fraction | None = None
    best_starts: dict[str, Fraction] | None = None
    starts: dict[str, Fraction] = {}
    nodes = 0

    def tightened() -> Instance:
        # placed jobs become tight windows; a tight job has no freedom, so
        # downgrading everything to arbitrary preemption changes nothing
        jobs = []
        for e in instance.edges:
            if e.id in starts:
                s = starts[e.id]
                jobs.append(replace(e, release=s, deadline=s + e.processing, preemptable=Preemption.ARBITRARY))
            else:
                jobs.append(replace(e, preemptable=Preemption.ARBITRARY))
        return replace_jobs(instance, jobs)

    def busy_of_placed() -> Fraction:
        segs: list[tuple[Fraction, Fraction]] = []
        for eid, s in starts.items():
            p = instance.edge(eid).processing
            segs.append((s, s + p))
        segs.sort()
        total = Fraction(0)
        cursor = None
        for a, b in segs:
            if cursor is None or a > cursor:
                total += b - a
                cursor = b
            elif b > cursor:
                total += b - cursor
                cursor = b
        return total

    def recurse(depth: int) -> None:
        nonlocal nodes, best_busy, best_starts
        if best_busy is not None and busy_of_placed() >= best_busy:
            return
        if depth == len(np_edges):
            busy = fluid_min_busy(tightened())
            if best_busy is None or busy < best_busy:
                best_busy = busy
                best_starts = dict(starts)
            return
        e = np_edges[depth]
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
    assert best_busy is not None and best_starts is not None

    from .preemptive import solve_preemptive  # deferred: avoids a cycle at import time

    starts = dict(best_starts)
    final_instance = tightened()
    schedule, disconnected = solve_preemptive(final_instance, Objective.MIN_DISCONNECT)
    assert disconnected == best_busy, (disconnected, best_busy)
    value = disconnected if objective is Objective.MIN_DISCONNECT else instance.horizon - disconnected
    return BruteResult(schedule, value, nodes, exceeded=False)
