"""Optimal preemptive scheduling on arbitrary graphs via an interval flow LP.

The horizon is cut at the relevant time points (releases and deadlines). Per
interval, availability is modelled as an s+/s- flow over both orientations of
every edge; a coupling constraint reserves enough unavailability inside each
job's window for its processing time. The LP optimum is then turned into an
actual schedule: cancel circulations, decompose each interval's flow into
paths, reserve one connectivity slot per path, and pour each job's processing
greedily into its earliest free time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .evaluate import Schedule, connectivity_profile, make_schedule, reachable
from .lp import LE, EQ, GE, Constraint, LinearProgram, LpOutcome, Variable, solve_lp
from .model import (
    PreconditionError,
    ValidationError,
    Instance,
    Objective,
    Preemption,
    normalize_parallel_edges,
    relevant_time_points,
    validate,
)


@dataclass(frozen=True)
class IntervalIndex:
    """Intervals I_1..I_k between consecutive relevant time points."""

    boundaries: tuple[Fraction, ...]

    @property
    def k(self) -> int:
        return len(self.boundaries) - 1

    def interval(self, i: int) -> tuple[Fraction, Fraction]:
        """1-based interval I_i = [t_{i-1}, t_i]."""
        return (self.boundaries[i - 1], self.boundaries[i])

    def width(self, i: int) -> Fraction:
        lo, hi = self.interval(i)
        return hi - lo


@dataclass(frozen=True)
class IntervalFlow:
    """LP solution split into per-interval flow values."""

    index: IntervalIndex
    f: tuple[Fraction, ...]  # availability fraction per interval, 1-based via f[i-1]
    y: Mapping[tuple[str, int], Fraction]  # (edge id, interval) -> availability
    x: Mapping[tuple[str, str, int], Fraction]  # (tail, head, interval) -> arc flow


@dataclass(frozen=True)
class PathDecomposition:
    """Per interval: ordered (node tuple, value) pairs with positive value."""

    paths: tuple[tuple[tuple[tuple[str, ...], Fraction], ...], ...]

    def for_interval(self, i: int) -> tuple[tuple[tuple[str, ...], Fraction], ...]:
        return self.paths[i - 1]


def _fname(i: int) -> str:
    return f"f{i}"


def _yname(edge_id: str, i: int) -> str:
    return f"y[{edge_id},{i}]"


def _xname(u: str, v: str, i: int) -> str:
    return f"x[{u}>{v},{i}]"


def _require_normalized(instance: Instance) -> None:
    report = validate(instance)
    if not report:
        raise ValidationError(f"invalid instance: {report.violations}")


def build_connectivity_lp(instance: Instance) -> tuple[LinearProgram, IntervalIndex]:
    """The availability-flow LP whose optimum is the best preemptive connectivity."""
    _require_normalized(instance)
    points = relevant_time_points(instance)
    index = IntervalIndex(tuple(points))
    k = index.k
    one = Fraction(1)

    variables: list[Variable] = []
    for i in range(1, k + 1):
        variables.append(Variable(_fname(i), Fraction(0), one))
    for e in instance.edges:
        for i in range(1, k + 1):
            variables.append(Variable(_yname(e.id, i), Fraction(0), one))
    for e in instance.edges:
        for i in range(1, k + 1):
            variables.append(Variable(_xname(e.u, e.v, i), Fraction(0), one))
            variables.append(Variable(_xname(e.v, e.u, i), Fraction(0), one))

    constraints: list[Constraint] = []
    nodes = sorted(instance.nodes)
    for i in range(1, k + 1):
        for node in nodes:
            coeffs: dict[str, Fraction] = {}
            for e in instance.edges:
                if e.u == node:
                    coeffs[_xname(e.u, e.v, i)] = one
                    coeffs[_xname(e.v, e.u, i)] = -one
                elif e.v == node:
                    coeffs[_xname(e.v, e.u, i)] = one
                    coeffs[_xname(e.u, e.v, i)] = -one
            if node == instance.source:
                coeffs[_fname(i)] = -one
            elif node == instance.sink:
                coeffs[_fname(i)] = one
            constraints.append(Constraint(coeffs, EQ, Fraction(0)))

    for e in instance.edges:
        coeffs = {}
        window_width = Fraction(0)
        for i in range(1, k + 1):
            lo, hi = index.interval(i)
            inside = e.release <= lo and hi <= e.deadline
            # releases and deadlines are interval boundaries, so there is no
            # partial overlap; assert rather than silently mis-sum
            assert inside or hi <= e.release or lo >= e.deadline
            if inside:
                w = index.width(i)
                coeffs[_yname(e.id, i)] = -w
                window_width += w
        constraints.append(Constraint(coeffs, GE, e.processing - window_width))

    for e in instance.edges:
        for i in range(1, k + 1):
            constraints.append(
                Constraint({_xname(e.u, e.v, i): one, _yname(e.id, i): -one}, LE, Fraction(0))
            )
            constraints.append(
                Constraint({_xname(e.v, e.u, i): one, _yname(e.id, i): -one}, LE, Fraction(0))
            )

    objective = {_fname(i): index.width(i) for i in range(1, k + 1)}
    return LinearProgram("max", objective, tuple(variables), tuple(constraints)), index


def flow_from_assignment(instance: Instance, index: IntervalIndex, assignment: Mapping[str, Fraction]) -> IntervalFlow:
    k = index.k
    f = tuple(assignment[_fname(i)] for i in range(1, k + 1))
    y = {}
    x = {}
    for e in instance.edges:
        for i in range(1, k + 1):
            y[(e.id, i)] = assignment[_yname(e.id, i)]
            x[(e.u, e.v, i)] = assignment[_xname(e.u, e.v, i)]
            x[(e.v, e.u, i)] = assignment[_xname(e.v, e.u, i)]
    return IntervalFlow(index, f, y, x)


def _positive_adjacency(x: Mapping, i: int) -> dict[str, dict[str, Fraction]]:
    adj: dict[str, dict[str, Fraction]] = {}
    for (u, v, j), val in x.items():
        if j == i and val > 0:
            adj.setdefault(u, {})[v] = val
    return adj


def _find_cycle(adj: dict[str, dict[str, Fraction]]) -> list[str] | None:
    color: dict[str, int] = {}
    for start in sorted(adj):
        if color.get(start):
            continue
        path = [start]
        stack = [iter(sorted(adj.get(start, {})))]
        color[start] = 1
        while stack:
            moved = False
            for head in stack[-1]:
                c = color.get(head, 0)
                if c == 1:
                    return path[path.index(head):] + [head]
                if c == 0:
                    color[head] = 1
                    path.append(head)
                    stack.append(iter(sorted(adj.get(head, {}))))
                    moved = True
                    break
            if not moved:
                color[path.pop()] = 2
                stack.pop()
    return None


def cancel_circulations(flow: IntervalFlow) -> IntervalFlow:
    """Remove all positive-flow directed cycles, interval by interval.

    Net source-to-sink value is preserved and no arc value ever increases.
    """
    x = dict(flow.x)
    for i in range(1, flow.index.k + 1):
        adj = _positive_adjacency(x, i)
        while True:
            cycle = _find_cycle(adj)
            if cycle is None:
                break
            arcs = list(zip(cycle, cycle[1:]))
            bottleneck = min(adj[u][v] for u, v in arcs)
            for u, v in arcs:
                x[(u, v, i)] -= bottleneck
                adj[u][v] -= bottleneck
                if adj[u][v] == 0:
                    del adj[u][v]
    return IntervalFlow(flow.index, flow.f, flow.y, x)


def path_decompose(flow: IntervalFlow, source: str, sink: str) -> PathDecomposition:
    """Standard flow decomposition; requires a circulation-free flow."""
    per_interval = []
    for i in range(1, flow.index.k + 1):
        adj = _positive_adjacency(flow.x, i)
        paths: list[tuple[tuple[str, ...], Fraction]] = []
        cap = 2 + sum(len(heads) for heads in adj.values())
        while adj.get(source):
            node = source
            trail = [source]
            while node != sink:
                nxt = min(adj[node])  # deterministic walk
                trail.append(nxt)
                node = nxt
                if len(trail) > cap:
                    raise RuntimeError("flow walk failed to terminate (circulation left upstream?)")
                if node != sink and not adj.get(node):
                    raise RuntimeError("positive flow strands at a non-sink node (conservation violated?)")
            arcs = list(zip(trail, trail[1:]))
            bottleneck = min(adj[u][v] for u, v in arcs)
            for u, v in arcs:
                adj[u][v] -= bottleneck
                if adj[u][v] == 0:
                    del adj[u][v]
            paths.append((tuple(trail), bottleneck))
        # all flow must have been consumed by source-to-sink paths
        leftovers = [arc for head in adj.values() for arc in head.items()]
        if leftovers:
            raise RuntimeError(f"flow not decomposable into paths: {leftovers}")
        per_interval.append(tuple(paths))
    return PathDecomposition(tuple(per_interval))


def _subtract(window: tuple[Fraction, Fraction], blocked: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Free gaps of `window` after removing the given (possibly touching) segments."""
    lo, hi = window
    gaps = []
    cursor = lo
    for a, b in sorted(blocked):
        a = max(a, lo)
        b = min(b, hi)
        if b <= cursor:
            continue
        if a > cursor:
            gaps.append((cursor, a))
        cursor = max(cursor, b)
    if cursor < hi:
        gaps.append((cursor, hi))
    return gaps


def extract_schedule(
    instance: Instance,
    index: IntervalIndex,
    flow: IntervalFlow,
    decomposition: PathDecomposition,
) -> Schedule:
    """Feasible schedule whose connectivity matches the LP objective.

    Within each interval, one connectivity slot per decomposition path is
    packed from the left end; edges on a path must not be maintained during
    their path's slot. Processing is then placed greedily earliest-first.
    """
    edge_by_pair = {e.endpoints(): e.id for e in instance.edges}
    forbidden: dict[str, list[tuple[Fraction, Fraction]]] = {e.id: [] for e in instance.edges}
    for i in range(1, index.k + 1):
        start, _ = index.interval(i)
        w = index.width(i)
        offset = start
        for nodes, value in decomposition.for_interval(i):
            slot = (offset, offset + w * value)
            offset = slot[1]
            for u, v in zip(nodes, nodes[1:]):
                forbidden[edge_by_pair[frozenset((u, v))]].append(slot)

    assignment: dict[str, list[tuple[Fraction, Fraction]]] = {}
    for e in instance.edges:
        gaps = _subtract((e.release, e.deadline), forbidden[e.id])
        remaining = e.processing
        placed: list[tuple[Fraction, Fraction]] = []
        for a, b in gaps:
            if remaining == 0:
                break
            take = min(remaining, b - a)
            placed.append((a, a + take))
            remaining -= take
        if remaining > 0:
            raise RuntimeError(
                f"could not fit processing of edge {e.id}: {remaining} left over "
                "(violated flow invariants upstream)"
            )
        assignment[e.id] = placed
    return make_schedule(assignment)


def solve_preemptive(instance: Instance, objective: Objective = Objective.MAX_CONNECT) -> tuple[Schedule, Fraction]:
    """Exact optimum for fully preemptive instances; returns (schedule, value)."""
    report = validate(instance)
    parallel_only = all("parallel" in reason for _, reason in report.violations)
    if not report and not parallel_only:
        raise ValidationError(f"invalid instance: {report.violations}")
    for e in instance.edges:
        if e.preemptable is not Preemption.ARBITRARY:
            raise PreconditionError(f"edge {e.id} is not arbitrarily preemptable")

    work = normalize_parallel_edges(instance)
    lp, index = build_connectivity_lp(work)
    outcome: LpOutcome = solve_lp(lp)
    assert outcome.status == "optimal", outcome.status
    flow = flow_from_assignment(work, index, outcome.assignment)
    flow = cancel_circulations(flow)
    decomposition = path_decompose(flow, work.source, work.sink)
    schedule = extract_schedule(work, index, flow, decomposition)

    profile = connectivity_profile(work, schedule)
    # nothing can be maintained past the last deadline, so the tail up to the
    # horizon contributes iff the bare graph connects the terminals
    tail = instance.horizon - index.boundaries[-1]
    expected = outcome.value + (tail if tail > 0 and reachable(work) else Fraction(0))
    assert profile.connected_time == expected, (profile.connected_time, expected)

    original_ids = {e.id for e in instance.edges}
    mapped = make_schedule(
        {eid: list(ivs.intervals) for eid, ivs in schedule.assignment.items() if eid in original_ids}
    )
    value = profile.connected_time
    if objective is Objective.MIN_DISCONNECT:
        return mapped, instance.horizon - value
    return mapped, value
