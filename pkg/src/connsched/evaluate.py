"""Schedules and the connectivity objective.

A schedule assigns each edge a set of closed maintenance intervals. The
objective is evaluated by an event sweep: between consecutive interval
endpoints the set of maintained edges is constant, so terminal-to-terminal
reachability is decided once per atom by BFS at the atom midpoint.

Boundary convention: a maintenance interval [a, b] blocks the edge on the
half-open [a, b), so abutting intervals block exactly their total length and
zero-length intervals block nothing.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .model import Instance, Preemption, ValidationError, rat, rat_str


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, interior-disjoint closed intervals with rational endpoints."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    @staticmethod
    def of(pairs: Iterable[tuple[Fraction | int | str, Fraction | int | str]]) -> "IntervalSet":
        ivs = sorted((rat(a), rat(b)) for a, b in pairs)
        for a, b in ivs:
            if a > b:
                raise ValueError(f"interval [{a}, {b}] is reversed")
        for (_, b1), (a2, _) in zip(ivs, ivs[1:]):
            if a2 < b1:
                raise ValueError("intervals overlap")
        return IntervalSet(tuple(ivs))

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def covers(self, t: Fraction) -> bool:
        """Whether t falls in some [a, b) of the set."""
        return any(a <= t < b for a, b in self.intervals)


EMPTY_INTERVALS = IntervalSet(())


@dataclass(frozen=True)
class Schedule:
    """Maintenance assignment: edge id -> interval set (empty allowed)."""

    assignment: Mapping[str, IntervalSet]

    def intervals(self, edge_id: str) -> IntervalSet:
        return self.assignment.get(edge_id, EMPTY_INTERVALS)


def make_schedule(assignment: Mapping[str, Iterable[tuple]]) -> Schedule:
    return Schedule({eid: IntervalSet.of(ivs) for eid, ivs in assignment.items()})


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[tuple[str, str], ...]

    def __bool__(self) -> bool:
        return self.feasible


def check_feasible(instance: Instance, schedule: Schedule) -> FeasibilityReport:
    """Per-edge checks: window containment, exact processing, preemption shape."""
    bad: list[tuple[str, str]] = []
    for e in instance.edges:
        ivs = schedule.intervals(e.id)
        for a, b in ivs.intervals:
            if a < e.release or b > e.deadline:
                bad.append((e.id, f"interval [{a}, {b}] outside window [{e.release}, {e.deadline}]"))
        if ivs.measure != e.processing:
            bad.append((e.id, f"total maintenance {ivs.measure} != processing {e.processing}"))
        if e.preemptable is Preemption.NONE:
            positive = [iv for iv in ivs.intervals if iv[0] < iv[1]]
            if len(positive) > 1 or len(ivs.intervals) > max(1, len(positive)):
                bad.append((e.id, "not contiguous (job is non-preemptable)"))
        elif e.preemptable is Preemption.INTEGRAL:
            for a, b in ivs.intervals:
                if a.denominator != 1 or b.denominator != 1:
                    bad.append((e.id, f"non-integral preemption point in [{a}, {b}]"))
    return FeasibilityReport(not bad, tuple(bad))


@dataclass(frozen=True)
class ConnectivityProfile:
    """Partition of [0, T] into atoms flagged connected/disconnected."""

    atoms: tuple[tuple[Fraction, Fraction, bool], ...]
    connected_time: Fraction
    disconnected_time: Fraction

    @property
    def horizon(self) -> Fraction:
        return self.connected_time + self.disconnected_time


def reachable(instance: Instance, blocked: frozenset[str] = frozenset()) -> bool:
    """Whether source reaches sink when the `blocked` edge ids are unavailable."""
    adj = instance.adjacency(exclude=frozenset(blocked))
    if instance.source not in adj:
        return False
    seen = {instance.source}
    queue = deque([instance.source])
    while queue:
        node = queue.popleft()
        if node == instance.sink:
            return True
        for nxt in adj[node]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def connectivity_profile(instance: Instance, schedule: Schedule, check: bool = True) -> ConnectivityProfile:
    """Sweep over schedule events; reachability tested at each atom midpoint."""
    if check:
        report = check_feasible(instance, schedule)
        if not report:
            raise ValidationError(f"infeasible schedule: {report.violations}")
    events = {Fraction(0), instance.horizon}
    for e in instance.edges:
        for a, b in schedule.intervals(e.id).intervals:
            if a < instance.horizon:
                events.add(a)
            if b < instance.horizon:
                events.add(b)
    points = sorted(p for p in events if 0 <= p <= instance.horizon)
    atoms: list[tuple[Fraction, Fraction, bool]] = []
    connected = Fraction(0)
    for lo, hi in zip(points, points[1:]):
        mid = (lo + hi) / 2
        blocked = frozenset(e.id for e in instance.edges if schedule.intervals(e.id).covers(mid))
        ok = reachable(instance, blocked)
        atoms.append((lo, hi, ok))
        if ok:
            connected += hi - lo
    profile = ConnectivityProfile(tuple(atoms), connected, instance.horizon - connected)
    assert profile.connected_time + profile.disconnected_time == instance.horizon
    return profile


def connected_time(instance: Instance, schedule: Schedule) -> Fraction:
    return connectivity_profile(instance, schedule).connected_time


def disconnected_time(instance: Instance, schedule: Schedule) -> Fraction:
    return connectivity_profile(instance, schedule).disconnected_time


# --- canonical JSON -------------------------------------------------------

def schedule_to_json_obj(schedule: Schedule) -> dict:
    return {
        "edges": {
            eid: [[rat_str(a), rat_str(b)] for a, b in ivs.intervals]
            for eid, ivs in sorted(schedule.assignment.items())
        }
    }


def schedule_to_json(schedule: Schedule) -> str:
    return json.dumps(schedule_to_json_obj(schedule), indent=2) + "\n"


def schedule_from_json_obj(obj: Mapping) -> Schedule:
    return make_schedule({str(eid): [(rat(a), rat(b)) for a, b in ivs] for eid, ivs in obj["edges"].items()})


def schedule_from_json(text: str) -> Schedule:
    return schedule_from_json_obj(json.loads(text))


def profile_to_json_obj(profile: ConnectivityProfile) -> dict:
    return {
        "connected_time": rat_str(profile.connected_time),
        "disconnected_time": rat_str(profile.disconnected_time),
        "atoms": [
            {"from": rat_str(a), "to": rat_str(b), "connected": flag}
            for a, b, flag in profile.atoms
        ],
    }
