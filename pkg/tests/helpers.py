"""Shared test utilities: tiny independent oracles used to freeze expected values."""

from __future__ import annotations

import itertools
from fractions import Fraction

from connsched.evaluate import Schedule, make_schedule, reachable
from connsched.model import Edge, Instance, make_instance, rat


def path_instance(jobs, horizon=None, mode=None):
    """jobs: list of (release, deadline, processing); returns a path instance."""
    from connsched.model import Preemption

    mode = mode or Preemption.ARBITRARY
    nodes = [f"n{i}" for i in range(len(jobs) + 1)]
    edges = [
        Edge(f"e{i + 1}", nodes[i], nodes[i + 1], rat(r), rat(d), rat(p), mode)
        for i, (r, d, p) in enumerate(jobs)
    ]
    if horizon is None:
        horizon = max(d for _, d, _ in jobs)
    return make_instance(nodes, edges, nodes[0], nodes[-1], rat(horizon))


def enumerate_nonpreemptive(instance: Instance):
    """Yield every integral non-preemptive schedule of a small instance."""
    movable = [e for e in instance.edges if e.processing > 0]
    options = [
        [(e.id, Fraction(s), Fraction(s) + e.processing)
         for s in range(int(e.release), int(e.latest_start) + 1)]
        for e in movable
    ]
    fixed_empty = {e.id: [] for e in instance.edges if e.processing == 0}
    for combo in itertools.product(*options):
        assignment = dict(fixed_empty)
        for eid, a, b in combo:
            assignment[eid] = [(a, b)]
        yield make_schedule(assignment)


def connected_measure_in_window(instance: Instance, schedule: Schedule, lo, hi) -> Fraction:
    """Window-restricted connectivity, evaluated independently of the library sweep."""
    lo, hi = rat(lo), rat(hi)
    points = {lo, hi}
    for e in instance.edges:
        for a, b in schedule.intervals(e.id).intervals:
            for t in (a, b):
                if lo < t < hi:
                    points.add(t)
    total = Fraction(0)
    seq = sorted(points)
    for a, b in zip(seq, seq[1:]):
        mid = (a + b) / 2
        blocked = frozenset(
            e.id for e in instance.edges if schedule.intervals(e.id).covers(mid)
        )
        if reachable(instance, blocked):
            total += b - a
    return total


def slot_connectivity(instance: Instance, schedule: Schedule, q: int) -> Fraction:
    """Slot-discretized connectivity: sample every 1/q slot at its midpoint."""
    steps = int(instance.horizon * q)
    assert steps == instance.horizon * q
    total = Fraction(0)
    for j in range(steps):
        mid = Fraction(2 * j + 1, 2 * q)
        blocked = frozenset(
            e.id for e in instance.edges if schedule.intervals(e.id).covers(mid)
        )
        if reachable(instance, blocked):
            total += Fraction(1, q)
    return total


def fig1_like(mode=None):
    """The six-node, eight-unit-job example instance."""
    from connsched.generators import preemption_gap_instance
    from connsched.model import Preemption

    return preemption_gap_instance(mode or Preemption.ARBITRARY)
