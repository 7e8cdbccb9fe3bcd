"""Problem instances: a network with two terminals and one maintenance job per edge.

Every time quantity is an exact rational (`fractions.Fraction`); nothing in this
package ever goes through floating point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping

Rational = Fraction


class ValidationError(ValueError):
    """The instance or schedule violates a structural invariant."""


class PreconditionError(ValueError):
    """The input is valid but outside what the requested solver handles."""


def rat(value: int | str | Fraction) -> Fraction:
    """Parse a rational from an int or a 'n' / 'n/d' decimal string.

    Floats are rejected: file formats and APIs are exact end to end.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        if "." in value or "e" in value or "E" in value:
            raise ValueError(f"not an exact rational literal: {value!r}")
        return Fraction(value)
    raise ValueError(f"not a rational: {value!r} (floats are not accepted)")


def rat_str(value: Fraction) -> str:
    """Canonical serialization: 'n' for integers, 'n/d' otherwise."""
    return str(Fraction(value))


class Preemption(Enum):
    """How a maintenance job may be interrupted."""

    ARBITRARY = "arbitrary"
    INTEGRAL = "integral"
    NONE = "none"


class Objective(Enum):
    """Maximize connected time or minimize disconnected time."""

    MAX_CONNECT = "max"
    MIN_DISCONNECT = "min"


@dataclass(frozen=True)
class Edge:
    """An undirected edge carrying one maintenance job.

    The job needs `processing` time units inside the window
    [`release`, `deadline`]; while it runs, the edge is unavailable.
    """

    id: str
    u: str
    v: str
    release: Fraction
    deadline: Fraction
    processing: Fraction
    preemptable: Preemption = Preemption.ARBITRARY

    def endpoints(self) -> frozenset[str]:
        return frozenset((self.u, self.v))

    @property
    def window(self) -> tuple[Fraction, Fraction]:
        return (self.release, self.deadline)

    @property
    def latest_start(self) -> Fraction:
        return self.deadline - self.processing


@dataclass(frozen=True)
class Instance:
    """An undirected network with terminals `source`/`sink` and per-edge jobs."""

    nodes: frozenset[str]
    edges: tuple[Edge, ...]
    source: str
    sink: str
    horizon: Fraction

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)

    def adjacency(self, exclude: frozenset[str] = frozenset()) -> dict[str, list[str]]:
        """Adjacency lists over all edges whose id is not in `exclude`."""
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for e in self.edges:
            if e.id in exclude:
                continue
            adj[e.u].append(e.v)
            adj[e.v].append(e.u)
        return adj


def make_instance(
    nodes: Iterable[str],
    edges: Iterable[Edge],
    source: str,
    sink: str,
    horizon: Fraction | int | str | None = None,
) -> Instance:
    """Build an Instance; horizon defaults to the largest deadline."""
    edges = tuple(edges)
    if horizon is None:
        horizon = max((e.deadline for e in edges), default=Fraction(0))
    return Instance(frozenset(nodes), edges, source, sink, rat(horizon))


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[tuple[str, str], ...]

    def __bool__(self) -> bool:
        return self.valid


def validate(instance: Instance) -> ValidationReport:
    """Check all instance invariants; violations are the payload, never raised."""
    bad: list[tuple[str, str]] = []
    if instance.source == instance.sink:
        bad.append(("terminals", "terminals coincide"))
    for term, name in ((instance.source, "source"), (instance.sink, "sink")):
        if term not in instance.nodes:
            bad.append((name, f"{name} node {term!r} not declared"))
    seen_ids: set[str] = set()
    seen_pairs: dict[frozenset[str], str] = {}
    for e in instance.edges:
        if e.id in seen_ids:
            bad.append((e.id, "duplicate edge id"))
        seen_ids.add(e.id)
        if e.u not in instance.nodes or e.v not in instance.nodes:
            bad.append((e.id, "endpoint not declared"))
        if e.u == e.v:
            bad.append((e.id, "self-loop"))
        else:
            pair = e.endpoints()
            if pair in seen_pairs:
                bad.append((e.id, f"parallel to edge {seen_pairs[pair]}"))
            else:
                seen_pairs[pair] = e.id
        if e.release < 0:
            bad.append((e.id, "negative release"))
        if e.release > e.deadline:
            bad.append((e.id, "release after deadline"))
        if e.processing < 0:
            bad.append((e.id, "negative processing"))
        elif e.processing > e.deadline - e.release:
            bad.append((e.id, "processing exceeds window"))
        if e.deadline > instance.horizon:
            bad.append((e.id, "deadline beyond horizon"))
    return ValidationReport(not bad, tuple(bad))


def normalize_parallel_edges(instance: Instance) -> Instance:
    """Split every parallel edge by inserting a fresh node.

    For each duplicate beyond the first edge between a node pair, a new node is
    inserted and the edge replaced by two edges: the half incident to the
    lexicographically smaller endpoint keeps the original job, the other half
    gets a zero-length job with window [0, horizon]. Idempotent; connectivity
    of every schedule is preserved (a zero-processing job never maintains).
    """
    nodes = set(instance.nodes)
    out: list[Edge] = []
    seen: set[frozenset[str]] = set()
    fresh = 0
    for e in instance.edges:
        pair = e.endpoints()
        if pair not in seen:
            seen.add(pair)
            out.append(e)
            continue
        while True:
            fresh += 1
            mid = f"{e.id}~split{fresh}"
            if mid not in nodes:
                break
        nodes.add(mid)
        lo, hi = sorted((e.u, e.v))
        out.append(replace(e, id=e.id, u=lo, v=mid))
        out.append(
            Edge(
                id=f"{e.id}~rest",
                u=mid,
                v=hi,
                release=Fraction(0),
                deadline=instance.horizon,
                processing=Fraction(0),
                preemptable=e.preemptable,
            )
        )
    return Instance(frozenset(nodes), tuple(out), instance.source, instance.sink, instance.horizon)


def relevant_time_points(instance: Instance) -> list[Fraction]:
    """All release dates and deadlines plus 0, strictly increasing."""
    points = {Fraction(0)}
    for e in instance.edges:
        points.add(e.release)
        points.add(e.deadline)
    return sorted(points)


def with_preemption(instance: Instance, mode: Preemption) -> Instance:
    """Copy of the instance with every job's preemption mode replaced."""
    return replace(instance, edges=tuple(replace(e, preemptable=mode) for e in instance.edges))


def replace_jobs(instance: Instance, edges: Iterable[Edge]) -> Instance:
    """Copy of the instance with a different edge/job list."""
    return replace(instance, edges=tuple(edges))


def path_order(instance: Instance) -> list[str] | None:
    """Edge ids in order along a simple source-to-sink path, else None."""
    degree: dict[str, list[Edge]] = {n: [] for n in instance.nodes}
    for e in instance.edges:
        if e.u == e.v or e.u not in degree or e.v not in degree:
            return None
        degree[e.u].append(e)
        degree[e.v].append(e)
    if len(instance.edges) != len(instance.nodes) - 1:
        return None
    if len(degree.get(instance.source, [])) != 1 or len(degree.get(instance.sink, [])) != 1:
        return None
    order: list[str] = []
    node, prev_edge = instance.source, None
    for _ in range(len(instance.edges)):
        options = [e for e in degree[node] if e is not prev_edge]
        if len(options) != 1:
            return None
        edge = options[0]
        order.append(edge.id)
        node = edge.v if edge.u == node else edge.u
        prev_edge = edge
    return order if node == instance.sink else None


def is_integral(instance: Instance) -> bool:
    """Whether every release, deadline and processing time is an integer."""
    return all(
        e.release.denominator == 1 and e.deadline.denominator == 1 and e.processing.denominator == 1
        for e in instance.edges
    )


# --- canonical JSON -------------------------------------------------------

def instance_to_json_obj(instance: Instance) -> dict:
    return {
        "nodes": sorted(instance.nodes),
        "source": instance.source,
        "sink": instance.sink,
        "horizon": rat_str(instance.horizon),
        "edges": [
            {
                "id": e.id,
                "u": e.u,
                "v": e.v,
                "release": rat_str(e.release),
                "deadline": rat_str(e.deadline),
                "processing": rat_str(e.processing),
                "preemptable": e.preemptable.value,
            }
            for e in instance.edges
        ],
    }


def instance_to_json(instance: Instance) -> str:
    return json.dumps(instance_to_json_obj(instance), indent=2) + "\n"


def instance_from_json_obj(obj: Mapping) -> Instance:
    edges = []
    for i, spec in enumerate(obj["edges"], start=1):
        edges.append(
            Edge(
                id=str(spec.get("id") or f"e{i}"),
                u=str(spec["u"]),
                v=str(spec["v"]),
                release=rat(spec["release"]),
                deadline=rat(spec["deadline"]),
                processing=rat(spec["processing"]),
                preemptable=Preemption(spec.get("preemptable", "arbitrary")),
            )
        )
    horizon = obj.get("horizon")
    return make_instance(
        (str(n) for n in obj["nodes"]),
        edges,
        str(obj["source"]),
        str(obj["sink"]),
        rat(horizon) if horizon is not None else None,
    )


def instance_from_json(text: str) -> Instance:
    return instance_from_json_obj(json.loads(text))
