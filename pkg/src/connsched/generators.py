"""Reproducible instance families with known optima and hardness gaps.

Every generator is a pure function of its arguments and returns a validated
instance. The SAT-based families realise reductions whose objective values
certify satisfiability at desk scale; the remaining families witness gaps
between preemption regimes.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .model import Edge, Instance, Preemption, make_instance, rat, validate


@dataclass(frozen=True)
class CnfFormula:
    """3-CNF with 1-based signed literals, e.g. (x1 or not x2 or x3) = (1, -2, 3)."""

    variable_count: int
    clauses: tuple[tuple[int, int, int], ...]

    def check(self, distinct_literals: bool = True, distinct_variables: bool = False) -> None:
        if self.variable_count < 1:
            raise ValueError("formula needs at least one variable")
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValueError(f"clause {clause} does not have exactly three literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.variable_count:
                    raise ValueError(f"literal {lit} out of range")
            if distinct_literals and len(set(clause)) != 3:
                raise ValueError(f"clause {clause} repeats a literal")
            if distinct_variables and len({abs(l) for l in clause}) != 3:
                raise ValueError(f"clause {clause} repeats a variable")


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF; clauses must have exactly three literals."""
    nvars = None
    clauses: list[tuple[int, int, int]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(("c", "%")):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            nvars = int(parts[2])
            continue
        lits = [int(tok) for tok in line.split()]
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        if not lits:
            continue
        if len(lits) != 3:
            raise ValueError(f"clause {lits} does not have exactly three literals")
        clauses.append((lits[0], lits[1], lits[2]))
    if nvars is None:
        nvars = max((abs(l) for cl in clauses for l in cl), default=1)
    return CnfFormula(nvars, tuple(clauses))


def formula_satisfiable(formula: CnfFormula) -> bool:
    """Brute-force satisfiability; only for desk-scale formulas."""
    n = formula.variable_count
    for bits in range(1 << n):
        assign = [(bits >> (v - 1)) & 1 == 1 for v in range(1, n + 1)]
        if all(any((assign[abs(l) - 1]) == (l > 0) for l in cl) for cl in formula.clauses):
            return True
    return False


@dataclass(frozen=True)
class PartitionInput:
    """Positive integers summing to 2B."""

    numbers: tuple[int, ...]
    half_sum: int

    @staticmethod
    def of(numbers) -> "PartitionInput":
        nums = tuple(int(a) for a in numbers)
        if not nums or any(a <= 0 for a in nums):
            raise ValueError("partition numbers must be positive")
        total = sum(nums)
        if total % 2:
            raise ValueError(f"numbers sum to {total}, which is odd")
        return PartitionInput(nums, total // 2)


def _finish(nodes, edges, source, sink, horizon) -> Instance:
    instance = make_instance(nodes, edges, source, sink, horizon)
    report = validate(instance)
    assert report.valid, report.violations
    return instance


def _path_instance(jobs, horizon, prefix: str = "n") -> Instance:
    """Path through fresh nodes; jobs[i] = (edge id, release, deadline, processing, mode)."""
    nodes = [f"{prefix}{i}" for i in range(len(jobs) + 1)]
    edges = [
        Edge(eid, nodes[i], nodes[i + 1], rat(r), rat(d), rat(p), mode)
        for i, (eid, r, d, p, mode) in enumerate(jobs)
    ]
    return _finish(nodes, edges, nodes[0], nodes[-1], horizon)


# --- gap witness families --------------------------------------------------

def preemption_gap_instance(mode: Preemption = Preemption.ARBITRARY) -> Instance:
    """Six nodes, eight unit jobs; fractional preemption reaches connectivity 2,
    integral preemption only 1."""
    windows = [
        ("e1", "s+", "v2", 0, 2),
        ("e2", "s+", "v3", 0, 2),
        ("e3", "v2", "v4", 1, 2),
        ("e4", "v2", "v5", 0, 1),
        ("e5", "v3", "v4", 0, 1),
        ("e6", "v3", "v5", 1, 2),
        ("e7", "v4", "s-", 0, 2),
        ("e8", "v5", "s-", 0, 2),
    ]
    edges = [Edge(eid, u, v, rat(r), rat(d), rat(1), mode) for eid, u, v, r, d in windows]
    return _finish({"s+", "v2", "v3", "v4", "v5", "s-"}, edges, "s+", "s-", rat(2))


def blocked_chain_instance(mode: Preemption = Preemption.NONE) -> Instance:
    """Four-edge path where non-preemptive scheduling can never connect, but a
    preemptive schedule frees one unit of time."""
    jobs = [
        ("e1", 0, 1, 1, mode),
        ("e2", 0, 3, 2, mode),
        ("e3", 1, 4, 2, mode),
        ("e4", 3, 4, 1, mode),
    ]
    return _path_instance(jobs, rat(4))


def staircase_instance(levels: int, scale: int, mode: Preemption = Preemption.ARBITRARY) -> Instance:
    """Levelled family of jobs where non-preemptive cost grows harmonically.

    Level i carries i jobs of length scale/i back to back; wherever a release
    and a deadline coincide, a gap of size `scale` is inserted (later time
    points shift up, releases at the point move, deadlines at it stay). The
    preemptive optimum stays exactly `scale`.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if scale % math.lcm(*range(1, levels + 1)) != 0:
        raise ValueError(f"scale must be divisible by lcm(1..{levels})")
    base: list[tuple[str, Fraction, Fraction, Fraction]] = []
    for i in range(1, levels + 1):
        for j in range(1, i + 1):
            r = Fraction((j - 1) * scale, i)
            d = Fraction(j * scale, i)
            base.append((f"L{i}J{j}", r, d, Fraction(scale, i)))
    releases = {r for _, r, _, _ in base}
    deadlines = {d for _, _, d, _ in base}
    stretch = sorted(releases & deadlines)

    def shift_release(t: Fraction) -> Fraction:
        return t + scale * sum(1 for s in stretch if s <= t)

    def shift_deadline(t: Fraction) -> Fraction:
        return t + scale * sum(1 for s in stretch if s < t)

    jobs = [
        (eid, shift_release(r), shift_deadline(d), p, mode)
        for eid, r, d, p in base
    ]
    horizon = max(d for _, _, d, _, _ in jobs)
    return _path_instance(jobs, horizon)


# --- SAT window gadget ------------------------------------------------------

def sat_window_gadget(
    formula: CnfFormula,
    t1: int = 0,
    t2: int = 1,
    horizon: int | None = None,
    mode: Preemption = Preemption.NONE,
    require_distinct_variables: bool = True,
) -> Instance:
    """Two-window network whose best connectivity is 2 iff the formula is satisfiable.

    A three-edge entry path confines connectivity to [t1, t1+1] and
    [t2, t2+1]. Variable chains can serve either the clause window or the
    variable window but not both; whether one chain per variable can serve the
    variable window while every clause still finds a free hop in the clause
    window encodes a satisfying assignment.
    """
    formula.check(distinct_variables=require_distinct_variables)
    n, m = formula.variable_count, len(formula.clauses)
    if m < 1:
        raise ValueError("the gadget needs at least one clause")
    if not t1 + 1 <= t2:
        raise ValueError("need t1 + 1 <= t2")
    T = t2 + 1 if horizon is None else horizon
    if T < t2 + 1:
        raise ValueError("horizon must be at least t2 + 1")

    # occurrence lists: clause indices (1-based) containing each literal
    pos = {i: [r for r, cl in enumerate(formula.clauses, 1) if i in cl] for i in range(1, n + 1)}
    neg = {i: [r for r, cl in enumerate(formula.clauses, 1) if -i in cl] for i in range(1, n + 1)}

    def tight(eid, u, v, a, b):
        return Edge(eid, u, v, rat(a), rat(b), rat(b - a), mode)

    def slack_edge(eid, u, v):  # the only edges with a scheduling choice
        return Edge(eid, u, v, rat(t1), rat(t2 + 1), rat(t2 - t1), mode)

    def clause_window(eid, u, v):
        return Edge(eid, u, v, rat(t1), rat(t1 + 1), rat(1), mode)

    def variable_window(eid, u, v):
        return Edge(eid, u, v, rat(t2), rat(t2 + 1), rat(1), mode)

    nodes = {"s+", "p1", "p2", "s'", "s-"}
    edges: list[Edge] = [
        tight("block1", "s+", "p1", 0, t1),
        tight("block2", "p1", "p2", t1 + 1, t2),
        tight("block3", "p2", "s'", t2 + 1, T),
    ]
    vnodes = [f"v{i}" for i in range(1, n + 2)]
    nodes.update(vnodes)
    edges.append(clause_window("ent", "s'", "v1"))
    edges.append(clause_window("exit", f"v{n + 1}", "s-"))

    for i in range(1, n + 1):
        for side, occ in (("y", pos[i]), ("z", neg[i])):
            count = 2 * len(occ)
            if count == 0:
                continue
            chain = [f"{side}{i}.{q}" for q in range(1, count + 1)]
            nodes.update(chain)
            edges.append(clause_window(f"{side}in{i}", f"v{i}", chain[0]))
            edges.append(clause_window(f"{side}out{i}", chain[-1], f"v{i + 1}"))
            for q in range(1, count):
                a, b = chain[q - 1], chain[q]
                if q % 2 == 1:
                    edges.append(slack_edge(f"{side}{i}.{q}", a, b))
                else:
                    edges.append(clause_window(f"{side}{i}.{q}", a, b))
        if not pos[i] or not neg[i]:
            edges.append(clause_window(f"bypass{i}", f"v{i}", f"v{i + 1}"))

    cnodes = [f"c{r}" for r in range(1, m + 2)]
    nodes.update(cnodes)
    edges.append(variable_window("sc", "s'", "c1"))
    edges.append(variable_window("cs", f"c{m + 1}", "s-"))
    for i in range(1, n + 1):
        for side, occ in (("y", pos[i]), ("z", neg[i])):
            for q, r in enumerate(occ, 1):
                edges.append(variable_window(f"c{side}{r}.{i}", f"c{r}", f"{side}{i}.{2 * q - 1}"))
                edges.append(variable_window(f"{side}c{r}.{i}", f"{side}{i}.{2 * q}", f"c{r + 1}"))

    return _finish(nodes, edges, "s+", "s-", rat(T))


# --- grid of SAT gates ------------------------------------------------------

def _gate(formula: CnfFormula, variable_slot: int, clause_slot: int, horizon: int, prefix: str, mode: Preemption):
    """One window gadget confined to slots [i,i+1] and [j,j+1] of [0, horizon]."""
    lo, hi = sorted((variable_slot, clause_slot))
    gadget = sat_window_gadget(
        formula, t1=lo, t2=hi, horizon=horizon, mode=mode, require_distinct_variables=False
    )
    if clause_slot != lo:
        # the gadget's early window serves clause paths; swap job windows so the
        # clause machinery sits on [clause_slot, clause_slot+1] instead
        swapped = []
        for e in gadget.edges:
            if e.processing == 1 and (e.release, e.deadline) == (Fraction(lo), Fraction(lo + 1)):
                swapped.append(Edge(e.id, e.u, e.v, Fraction(hi), Fraction(hi + 1), e.processing, e.preemptable))
            elif e.processing == 1 and (e.release, e.deadline) == (Fraction(hi), Fraction(hi + 1)):
                swapped.append(Edge(e.id, e.u, e.v, Fraction(lo), Fraction(lo + 1), e.processing, e.preemptable))
            else:
                swapped.append(e)
        gadget = make_instance(gadget.nodes, swapped, gadget.source, gadget.sink, gadget.horizon)
    renamed_nodes = {node: f"{prefix}{node}" for node in gadget.nodes}
    edges = [
        Edge(f"{prefix}{e.id}", renamed_nodes[e.u], renamed_nodes[e.v], e.release, e.deadline, e.processing, e.preemptable)
        for e in gadget.edges
    ]
    return set(renamed_nodes.values()), edges, f"{prefix}s+", f"{prefix}s-"


def sat_gate_grid(formula: CnfFormula, mode: Preemption = Preemption.NONE) -> Instance:
    """Gates for every ordered slot pair, threaded by one labelled route per slot.

    With n variables the horizon is n. Gate (i, j) admits passage during slot i
    (always schedulable) and during slot j exactly when its copy of the formula
    is scheduled as a satisfying assignment. Route k passes the gates of row k
    and column k through unit-slot-k access chains, so the optimum is n when
    the formula is satisfiable and 1 otherwise.
    """
    formula.check()
    n = formula.variable_count
    if n < 2:
        raise ValueError("the grid needs at least two variables (no off-diagonal gates otherwise)")

    nodes: set[str] = {"s+", "s-"}
    edges: list[Edge] = []
    entry: dict[tuple[int, int], str] = {}
    exits: dict[tuple[int, int], str] = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            gnodes, gedges, gsource, gsink = _gate(formula, i, j, n, f"g{i}.{j}:", mode)
            nodes.update(gnodes)
            edges.extend(gedges)
            entry[(i, j)] = gsource
            exits[(i, j)] = gsink

    def chain(label: int, tag: str, frm: str, to: str) -> None:
        """Access path usable only during [label, label+1]: one tight unit job
        per other slot, plus a trailing zero-length job to keep edges simple."""
        hops = [t for t in range(n) if t != label] + [None]
        prev = frm
        for idx, t in enumerate(hops):
            last = idx == len(hops) - 1
            node = to if last else f"r{tag}.{idx}"
            if not last:
                nodes.add(node)
            if t is None:
                edges.append(Edge(f"link{tag}.{idx}", prev, node, rat(0), rat(n), rat(0), mode))
            else:
                edges.append(Edge(f"link{tag}.{idx}", prev, node, rat(t), rat(t + 1), rat(1), mode))
            prev = node

    for k in range(n):
        stops = [entry[(k, j)] for j in range(k)]
        column = [entry[(i, k)] for i in range(n) if i != k]
        late = [entry[(k, j)] for j in range(k + 1, n)]
        route = stops + column + late
        gate_exit = {entry[key]: exits[key] for key in entry}
        prev = "s+"
        for idx, gate_in in enumerate(route):
            chain(k, f"{k}.{idx}", prev, gate_in)
            prev = gate_exit[gate_in]
        chain(k, f"{k}.{len(route)}", prev, "s-")

    return _finish(nodes, edges, "s+", "s-", rat(n))


# --- disjoint paths ---------------------------------------------------------

def sat_disjoint_paths(formula: CnfFormula) -> Instance:
    """2n disjoint terminal-to-terminal paths; zero disconnection iff satisfiable.

    Each variable owns a positive and a negated path carrying a long job that
    must cover the early or the late half of the horizon (truth value), plus
    tight unit blockers that force consistency and clause satisfaction.
    Variables are padded up so their count is at least the clause count;
    duplicate literals within a clause are tolerated (the blocker exceptions
    are per distinct path).
    """
    formula.check(distinct_literals=False)
    m = len(formula.clauses)
    n = max(formula.variable_count, m, 1)
    T = 8 * n
    mode = Preemption.NONE

    nodes: set[str] = {"s+", "s-"}
    edges: list[Edge] = []
    for i in range(1, n + 1):
        for tag, literal in ((f"p{i}", i), (f"q{i}", -i)):
            blockers: list[int] = []
            for j in range(1, n + 1):
                t_j = 3 * n + 2 * (j - 1)
                if not (literal == j):
                    blockers.append(t_j)
                if not (literal == -j):
                    blockers.append(t_j + 1)
                if abs(literal) != j:
                    blockers.append(2 * n + (j - 1))
            for j, clause in enumerate(formula.clauses, 1):
                if literal not in clause:
                    blockers.append(5 * n + j)
            blockers.sort()
            hops = [("var", 0, T, 3 * n)] + [(f"blk{t}", t, t + 1, 1) for t in blockers]
            prev = "s+"
            for idx, (name, r, d, p) in enumerate(hops):
                last = idx == len(hops) - 1
                node = "s-" if last else f"{tag}.{idx}"
                if not last:
                    nodes.add(node)
                edges.append(Edge(f"{tag}.{name}", prev, node, rat(r), rat(d), rat(p), mode))
                prev = node
    return _finish(nodes, edges, "s+", "s-", rat(T))


def variable_job_ids(instance: Instance) -> list[str]:
    """The long truth-assignment jobs of a disjoint-paths instance."""
    return [e.id for e in instance.edges if e.id.endswith(".var")]


# --- number partition chain -------------------------------------------------

def partition_chain(numbers) -> Instance:
    """Mixed path instance whose minimum disconnection hits 2W exactly on
    partitionable inputs.

    Tight jobs pin a symmetric skeleton around the midpoint; one movable
    non-preemptive job per number commits it to the left or right half, and
    two preemptive jobs of length W = B + sum(x_i) must hide inside the
    committed maintenance, which works out exactly when a subset sums to B.
    """
    pin = PartitionInput.of(numbers)
    a = list(pin.numbers)
    n = len(a)
    B = pin.half_sum
    x = [4 ** (n - i) * B for i in range(1, n + 1)]
    tau = sum(2 * x[i] + a[i] for i in range(n))

    jobs: list[tuple] = []
    # tight skeleton, first half
    acc = 0
    for i in range(n):
        jobs.append((f"tightL{i + 1}", acc, acc + x[i], x[i], Preemption.NONE))
        acc += 2 * x[i] + a[i]
    # tight skeleton, mirrored second half
    acc = tau
    for i in reversed(range(n)):
        jobs.append((f"tightR{i + 1}", acc + x[i] + a[i], acc + 2 * x[i] + a[i], x[i], Preemption.NONE))
        acc += 2 * x[i] + a[i]
    # movable jobs, one per number
    left = 0
    for i in range(n):
        r = left
        d = 2 * tau - left
        jobs.append((f"move{i + 1}", r, d, x[i] + a[i], Preemption.NONE))
        left += 2 * x[i] + a[i]
    W = B + sum(x)
    jobs.append(("fluidL", 0, tau, W, Preemption.ARBITRARY))
    jobs.append(("fluidR", tau, 2 * tau, W, Preemption.ARBITRARY))

    return _path_instance(jobs, rat(2 * tau))


def partition_target(numbers) -> Fraction:
    """2W: the disconnection achieved exactly by partitionable inputs."""
    pin = PartitionInput.of(numbers)
    n = len(pin.numbers)
    W = pin.half_sum + sum(4 ** (n - i) * pin.half_sum for i in range(1, n + 1))
    return rat(2 * W)


# --- random corpus ----------------------------------------------------------

def random_instance(
    seed: int,
    node_count: int = 5,
    edge_density: float = 0.3,
    max_window: int = 4,
    max_p: int = 2,
    preemption_mix: tuple[int, int, int] = (1, 0, 0),
    max_edges: int | None = None,
) -> Instance:
    """Seeded random instance with guaranteed terminal-to-terminal structure.

    A spanning source-to-sink path is always present; further non-parallel
    edges are added with probability `edge_density`. All data is integral.
    `preemption_mix` weights (arbitrary, integral, none).
    """
    if node_count < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    names = [f"v{i}" for i in range(node_count)]
    pairs = [(names[i], names[i + 1]) for i in range(node_count - 1)]
    for i in range(node_count):
        for j in range(i + 2, node_count):
            if rng.random() < edge_density:
                pairs.append((names[i], names[j]))
    if max_edges is not None:
        pairs = pairs[:max_edges]
    modes = [Preemption.ARBITRARY, Preemption.INTEGRAL, Preemption.NONE]
    edges = []
    for idx, (u, v) in enumerate(pairs, 1):
        width = rng.randint(1, max_window)
        release = rng.randint(0, max_window)
        p = rng.randint(0, min(width, max_p))
        mode = rng.choices(modes, weights=preemption_mix)[0]
        edges.append(Edge(f"e{idx}", u, v, rat(release), rat(release + width), rat(p), mode))
    return _finish(names, edges, names[0], names[-1], max(e.deadline for e in edges))


def random_path_instance(
    seed: int,
    edge_count: int = 5,
    max_window: int = 6,
    max_p: int = 3,
    preemption_mix: tuple[int, int, int] = (1, 0, 0),
) -> Instance:
    """Seeded random path instance (density 0 beyond the spanning path)."""
    rng = random.Random(seed)
    modes = [Preemption.ARBITRARY, Preemption.INTEGRAL, Preemption.NONE]
    jobs = []
    for idx in range(1, edge_count + 1):
        width = rng.randint(1, max_window)
        release = rng.randint(0, max_window)
        p = rng.randint(0, min(width, max_p))
        mode = rng.choices(modes, weights=preemption_mix)[0]
        jobs.append((f"e{idx}", release, release + width, p, mode))
    horizon = max(d for _, _, d, _, _ in jobs)
    return _path_instance(jobs, rat(horizon))
