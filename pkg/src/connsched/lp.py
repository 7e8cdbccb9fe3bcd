"""Exact rational linear programming.

Two-phase simplex on a dense tableau with bounded variables. All arithmetic
is exact: the public interface speaks `fractions.Fraction`, the tableau runs
on `gmpy2.mpq` when available (same semantics, much faster). No tolerances
exist anywhere; optimality means exact nonnegative reduced costs and the
returned assignment re-satisfies every constraint exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .model import rat, rat_str

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _Q = Fraction

_ZERO = _Q(0)
_ONE = _Q(1)

LE, EQ, GE = "<=", "=", ">="


@dataclass(frozen=True)
class Variable:
    name: str
    lower: Fraction | None = Fraction(0)  # None means unbounded below
    upper: Fraction | None = None  # None means unbounded above


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[str, Fraction]
    relation: str
    rhs: Fraction


@dataclass(frozen=True)
class LinearProgram:
    sense: str  # "max" or "min"
    objective: Mapping[str, Fraction]
    variables: tuple[Variable, ...]
    constraints: tuple[Constraint, ...]


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Fraction | None = None
    assignment: dict[str, Fraction] | None = None


def lp_problem(sense, objective, variables, constraints) -> LinearProgram:
    """Convenience builder that coerces plain ints/strings to rationals."""
    vs = []
    for spec in variables:
        if isinstance(spec, Variable):
            vs.append(spec)
        else:
            name, lo, hi = spec
            vs.append(Variable(name, None if lo is None else rat(lo), None if hi is None else rat(hi)))
    cs = []
    for spec in constraints:
        if isinstance(spec, Constraint):
            cs.append(spec)
        else:
            coeffs, rel, rhs = spec
            cs.append(Constraint({k: rat(v) for k, v in coeffs.items()}, rel, rat(rhs)))
    return LinearProgram(sense, {k: rat(v) for k, v in objective.items()}, tuple(vs), tuple(cs))


def _check_well_formed(lp: LinearProgram) -> None:
    if lp.sense not in ("max", "min"):
        raise ValueError(f"unknown sense {lp.sense!r}")
    names = [v.name for v in lp.variables]
    declared = set(names)
    if len(declared) != len(names):
        raise ValueError("duplicate variable names")
    for v in lp.variables:
        if v.lower is not None and v.upper is not None and v.lower > v.upper:
            raise ValueError(f"variable {v.name}: lower bound exceeds upper bound")
    for name in lp.objective:
        if name not in declared:
            raise ValueError(f"objective references undeclared variable {name!r}")
    for c in lp.constraints:
        if c.relation not in (LE, EQ, GE):
            raise ValueError(f"unknown relation {c.relation!r}")
        for name in c.coeffs:
            if name not in declared:
                raise ValueError(f"constraint references undeclared variable {name!r}")


class _Tableau:
    """Simplex state over columns with lower bound 0 and optional upper bound."""

    def __init__(self, rows, rhs, uppers, ncols):
        self.rows = rows  # list of list-of-mpq, one per constraint row
        self.beta = rhs  # current basic values
        self.upper = uppers  # per-column upper bound (None = +inf)
        self.ncols = ncols
        self.basis: list[int] = []
        self.at_upper: list[bool] = [False] * ncols
        self.in_basis: list[bool] = [False] * ncols

    def column_value(self, j) -> object:
        if self.in_basis[j]:
            return self.beta[self.basis.index(j)]
        return self.upper[j] if self.at_upper[j] else _ZERO

    def objective_value(self, cost) -> object:
        obj = _ZERO
        for i, bj in enumerate(self.basis):
            if cost[bj] != 0:
                obj += cost[bj] * self.beta[i]
        for j in range(len(cost)):
            if self.at_upper[j] and not self.in_basis[j] and cost[j] != 0:
                obj += cost[j] * self.upper[j]
        return obj

    def pivot(self, r: int, q: int) -> None:
        rows = self.rows
        prow = rows[r]
        piv = prow[q]
        inv = _ONE / piv
        prow = [v * inv for v in prow]
        rows[r] = prow
        for i in range(len(rows)):
            if i == r:
                continue
            f = rows[i][q]
            if f != 0:
                row = rows[i]
                rows[i] = [a - f * b for a, b in zip(row, prow)]

    def run(self, cost, scan_cols=None):
        """Minimize cost over the current basis; returns 'optimal'/'unbounded'.

        `cost` is a dense list of mpq per column. Entering candidates are
        restricted to the first `scan_cols` columns (used in phase 1 to keep
        artificials from re-entering). Pivoting follows Bland's smallest-index
        rule throughout, so cycling is impossible.
        """
        scan = self.ncols if scan_cols is None else scan_cols
        rows = self.rows
        # reduced costs z_j = c_j - c_B . T_j and objective of current point
        z = list(cost)
        for i, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb != 0:
                row = rows[i]
                for j in range(len(z)):
                    if row[j] != 0:
                        z[j] = z[j] - cb * row[j]
        obj = self.objective_value(cost)
        while True:
            q = -1
            direction = 0
            for j in range(scan):
                if self.in_basis[j]:
                    continue
                zj = z[j]
                if (not self.at_upper[j] and zj < 0) or (self.at_upper[j] and zj > 0):
                    q = j
                    direction = -1 if self.at_upper[j] else 1
                    break
            if q < 0:
                return "optimal", obj
            # ratio test: entering moves by t >= 0 in `direction`
            t_best = self.upper[q]  # bound flip distance (None = +inf)
            leave = -1
            leave_to_upper = False
            for i, row in enumerate(rows):
                a = row[q]
                if a == 0:
                    continue
                delta = -direction * a  # basic i changes by delta * t
                if delta < 0:
                    t = self.beta[i] / (-delta)
                elif self.upper[self.basis[i]] is not None:
                    t = (self.upper[self.basis[i]] - self.beta[i]) / delta
                else:
                    continue
                if t_best is None or t < t_best or (
                    t == t_best and leave >= 0 and self.basis[i] < self.basis[leave]
                ):
                    t_best = t
                    leave = i
                    leave_to_upper = delta > 0
            if t_best is None:
                return "unbounded", None
            # move the entering variable and update basic values
            if leave < 0:
                # pure bound flip, no basis change
                for i, row in enumerate(rows):
                    a = row[q]
                    if a != 0:
                        self.beta[i] -= direction * a * t_best
                self.at_upper[q] = not self.at_upper[q]
                obj += z[q] * direction * t_best
                continue
            enter_value = (self.upper[q] - t_best) if self.at_upper[q] else t_best
            for i, row in enumerate(rows):
                a = row[q]
                if a != 0:
                    self.beta[i] -= direction * a * t_best
            out = self.basis[leave]
            self.in_basis[out] = False
            self.at_upper[out] = leave_to_upper
            self.in_basis[q] = True
            self.at_upper[q] = False
            self.basis[leave] = q
            self.pivot(leave, q)
            self.beta[leave] = enter_value
            obj += z[q] * direction * t_best
            zq = z[q]
            if zq != 0:
                prow = rows[leave]
                for j in range(len(z)):
                    if prow[j] != 0:
                        z[j] = z[j] - zq * prow[j]


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve exactly; Infeasible/Unbounded are statuses, malformed input raises."""
    _check_well_formed(lp)

    # Substitute every variable by columns with lower bound 0.
    # expr: original variable -> (constant, [(column, coefficient)])
    col_upper: list = []
    expr: dict[str, tuple] = {}
    for v in lp.variables:
        lo, hi = v.lower, v.upper
        if lo is not None and hi is not None and lo == hi:
            expr[v.name] = (_Q(lo.numerator, lo.denominator), [])
        elif lo is not None:
            j = len(col_upper)
            col_upper.append(None if hi is None else _Q((hi - lo).numerator, (hi - lo).denominator))
            expr[v.name] = (_Q(lo.numerator, lo.denominator), [(j, _ONE)])
        elif hi is not None:
            j = len(col_upper)
            col_upper.append(None)
            expr[v.name] = (_Q(hi.numerator, hi.denominator), [(j, -_ONE)])
        else:
            j = len(col_upper)
            col_upper.extend([None, None])
            expr[v.name] = (_ZERO, [(j, _ONE), (j + 1, -_ONE)])
    nstruct = len(col_upper)

    rows_sparse: list[dict[int, object]] = []
    rhs: list = []
    relations: list[str] = []
    for c in lp.constraints:
        row: dict[int, object] = {}
        b = _Q(c.rhs.numerator, c.rhs.denominator)
        for name, coef in c.coeffs.items():
            if coef == 0:
                continue
            q = _Q(coef.numerator, coef.denominator)
            const, cols = expr[name]
            b -= q * const
            for j, cc in cols:
                row[j] = row.get(j, _ZERO) + q * cc
        row = {j: v for j, v in row.items() if v != 0}
        if not row:
            ok = (b >= 0) if c.relation == LE else (b <= 0) if c.relation == GE else (b == 0)
            if not ok:
                return LpOutcome("infeasible")
            continue
        rows_sparse.append(row)
        rhs.append(b)
        relations.append(c.relation)

    sense_factor = -1 if lp.sense == "max" else 1
    cost_expr: dict[int, object] = {}
    for name, coef in lp.objective.items():
        q = _Q(coef.numerator, coef.denominator) * sense_factor
        _, cols = expr[name]
        for j, cc in cols:
            cost_expr[j] = cost_expr.get(j, _ZERO) + q * cc

    m = len(rows_sparse)
    # slack columns for inequalities
    slack_of_row: list[int | None] = []
    for rel in relations:
        if rel == EQ:
            slack_of_row.append(None)
        else:
            slack_of_row.append(nstruct + sum(1 for s in slack_of_row if s is not None))
    nslack = sum(1 for s in slack_of_row if s is not None)
    ncols = nstruct + nslack
    col_upper.extend([None] * nslack)

    dense_rows: list[list] = []
    for i, row in enumerate(rows_sparse):
        dense = [_ZERO] * ncols
        for j, v in row.items():
            dense[j] = v
        s = slack_of_row[i]
        if s is not None:
            dense[s] = _ONE if relations[i] == LE else -_ONE
        dense_rows.append(dense)

    # normalize to nonnegative rhs, then choose phase-1 basis
    art_rows: list[int] = []
    for i in range(m):
        if rhs[i] < 0:
            dense_rows[i] = [-v for v in dense_rows[i]]
            rhs[i] = -rhs[i]
    for i in range(m):
        s = slack_of_row[i]
        if s is not None and dense_rows[i][s] == _ONE:
            continue
        art_rows.append(i)
    nart = len(art_rows)
    total = ncols + nart
    for i, row in enumerate(dense_rows):
        row.extend([_ZERO] * nart)
    for k, i in enumerate(art_rows):
        dense_rows[i][ncols + k] = _ONE
    col_upper.extend([None] * nart)

    tab = _Tableau(dense_rows, list(rhs), col_upper, total)
    tab.basis = [0] * m
    for i in range(m):
        s = slack_of_row[i]
        if i in art_rows:
            j = ncols + art_rows.index(i)
        else:
            j = s  # type: ignore[assignment]
        tab.basis[i] = j
        tab.in_basis[j] = True

    if nart:
        phase1 = [_ZERO] * ncols + [_ONE] * nart
        status, value = tab.run(phase1, scan_cols=ncols)
        assert status == "optimal"
        if value > 0:
            return LpOutcome("infeasible")
        # drive remaining zero-valued artificials out of the basis
        drop: list[int] = []
        for i in range(m):
            if tab.basis[i] < ncols:
                continue
            row = tab.rows[i]
            piv_col = next((j for j in range(ncols) if not tab.in_basis[j] and row[j] != 0), None)
            if piv_col is None:
                drop.append(i)
                continue
            out = tab.basis[i]
            tab.in_basis[out] = False
            tab.in_basis[piv_col] = True
            entering_val = tab.upper[piv_col] if tab.at_upper[piv_col] else _ZERO
            tab.at_upper[piv_col] = False
            tab.basis[i] = piv_col
            tab.pivot(i, piv_col)
            tab.beta[i] = entering_val
        for i in sorted(drop, reverse=True):
            del tab.rows[i], tab.beta[i], tab.basis[i]
    for row in tab.rows:
        del row[ncols:]
    tab.ncols = ncols
    tab.upper = tab.upper[:ncols]
    tab.in_basis = tab.in_basis[:ncols]
    tab.at_upper = tab.at_upper[:ncols]

    phase2 = [_ZERO] * ncols
    for j, v in cost_expr.items():
        phase2[j] = v
    status, value = tab.run(phase2)
    if status == "unbounded":
        return LpOutcome("unbounded")

    col_values = [tab.column_value(j) for j in range(ncols)]
    assignment: dict[str, Fraction] = {}
    for v in lp.variables:
        const, cols = expr[v.name]
        val = const
        for j, cc in cols:
            val += cc * col_values[j]
        assignment[v.name] = Fraction(val.numerator, val.denominator)
    obj = Fraction(0)
    for name, coef in lp.objective.items():
        obj += coef * assignment[name]
    _assert_exact(lp, assignment, obj)
    return LpOutcome("optimal", obj, assignment)


def _assert_exact(lp: LinearProgram, assignment: dict[str, Fraction], obj: Fraction) -> None:
    for v in lp.variables:
        x = assignment[v.name]
        assert v.lower is None or x >= v.lower, f"{v.name} below lower bound"
        assert v.upper is None or x <= v.upper, f"{v.name} above upper bound"
    for c in lp.constraints:
        lhs = sum((coef * assignment[name] for name, coef in c.coeffs.items()), Fraction(0))
        if c.relation == LE:
            assert lhs <= c.rhs, "constraint violated"
        elif c.relation == GE:
            assert lhs >= c.rhs, "constraint violated"
        else:
            assert lhs == c.rhs, "constraint violated"


def format_lp(lp: LinearProgram) -> str:
    """Human-readable inequality dump, stable across runs, for diffing."""

    def terms(coeffs: Mapping[str, Fraction]) -> str:
        parts = []
        for name in sorted(coeffs):
            c = coeffs[name]
            if c == 0:
                continue
            sign = "- " if c < 0 else ("+ " if parts else "")
            mag = abs(c)
            parts.append(f"{sign}{'' if mag == 1 else rat_str(mag) + ' '}{name}")
        return " ".join(parts) if parts else "0"

    lines = [f"{lp.sense} {terms(lp.objective)}", "s.t."]
    for i, c in enumerate(lp.constraints, start=1):
        lines.append(f"  c{i}: {terms(c.coeffs)} {c.relation} {rat_str(c.rhs)}")
    for v in lp.variables:
        lo = "-inf" if v.lower is None else rat_str(v.lower)
        hi = "+inf" if v.upper is None else rat_str(v.upper)
        lines.append(f"  {lo} <= {v.name} <= {hi}")
    return "\n".join(lines)
