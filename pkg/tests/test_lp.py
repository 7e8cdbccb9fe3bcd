import itertools
import random
from fractions import Fraction

import pytest

from connsched.lp import LE, EQ, GE, format_lp, lp_problem, solve_lp


def solve(sense, objective, variables, constraints):
    return solve_lp(lp_problem(sense, objective, variables, constraints))


class TestBasics:
    def test_single_bounded_variable(self):
        out = solve("max", {"x": 1}, [("x", 0, None)], [({"x": 1}, LE, 3)])
        assert (out.status, out.value) == ("optimal", 3)

    def test_two_variables_summing(self):
        out = solve("max", {"x": 1, "y": 1}, [("x", 0, 1), ("y", 0, 1)], [({"x": 1, "y": 1}, LE, 1)])
        assert out.value == 1

    def test_infeasible(self):
        out = solve("max", {"x": 1}, [("x", 0, 1)], [({"x": 1}, GE, 2)])
        assert out.status == "infeasible"

    def test_unbounded(self):
        out = solve("max", {"x": 1}, [("x", 0, None)], [({"x": 1}, GE, 1)])
        assert out.status == "unbounded"

    def test_equality_and_free_variable(self):
        out = solve(
            "min", {"x": 1, "y": 2},
            [("x", None, None), ("y", -5, 5)],
            [({"x": 1, "y": 1}, EQ, 2), ({"x": -1, "y": 1}, LE, 0)],
        )
        assert out.value == -3
        assert out.assignment == {"x": Fraction(7), "y": Fraction(-5)}

    def test_fixed_variable_substituted(self):
        out = solve("max", {"x": 1, "y": 3}, [("x", 2, 2), ("y", 0, 4)], [({"x": 1, "y": 1}, LE, 5)])
        assert out.value == 2 + 3 * 3
        assert out.assignment["x"] == 2

    def test_exact_fractions(self):
        out = solve(
            "max", {"x": Fraction(1, 3)}, [("x", 0, Fraction(7, 2))], [({"x": Fraction(2, 5)}, LE, 1)]
        )
        assert out.value == Fraction(1, 3) * Fraction(5, 2)

    def test_empty_objective(self):
        out = solve("min", {}, [("x", 0, 1)], [({"x": 1}, GE, Fraction(1, 2))])
        assert out.status == "optimal" and out.value == 0

    def test_constant_constraints(self):
        out = solve("max", {"x": 1}, [("x", 0, 1)], [({}, LE, 1)])
        assert out.value == 1
        out = solve("max", {"x": 1}, [("x", 0, 1)], [({}, LE, -1)])
        assert out.status == "infeasible"


class TestMalformed:
    def test_undeclared_variable(self):
        with pytest.raises(ValueError):
            solve("max", {"z": 1}, [("x", 0, 1)], [])

    def test_bad_sense_and_relation(self):
        with pytest.raises(ValueError):
            solve("argmax", {"x": 1}, [("x", 0, 1)], [])
        with pytest.raises(ValueError):
            solve("max", {"x": 1}, [("x", 0, 1)], [({"x": 1}, "<", 1)])

    def test_crossed_bounds(self):
        with pytest.raises(ValueError):
            solve("max", {"x": 1}, [("x", 3, 1)], [])


class TestDegeneracy:
    def test_cycling_prone_instance_terminates(self):
        # the classic pivot-cycling example; smallest-index pivoting must escape
        out = solve(
            "min",
            {"x1": Fraction(-3, 4), "x2": 150, "x3": Fraction(-1, 50), "x4": 6},
            [("x1", 0, None), ("x2", 0, None), ("x3", 0, None), ("x4", 0, None)],
            [
                ({"x1": Fraction(1, 4), "x2": -60, "x3": Fraction(-1, 25), "x4": 9}, LE, 0),
                ({"x1": Fraction(1, 2), "x2": -90, "x3": Fraction(-1, 50), "x4": 3}, LE, 0),
                ({"x3": 1}, LE, 1),
            ],
        )
        assert out.status == "optimal"
        assert out.value == Fraction(-1, 20)

    def test_degenerate_equalities(self):
        out = solve(
            "max", {"x": 1, "y": 1}, [("x", 0, None), ("y", 0, None)],
            [({"x": 1, "y": 1}, EQ, 0), ({"x": 1}, LE, 5)],
        )
        assert out.value == 0


def _gauss_solve(rows, rhs):
    """Exact solve of a square system; None if singular."""
    n = len(rows)
    m = [list(map(Fraction, row)) + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return None
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def _vertex_enumerate(sense, objective, variables, constraints):
    """Brute-force optimum over all basic points of a box-bounded LP."""
    names = [v[0] for v in variables]
    n = len(names)
    planes = []  # (coeff row, rhs) treated as potential active equalities
    for coeffs, _, rhs in constraints:
        planes.append(([Fraction(coeffs.get(nm, 0)) for nm in names], Fraction(rhs)))
    for j, (nm, lo, hi) in enumerate(variables):
        unit = [Fraction(1) if k == j else Fraction(0) for k in range(n)]
        planes.append((unit, Fraction(lo)))
        planes.append((unit, Fraction(hi)))

    def feasible(x):
        for coeffs, rel, rhs in constraints:
            lhs = sum(Fraction(coeffs.get(nm, 0)) * x[k] for k, nm in enumerate(names))
            if rel == LE and lhs > rhs:
                return False
            if rel == GE and lhs < rhs:
                return False
            if rel == EQ and lhs != rhs:
                return False
        return all(lo <= x[j] <= hi for j, (_, lo, hi) in enumerate(variables))

    best = None
    for active in itertools.combinations(range(len(planes)), n):
        x = _gauss_solve([planes[i][0] for i in active], [planes[i][1] for i in active])
        if x is None or not feasible(x):
            continue
        val = sum(Fraction(objective.get(nm, 0)) * x[k] for k, nm in enumerate(names))
        if best is None or (val > best if sense == "max" else val < best):
            best = val
    return best


class TestAgainstVertexEnumeration:
    def test_random_small_lps(self):
        rng = random.Random(42)
        checked = 0
        for trial in range(60):
            n = rng.randint(2, 4)
            variables = [(f"x{j}", 0, rng.randint(1, 3)) for j in range(n)]
            m = rng.randint(1, 4)
            constraints = []
            for _ in range(m):
                coeffs = {f"x{j}": rng.randint(-3, 3) for j in range(n)}
                rel = rng.choice([LE, GE, EQ] if rng.random() < 0.3 else [LE, GE])
                constraints.append((coeffs, rel, rng.randint(-4, 8)))
            objective = {f"x{j}": rng.randint(-4, 4) for j in range(n)}
            sense = rng.choice(["max", "min"])
            out = solve(sense, objective, variables, constraints)
            expected = _vertex_enumerate(sense, objective, variables, constraints)
            if expected is None:
                assert out.status == "infeasible"
            else:
                assert out.status == "optimal"
                assert out.value == expected, (trial, sense, objective, variables, constraints)
                checked += 1
        assert checked >= 25  # the corpus must actually exercise feasible cases


class TestFormat:
    def test_dump_is_stable_and_readable(self):
        lp = lp_problem(
            "max", {"x": 2, "y": -1}, [("x", 0, 1), ("y", 0, None)], [({"x": 1, "y": 3}, LE, 4)]
        )
        text = format_lp(lp)
        assert text.splitlines()[0] == "max 2 x - y"
        assert "c1: x + 3 y <= 4" in text
        assert format_lp(lp) == text
