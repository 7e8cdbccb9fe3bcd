"""Command-line interface: generate instances, run solvers, evaluate schedules.

Exit codes: 0 success, 2 validation/parse failure, 3 search budget exceeded,
4 solver precondition not met by the instance.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import generators
from .approx import approx_max_connectivity
from .evaluate import (
    check_feasible,
    connectivity_profile,
    profile_to_json_obj,
    schedule_from_json,
    schedule_to_json,
)
from .model import (
    Objective,
    PreconditionError,
    Preemption,
    ValidationError,
    instance_from_json,
    instance_to_json,
    rat_str,
    validate,
)
from .oracles import BruteResult, SearchBudget, brute_integral_preemptive, brute_mixed, brute_nonpreemptive
from .paths import exact_nonpreemptive_path, mixed_two_approx, split_nonpreemptive
from .preemptive import solve_preemptive
from .render import svg_timeline, text_gantt

OK, FAIL_VALIDATION, FAIL_BUDGET, FAIL_PRECONDITION = 0, 2, 3, 4


def _mode_arg(value: str) -> Preemption:
    return Preemption(value)


def _read_formula(path: str) -> generators.CnfFormula:
    return generators.parse_dimacs(Path(path).read_text())


def _generate(args) -> int:
    fam = args.family
    if fam == "preemption-gap":
        instance = generators.preemption_gap_instance(args.preemption)
    elif fam == "blocked-chain":
        instance = generators.blocked_chain_instance(args.preemption)
    elif fam == "staircase":
        instance = generators.staircase_instance(args.levels, args.scale, args.preemption)
    elif fam == "sat-gadget":
        instance = generators.sat_window_gadget(
            _read_formula(args.cnf), args.t1, args.t2, args.horizon, args.preemption
        )
    elif fam == "sat-grid":
        instance = generators.sat_gate_grid(_read_formula(args.cnf))
    elif fam == "sat-paths":
        instance = generators.sat_disjoint_paths(_read_formula(args.cnf))
    elif fam == "partition":
        instance = generators.partition_chain([int(x) for x in args.numbers.split(",")])
    elif fam == "random":
        instance = generators.random_instance(
            args.seed, args.nodes, args.density, args.max_window, args.max_p, tuple(args.mix)
        )
    elif fam == "random-path":
        instance = generators.random_path_instance(
            args.seed, args.edges, args.max_window, args.max_p, tuple(args.mix)
        )
    else:  # pragma: no cover - argparse restricts choices
        print(f"unknown family {fam!r}", file=sys.stderr)
        return FAIL_VALIDATION
    text = instance_to_json(instance)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def _solve(args) -> int:
    instance_path = Path(args.instance)
    raw = instance_path.read_text()
    instance = instance_from_json(raw)
    report = validate(instance)
    if not report:
        for where, reason in report.violations:
            print(f"invalid instance: {where}: {reason}", file=sys.stderr)
        return FAIL_VALIDATION
    objective = Objective.MAX_CONNECT if args.objective == "max" else Objective.MIN_DISCONNECT
    budget = SearchBudget(args.budget)
    params: dict = {"objective": args.objective}

    started = time.perf_counter()
    schedule = None
    value = None
    budget_status = "ok"

    mode = args.mode
    if mode == "preemptive":
        schedule, value = solve_preemptive(instance, objective)
    elif mode == "nonpreemptive-approx":
        if objective is not Objective.MAX_CONNECT:
            raise PreconditionError("the candidate approximation maximizes connectivity only")
        schedule, score, value = approx_max_connectivity(instance)
        params["guarantee_score"] = rat_str(score)
    elif mode == "path-split":
        pre_sched, pre_value = solve_preemptive(instance, Objective.MIN_DISCONNECT)
        schedule = split_nonpreemptive(instance, pre_sched)
        params["preemptive_disconnected"] = rat_str(pre_value)
        profile = connectivity_profile(instance, schedule)
        value = profile.connected_time if objective is Objective.MAX_CONNECT else profile.disconnected_time
    elif mode == "path-exact":
        result = exact_nonpreemptive_path(instance, objective, budget, args.paranoia_halfint)
        schedule, value, budget_status = _unpack(result)
        params["budget"] = args.budget
    elif mode == "mixed-2approx":
        if objective is not Objective.MIN_DISCONNECT:
            raise PreconditionError("the mixed approximation minimizes disconnection only")
        schedule, value = mixed_two_approx(instance, budget)
    elif mode == "brute-np":
        result = brute_nonpreemptive(instance, objective, budget)
        schedule, value, budget_status = _unpack(result)
        params["budget"] = args.budget
    elif mode == "brute-intpmtn":
        result = brute_integral_preemptive(instance, objective, budget)
        schedule, value, budget_status = _unpack(result)
        params["budget"] = args.budget
    elif mode == "brute-mixed":
        result = brute_mixed(instance, objective, budget, args.paranoia_halfint)
        schedule, value, budget_status = _unpack(result)
        params["budget"] = args.budget
    else:  # pragma: no cover
        print(f"unknown mode {mode!r}", file=sys.stderr)
        return FAIL_VALIDATION
    wall = time.perf_counter() - started
    if args.paranoia_halfint:
        params["paranoia_halfint"] = True

    schedule_path = Path(args.schedule_out) if args.schedule_out else instance_path.with_suffix(".sched.json")
    result_path = Path(args.result_out) if args.result_out else instance_path.with_suffix(".result.json")
    if schedule is not None:
        schedule_path.write_text(schedule_to_json(schedule))
    run_result = {
        "instance_digest": hashlib.sha256(raw.encode()).hexdigest(),
        "solver": mode,
        "parameters": params,
        "objective": args.objective,
        "value": None if value is None else rat_str(value),
        "schedule_file": str(schedule_path) if schedule is not None else None,
        "budget_status": budget_status,
        "wall_time_seconds": round(wall, 6),
    }
    result_path.write_text(json.dumps(run_result, indent=2) + "\n")
    if budget_status == "exceeded":
        print("search budget exceeded", file=sys.stderr)
        return FAIL_BUDGET
    print(f"{mode}: {args.objective} value = {rat_str(value)}")
    return OK


def _unpack(result: BruteResult):
    if result.exceeded:
        return None, None, "exceeded"
    return result.schedule, result.value, "ok"


def _eval(args) -> int:
    instance = instance_from_json(Path(args.instance).read_text())
    schedule = schedule_from_json(Path(args.schedule).read_text())
    report = validate(instance)
    if not report:
        for where, reason in report.violations:
            print(f"invalid instance: {where}: {reason}", file=sys.stderr)
        return FAIL_VALIDATION
    feas = check_feasible(instance, schedule)
    if not feas:
        for eid, reason in feas.violations:
            print(f"infeasible: {eid}: {reason}", file=sys.stderr)
        return FAIL_VALIDATION
    profile = connectivity_profile(instance, schedule)
    if args.format == "json":
        payload = {"feasible": True, **profile_to_json_obj(profile)}
        out = json.dumps(payload, indent=2) + "\n"
    elif args.format == "text":
        out = text_gantt(instance, schedule, profile) + "\n"
    else:
        out = svg_timeline(instance, schedule, profile)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="connsched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit a named instance family as JSON")
    gen.add_argument("family", choices=[
        "preemption-gap", "blocked-chain", "staircase", "sat-gadget", "sat-grid",
        "sat-paths", "partition", "random", "random-path",
    ])
    gen.add_argument("--preemption", type=_mode_arg, default=Preemption.ARBITRARY,
                     help="job preemption mode where the family allows a choice")
    gen.add_argument("--levels", type=int, default=2)
    gen.add_argument("--scale", type=int, default=2)
    gen.add_argument("--cnf", help="DIMACS file with three-literal clauses")
    gen.add_argument("--t1", type=int, default=0)
    gen.add_argument("--t2", type=int, default=1)
    gen.add_argument("--horizon", type=int, default=None)
    gen.add_argument("--numbers", default="1,1")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--nodes", type=int, default=5)
    gen.add_argument("--edges", type=int, default=5)
    gen.add_argument("--density", type=float, default=0.3)
    gen.add_argument("--max-window", type=int, default=4)
    gen.add_argument("--max-p", type=int, default=2)
    gen.add_argument("--mix", type=lambda s: [int(x) for x in s.split(",")], default=[1, 0, 0],
                     help="weights arbitrary,integral,none")
    gen.add_argument("-o", "--out")
    gen.set_defaults(func=_generate)

    solve = sub.add_parser("solve", help="run a solver on an instance file")
    solve.add_argument("mode", choices=[
        "preemptive", "nonpreemptive-approx", "path-split", "path-exact",
        "mixed-2approx", "brute-np", "brute-intpmtn", "brute-mixed",
    ])
    solve.add_argument("instance")
    solve.add_argument("--objective", choices=["max", "min"], default="max")
    solve.add_argument("--budget", type=int, default=SearchBudget().max_nodes)
    solve.add_argument("--paranoia-halfint", action="store_true",
                       help="search half-integral starts in exact path solvers")
    solve.add_argument("--schedule-out")
    solve.add_argument("--result-out")
    solve.set_defaults(func=_solve)

    ev = sub.add_parser("eval", help="feasibility and connectivity report for a schedule")
    ev.add_argument("instance")
    ev.add_argument("schedule")
    ev.add_argument("--format", choices=["json", "text", "svg"], default="json")
    ev.add_argument("--out")
    ev.set_defaults(func=_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"precondition not met: {exc}", file=sys.stderr)
        return FAIL_PRECONDITION
    except (ValidationError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
