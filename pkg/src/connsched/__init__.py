"""Edge-maintenance scheduling that keeps two terminals of a network connected."""

from .approx import (
    CandidateFamily,
    approx_max_connectivity,
    build_candidate,
    candidate_family,
    latest_start_points,
    score_candidate,
)
from .evaluate import (
    ConnectivityProfile,
    FeasibilityReport,
    IntervalSet,
    Schedule,
    check_feasible,
    connected_time,
    connectivity_profile,
    disconnected_time,
    make_schedule,
    schedule_from_json,
    schedule_to_json,
)
from .generators import (
    CnfFormula,
    PartitionInput,
    blocked_chain_instance,
    formula_satisfiable,
    parse_dimacs,
    partition_chain,
    partition_target,
    preemption_gap_instance,
    random_instance,
    random_path_instance,
    sat_disjoint_paths,
    sat_gate_grid,
    sat_window_gadget,
    staircase_instance,
    variable_job_ids,
)
from .lp import LinearProgram, LpOutcome, format_lp, lp_problem, solve_lp
from .model import (
    Edge,
    Instance,
    Objective,
    PreconditionError,
    Preemption,
    ValidationError,
    instance_from_json,
    instance_to_json,
    make_instance,
    normalize_parallel_edges,
    relevant_time_points,
    validate,
    with_preemption,
)
from .oracles import (
    BruteResult,
    SearchBudget,
    brute_integral_preemptive,
    brute_mixed,
    brute_nonpreemptive,
    fluid_min_busy,
)
from .paths import (
    MaintenanceProfile,
    exact_nonpreemptive_path,
    maintenance_profile,
    mixed_two_approx,
    split_nonpreemptive,
)
from .preemptive import (
    IntervalFlow,
    IntervalIndex,
    PathDecomposition,
    build_connectivity_lp,
    cancel_circulations,
    extract_schedule,
    flow_from_assignment,
    path_decompose,
    solve_preemptive,
)

__all__ = [name for name in dir() if not name.startswith("_")]
