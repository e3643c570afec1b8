"""Optimal harvesting of a renewable resource with recruitment tipping
points, hysteresis, and history-dependent policy (Skiba) thresholds."""

from .model import (
    H_MIN,
    ModelParams,
    SolverError,
    hamiltonian,
    hamiltonian_dh,
    marginal_utility,
    next_state,
    notional_steady_state,
    recruit_hysteretic,
    recruit_smooth,
    recruit_tipping,
    utility,
)
from .saddle import (
    PolicyCurve,
    SteadyStateLinearization,
    eval_policy,
    linearize_at_steady_state,
    policy_value,
    solve_saddle,
)
from .high_fecundity import HighSolution, solve_constrained_high, v_star
from .low_fecundity import (
    LowSolution,
    check_recoverability,
    skiba_point,
    solve_austere_branch,
    solve_low,
    terminal_harvest_root,
)
from .composite import (
    FullSolution,
    Regime,
    StandardPolicy,
    global_policy_at,
    global_value,
    is_austere,
    solve_full,
    standard_policy,
)
from .hysteresis import (
    HystSolution,
    hysteretic_policy_at,
    hysteretic_value_at,
    solve_hysteretic,
)
from .oracle import (
    CompareReport,
    DPConfig,
    DPResult,
    SkibaEstimate,
    compare,
    dp_skiba,
    dp_solve,
)
from .trajectory import EventKind, Trajectory, discounted_welfare, simulate

__version__ = "0.1.0"

__all__ = [
    "H_MIN",
    "ModelParams",
    "SolverError",
    "hamiltonian",
    "hamiltonian_dh",
    "marginal_utility",
    "next_state",
    "notional_steady_state",
    "recruit_hysteretic",
    "recruit_smooth",
    "recruit_tipping",
    "utility",
    "PolicyCurve",
    "SteadyStateLinearization",
    "eval_policy",
    "linearize_at_steady_state",
    "policy_value",
    "solve_saddle",
    "HighSolution",
    "solve_constrained_high",
    "v_star",
    "LowSolution",
    "check_recoverability",
    "skiba_point",
    "solve_austere_branch",
    "solve_low",
    "terminal_harvest_root",
    "FullSolution",
    "Regime",
    "StandardPolicy",
    "global_policy_at",
    "global_value",
    "is_austere",
    "solve_full",
    "standard_policy",
    "HystSolution",
    "hysteretic_policy_at",
    "hysteretic_value_at",
    "solve_hysteretic",
    "CompareReport",
    "DPConfig",
    "DPResult",
    "SkibaEstimate",
    "compare",
    "dp_skiba",
    "dp_solve",
    "EventKind",
    "Trajectory",
    "discounted_welfare",
    "simulate",
    "__version__",
]
