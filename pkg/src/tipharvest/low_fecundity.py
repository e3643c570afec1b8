"""Optimal harvesting below the tipping stock.

Below the target stock (the tipping stock, or the recovery threshold in the
hysteretic variant) recruitment runs at the depressed factor pi.  Two
candidate plans compete:

* the standard plan: follow the depressed-fecundity saddle path and settle
  at its own steady state, never recovering;
* the austere plan: harvest little enough that the stock climbs to the
  target in finite time, at which point the full-fecundity value v_star
  takes over.

The austere branch is pinned down by value matching at the target: its
terminal harvest solves H(target, h, u'(h)) = rho * v_star(target), which
has exactly one root below the recruitment flow because the maximized
Hamiltonian is strictly decreasing in h on that side.  Where the values of
the two plans cross (they cross at most once; the difference is strictly
increasing) sits the Skiba stock: standard below, austere above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    H_MIN,
    ModelParams,
    SolverError,
    hamiltonian,
    marginal_utility,
    notional_steady_state,
    recruit_smooth,
    utility,
)
from .saddle import (
    PolicyCurve,
    SAMPLES_PER_ARM,
    eval_policy,
    integrate_reversed,
    policy_value,
    resample_monotone,
    solve_saddle,
)

__all__ = [
    "LowSolution",
    "check_recoverability",
    "terminal_harvest_root",
    "solve_austere_branch",
    "skiba_point",
    "solve_low",
]

#: Relative drift threshold that ends the austere branch at the zero-drift
#: locus: integration stops where pi*f(x) - h < LOCUS_REL * pi*f(x).
LOCUS_REL = 1e-9

#: Default stock floor, relative to the target, for the sampled curves.
FLOOR_REL = 1e-6

#: A depressed steady state closer to the target than this (relatively) is
#: treated as sitting on it: the saddle then cannot be sampled up to the
#: target, and the standard and austere plans coincide there anyway.
_SADDLE_CLEARANCE = 2e-6


@dataclass(frozen=True)
class LowSolution:
    """Solution of the depressed-fecundity problem below a target stock.

    `skiba` is None when the target is unreachable (not recoverable); it is
    0.0 when the austere plan dominates everywhere below the target.
    `x_prime` is the lower end of the austere branch: the stock where the
    branch meets the zero-drift locus, or 0.0 if it reached the floor.
    """

    params: ModelParams
    target: float
    v_high_at_target: float
    recoverable: bool
    h_terminal: float | None
    austere_curve: PolicyCurve | None
    x_prime: float
    low_saddle: PolicyCurve | None
    skiba: float | None
    x_floor: float


def check_recoverability(p: ModelParams, target: float, v_high_at_target: float) -> bool:
    """Can austerity beat settling at the depressed steady state?

    If the depressed steady state lies at or above the target, the standard
    plan itself drifts across the target, so recovery is trivially on the
    table.  Otherwise recovery pays only if the depressed saddle harvest at
    the target does not exceed the full recruitment flow there: the value
    chain v_star(target) >= u(f(target))/rho >= value of the standard plan
    then leaves room for a terminal harvest.
    """
    x_low, _ = notional_steady_state(p.pi, p)
    if x_low >= target * (1.0 - _SADDLE_CLEARANCE):
        return True
    saddle = solve_saddle(p.pi, p, x_lo=0.9 * target, x_hi=target, branch_id="probe")
    h_at_target = eval_policy(saddle, target)
    return bool(h_at_target <= recruit_smooth(target, 1.0, p))


def terminal_harvest_root(p: ModelParams, target: float, v_high_at_target: float) -> float:
    """Terminal harvest of the austere branch at the target stock.

    Solves u(h) + u'(h) * (pi*f(target) - h) = rho * v_high_at_target for
    the unique root h in (0, pi*f(target)).  On that interval the left side
    is strictly decreasing in h (its derivative is u''(h) times the positive
    drift), so plain bisection is safe.
    """
    f_low = recruit_smooth(target, p.pi, p)
    f_high = recruit_smooth(target, 1.0, p)
    v_floor = utility(f_high, p.sigma) / p.rho
    if v_high_at_target < v_floor - 1e-12 * (1.0 + abs(v_floor)):
        raise ValueError(
            "v_high_at_target falls below u(f(target))/rho; "
            "no austere terminal harvest exists"
        )

    rhs = p.rho * v_high_at_target

    def g(h: float) -> float:
        lam = marginal_utility(h, p.sigma)
        return float(hamiltonian(target, h, lam, p.pi, p) - rhs)

    # The slope of g is u''(h) * (pi*f - h) < 0 strictly inside the
    # bracket; verify on a coarse sample before trusting bisection.
    probe = np.geomspace(max(H_MIN, 1e-9 * f_low), f_low * (1.0 - 1e-9), 64)
    gp = np.array([g(h) for h in probe])
    if np.any(np.diff(gp) >= 0.0):
        raise SolverError("terminal-harvest objective is not strictly decreasing")

    lo, hi = float(probe[0]), float(probe[-1])
    g_lo, g_hi = g(lo), g(hi)
    if g_lo < 0.0:
        raise SolverError(
            f"terminal-harvest bracket failed at the low end (g({lo:.3g}) = {g_lo:.3g})"
        )
    if g_hi > 0.0:
        raise SolverError(
            "terminal-harvest bracket failed: even harvesting the whole "
            "recruitment flow undershoots rho * v_star; the v_star input "
            "violates its lower bound"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    resid = abs(g(root))
    tol = 1e-10 * (1.0 + abs(rhs))
    if resid > tol:
        raise SolverError(
            f"terminal-harvest root residual {resid:.3g} exceeds tolerance {tol:.3g}"
        )
    return root


def solve_austere_branch(
    p: ModelParams,
    target: float,
    h_terminal: float,
    x_floor: float | None = None,
    samples: int = 2 * SAMPLES_PER_ARM,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> tuple[PolicyCurve, float]:
    """Austere recovery branch ending at (target, h_terminal).

    Integrates the optimality system backwards from the target until the
    branch meets the zero-drift locus (at the stock x' returned alongside
    the curve) or reaches the floor (x' reported as 0.0).  The harvest along
    the branch is hump-shaped in general, which is why the integration runs
    in reversed time rather than in the stock variable.
    """
    if x_floor is None:
        x_floor = FLOOR_REL * target
    f_low = recruit_smooth(target, p.pi, p)
    if not 0.0 < h_terminal < f_low:
        raise ValueError("terminal harvest must sit strictly below the recruitment flow")
    path = integrate_reversed(
        p.pi,
        p,
        x_seed=target,
        h_seed=h_terminal,
        x_min=x_floor,
        locus_rel=LOCUS_REL,
        h_cap=2.0 * f_low,
        rtol=rtol,
        atol=atol,
    )
    x_prime = path.x_end if path.stop_reason == "locus" else 0.0
    x_lo = max(path.x_end, x_floor)
    targets = np.geomspace(x_lo, target, samples)
    xs, hs = resample_monotone(
        path.x, path.h, targets,
        exact=[(target, h_terminal), (path.x_end, path.h_end)],
    )
    curve = PolicyCurve(branch_id="austere-recovery", factor=p.pi, x=xs, h=hs)
    return curve, x_prime


def _value_gap(x: float, austere: PolicyCurve, low_saddle: PolicyCurve, p: ModelParams) -> float:
    return float(
        policy_value(austere, x, p) - policy_value(low_saddle, x, p)
    )


def skiba_point(
    p: ModelParams,
    austere: PolicyCurve,
    low_saddle: PolicyCurve | None,
    v_high_at_target: float | None = None,
    scan_points: int = 513,
) -> float:
    """Stock where the austere and standard values cross.

    Returns 0.0 when the standard plan is nowhere better (no depressed
    saddle to settle on, or austerity dominates the whole overlap).  The
    value difference is strictly increasing in x, so a sign scan plus
    bisection pins the unique crossing; more than one sign change means the
    inputs are inconsistent and raises.
    """
    if low_saddle is None:
        return 0.0
    if v_high_at_target is not None:
        v_end = policy_value(austere, austere.x_hi, p)
        if abs(v_end - v_high_at_target) > 1e-6 * (1.0 + abs(v_high_at_target)):
            raise SolverError(
                "austere branch value at the target disagrees with v_star"
            )
    lo = max(austere.x_lo, low_saddle.x_lo)
    hi = min(austere.x_hi, low_saddle.x_hi)
    if not lo < hi:
        raise ValueError("austere branch and depressed saddle do not overlap")
    grid = np.geomspace(lo, hi, scan_points)
    gap = np.array([_value_gap(x, austere, low_saddle, p) for x in grid])
    signs = np.sign(gap)
    flips = np.nonzero(np.diff(signs) != 0.0)[0]
    crossings = [i for i in flips if signs[i] != 0.0 and signs[i + 1] != 0.0]
    if len(crossings) > 1:
        locs = ", ".join(f"{grid[i]:.6g}" for i in crossings)
        raise SolverError(
            f"value difference changes sign more than once (near x = {locs}); "
            "single-crossing assumption violated"
        )
    if np.all(gap > 0.0):
        return 0.0
    if np.all(gap < 0.0):
        raise SolverError(
            "austere value never overtakes the standard plan below the target"
        )
    if not crossings:
        # An exact zero landed on the grid.
        j = int(np.nonzero(signs == 0.0)[0][0])
        return float(grid[j])
    i = crossings[0]
    a, b = float(grid[i]), float(grid[i + 1])
    ga = gap[i]
    tol = 1e-8 * austere.x_hi
    while b - a > tol:
        mid = 0.5 * (a + b)
        gm = _value_gap(mid, austere, low_saddle, p)
        if (gm < 0.0) == (ga < 0.0):
            a, ga = mid, gm
        else:
            b = mid
    return 0.5 * (a + b)


def solve_low(
    p: ModelParams,
    target: float,
    v_high_at_target: float,
    x_floor: float | None = None,
    samples_per_arm: int = SAMPLES_PER_ARM,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> LowSolution:
    """Solve the depressed-fecundity problem below `target`.

    `v_high_at_target` is the value of whatever plan takes over once the
    stock reaches the target (the constrained full-fecundity value there).
    """
    if x_floor is None:
        x_floor = FLOOR_REL * target
    if not 0.0 < x_floor < target:
        raise ValueError("x_floor must lie strictly between 0 and the target")
    x_low, _ = notional_steady_state(p.pi, p)

    low_saddle = None
    if x_low < target * (1.0 - _SADDLE_CLEARANCE):
        low_saddle = solve_saddle(
            p.pi,
            p,
            x_lo=x_floor,
            x_hi=target,
            branch_id="low-saddle",
            samples_per_arm=samples_per_arm,
            rtol=rtol,
            atol=atol,
        )

    recoverable = True
    if low_saddle is not None:
        h_at_target = eval_policy(low_saddle, target)
        recoverable = bool(h_at_target <= recruit_smooth(target, 1.0, p))

    if not recoverable:
        return LowSolution(
            params=p,
            target=target,
            v_high_at_target=v_high_at_target,
            recoverable=False,
            h_terminal=None,
            austere_curve=None,
            x_prime=0.0,
            low_saddle=low_saddle,
            skiba=None,
            x_floor=x_floor,
        )

    h_term = terminal_harvest_root(p, target, v_high_at_target)
    austere, x_prime = solve_austere_branch(
        p, target, h_term, x_floor=x_floor, samples=2 * samples_per_arm,
        rtol=rtol, atol=atol,
    )
    skiba = skiba_point(p, austere, low_saddle, v_high_at_target)
    return LowSolution(
        params=p,
        target=target,
        v_high_at_target=v_high_at_target,
        recoverable=True,
        h_terminal=h_term,
        austere_curve=austere,
        x_prime=x_prime,
        low_saddle=low_saddle,
        skiba=skiba,
        x_floor=x_floor,
    )
