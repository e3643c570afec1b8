"""Optimal harvesting when fecundity is hysteretic.

In the hysteretic variant the fecundity state s is a second, discrete state
variable: dropping below x_p collapses fecundity (s = 0) and the stock must
climb all the way to x_p_h > x_p before full fecundity (s = 1) returns.
The full-fecundity side is the same floor-constrained problem as in the
plain tipping model (the floor is still x_p: while s = 1 the only thing to
avoid is falling below x_p).  The depressed side is the recovery problem
with the more distant target x_p_h, which raises the cost of austerity and
pushes the give-up stock outward: the hysteretic Skiba stock exceeds the
plain one, and when it exceeds x_p itself a collapse is never worth
reversing (permanent collapse).
"""

from __future__ import annotations

from dataclasses import dataclass

from .composite import Regime, classify
from .high_fecundity import HighSolution, default_x_max, solve_constrained_high, v_star
from .low_fecundity import FLOOR_REL, LowSolution, solve_low
from .model import ModelParams, notional_steady_state
from .saddle import PolicyCurve, eval_policy, policy_value

__all__ = [
    "HystSolution",
    "solve_hysteretic",
    "hysteretic_policy_at",
    "hysteretic_value_at",
]


@dataclass(frozen=True)
class PostRecovery:
    """What happens right after the stock regains full fecundity at x_p_h."""

    start: float
    steady_state: tuple[float, float]
    descends: bool


@dataclass(frozen=True)
class HystSolution:
    """Spliced optimal policy for the hysteretic problem, indexed by (x, s)."""

    params: ModelParams
    regime: Regime
    high: HighSolution
    low: LowSolution
    post_recovery: PostRecovery | None
    x_max: float
    x_floor: float

    @property
    def skiba(self) -> float | None:
        return self.low.skiba

    @property
    def permanent_collapse(self) -> bool:
        if self.regime is Regime.NO_HIGH_STEADY_STATE:
            return True
        return self.skiba is not None and self.skiba > self.params.x_p


def solve_hysteretic(
    p: ModelParams,
    x_max: float | None = None,
    x_floor: float | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> HystSolution:
    """Solve the hysteretic problem end to end."""
    if p.x_p_h is None:
        raise ValueError("hysteretic solve requires x_p_h")
    if x_max is None:
        x_max = default_x_max(p)
    if x_max <= p.x_p_h:
        raise ValueError(f"x_max must exceed x_p_h = {p.x_p_h}")
    if x_floor is None:
        x_floor = FLOOR_REL * p.x_p
    high = solve_constrained_high(p, x_max=x_max, rtol=rtol, atol=atol)
    v_target = float(v_star(high, p.x_p_h))
    low = solve_low(p, target=p.x_p_h, v_high_at_target=v_target,
                    x_floor=x_floor, rtol=rtol, atol=atol)
    regime = classify(high.regime, low.skiba, low.recoverable)
    post = None
    if low.recoverable:
        x_hat, _ = notional_steady_state(1.0, p)
        post = PostRecovery(
            start=p.x_p_h,
            steady_state=high.steady_state,
            descends=bool(x_hat < p.x_p_h),
        )
    return HystSolution(
        params=p, regime=regime, high=high, low=low,
        post_recovery=post, x_max=x_max, x_floor=x_floor,
    )


def _curve_for(sol: HystSolution, x: float, s: int) -> PolicyCurve:
    p = sol.params
    if s not in (0, 1):
        raise ValueError(f"fecundity state must be 0 or 1, got {s}")
    if s == 1:
        if x < p.x_p:
            raise ValueError(
                f"inconsistent state: s = 1 requires x >= x_p = {p.x_p}"
            )
        if sol.regime is Regime.NO_HIGH_STEADY_STATE:
            raise ValueError(
                "no optimal plan exists at full fecundity in the "
                "no-high-steady-state regime"
            )
        return sol.high.curve
    if x >= p.x_p_h:
        raise ValueError(
            f"inconsistent state: s = 0 requires x < x_p_h = {p.x_p_h}"
        )
    if sol.regime is Regime.NO_HIGH_STEADY_STATE or sol.low.austere_curve is None:
        if sol.low.low_saddle is None:
            raise ValueError("no policy curve available at depressed fecundity")
        return sol.low.low_saddle
    skiba = sol.skiba or 0.0
    if x >= skiba:
        return sol.low.austere_curve
    if sol.low.low_saddle is None:
        raise ValueError(f"stock {x} falls below the sampled austere branch")
    return sol.low.low_saddle


def hysteretic_policy_at(sol: HystSolution, x: float, s: int) -> float:
    """Optimal harvest at stock x in fecundity state s."""
    return float(eval_policy(_curve_for(sol, float(x), s), float(x)))


def hysteretic_value_at(sol: HystSolution, x: float, s: int) -> float:
    """Value function at (x, s)."""
    return float(policy_value(_curve_for(sol, float(x), s), float(x), sol.params))
