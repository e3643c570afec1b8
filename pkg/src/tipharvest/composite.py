"""Global optimal policy across the tipping stock.

The full problem splices the floor-constrained full-fecundity solution
(valid at and above the tipping stock x_p) onto the depressed-fecundity
solution below it.  The regime taxonomy crosses two binary facts:

* interior vs boundary: does the full-fecundity steady state sit above the
  tipping stock, or does the optimal path park on the tipping stock itself;
* with vs trivial Skiba: is there an interior stock below x_p where giving
  up on recovery becomes optimal, or does the austere plan dominate all the
  way down.

A separate terminal regime, NO_HIGH_STEADY_STATE, marks parameter sets
where recovery never pays: the problem then has no optimal plan above x_p
(any candidate is dominated by one that tips eventually), and this module
only answers below x_p for it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, notional_steady_state
from .high_fecundity import HighSolution, default_x_max, solve_constrained_high, v_star
from .low_fecundity import FLOOR_REL, LowSolution, solve_low
from .saddle import PolicyCurve, eval_policy, policy_value, solve_saddle

__all__ = [
    "Regime",
    "FullSolution",
    "StandardPolicy",
    "solve_full",
    "global_policy_at",
    "global_value",
    "standard_policy",
    "is_austere",
]


class Regime(enum.Enum):
    INTERIOR_HIGH_TRIVIAL_SKIBA = "interior-high-trivial-skiba"
    INTERIOR_HIGH_WITH_SKIBA = "interior-high-with-skiba"
    BOUNDARY_HIGH_TRIVIAL_SKIBA = "boundary-high-trivial-skiba"
    BOUNDARY_HIGH_WITH_SKIBA = "boundary-high-with-skiba"
    NO_HIGH_STEADY_STATE = "no-high-steady-state"


def classify(high_regime: str, skiba: float | None, recoverable: bool) -> Regime:
    if not recoverable:
        return Regime.NO_HIGH_STEADY_STATE
    with_skiba = skiba is not None and skiba > 0.0
    if high_regime == "interior":
        return (
            Regime.INTERIOR_HIGH_WITH_SKIBA
            if with_skiba
            else Regime.INTERIOR_HIGH_TRIVIAL_SKIBA
        )
    return (
        Regime.BOUNDARY_HIGH_WITH_SKIBA
        if with_skiba
        else Regime.BOUNDARY_HIGH_TRIVIAL_SKIBA
    )


@dataclass(frozen=True)
class FullSolution:
    """Spliced optimal policy for the tipping problem.

    Dispatch below x_p: standard depressed saddle on (0, skiba), austere
    recovery on [skiba, x_p); the Skiba stock itself follows the austere
    plan.  At and above x_p the constrained full-fecundity curve governs.
    In the NO_HIGH_STEADY_STATE regime only stocks below x_p are answered.
    """

    params: ModelParams
    regime: Regime
    high: HighSolution
    low: LowSolution
    x_max: float
    x_floor: float

    @property
    def skiba(self) -> float | None:
        return self.low.skiba

    @property
    def steady_state_high(self) -> tuple[float, float] | None:
        if self.regime is Regime.NO_HIGH_STEADY_STATE:
            return None
        return self.high.steady_state

    @property
    def steady_state_low(self) -> tuple[float, float] | None:
        """Depressed steady state, when it is actually settled on."""
        if self.low.low_saddle is None:
            return None
        if self.regime is not Regime.NO_HIGH_STEADY_STATE and (
            self.skiba is None or self.skiba <= 0.0
        ):
            return None
        return notional_steady_state(self.params.pi, self.params)


def solve_full(
    p: ModelParams,
    x_max: float | None = None,
    x_floor: float | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> FullSolution:
    """Solve the tipping problem end to end on [x_floor, x_max]."""
    if x_max is None:
        x_max = default_x_max(p)
    if x_floor is None:
        x_floor = FLOOR_REL * p.x_p
    high = solve_constrained_high(p, x_max=x_max, rtol=rtol, atol=atol)
    v_p = float(v_star(high, p.x_p))
    low = solve_low(p, target=p.x_p, v_high_at_target=v_p,
                    x_floor=x_floor, rtol=rtol, atol=atol)
    regime = classify(high.regime, low.skiba, low.recoverable)
    return FullSolution(
        params=p, regime=regime, high=high, low=low,
        x_max=x_max, x_floor=x_floor,
    )


def _curve_for(sol: FullSolution, x: float) -> PolicyCurve:
    p = sol.params
    if x >= p.x_p:
        if sol.regime is Regime.NO_HIGH_STEADY_STATE:
            raise ValueError(
                "no optimal plan exists at or above x_p in the "
                "no-high-steady-state regime"
            )
        return sol.high.curve
    if sol.regime is Regime.NO_HIGH_STEADY_STATE:
        if sol.low.low_saddle is None:
            raise ValueError("no policy curve available below x_p")
        return sol.low.low_saddle
    skiba = sol.skiba or 0.0
    if x >= skiba and sol.low.austere_curve is not None:
        return sol.low.austere_curve
    if sol.low.low_saddle is None:
        raise ValueError(f"stock {x} falls below the sampled austere branch")
    return sol.low.low_saddle


def global_policy_at(sol: FullSolution, x: float) -> float:
    """Optimal harvest at stock x under the spliced policy."""
    return float(eval_policy(_curve_for(sol, float(x)), float(x)))


def global_value(sol: FullSolution, x: float) -> float:
    """Value function at stock x under the spliced policy."""
    return float(policy_value(_curve_for(sol, float(x)), float(x), sol.params))


@dataclass(frozen=True)
class StandardPolicy:
    """Reference non-austere policy: each recruitment regime follows its own
    notional saddle path, ignoring the option value of crossing x_p."""

    low_saddle: PolicyCurve
    high_saddle: PolicyCurve
    x_p: float

    def harvest_at(self, x: float) -> float:
        curve = self.low_saddle if x < self.x_p else self.high_saddle
        return float(eval_policy(curve, x))

    def overlap(self, lo: float, hi: float) -> tuple[float, float]:
        lo = max(lo, self.low_saddle.x_lo)
        hi = min(hi, self.high_saddle.x_hi)
        return lo, hi


def standard_policy(
    p: ModelParams,
    x_max: float | None = None,
    x_floor: float | None = None,
) -> StandardPolicy:
    if x_max is None:
        x_max = default_x_max(p)
    if x_floor is None:
        x_floor = FLOOR_REL * p.x_p
    low = solve_saddle(p.pi, p, x_lo=x_floor, x_hi=p.x_p, branch_id="standard-low")
    high = solve_saddle(
        1.0, p, x_lo=p.x_p * (1.0 - 4e-6), x_hi=x_max, branch_id="standard-high"
    )
    return StandardPolicy(low_saddle=low, high_saddle=high, x_p=p.x_p)


def is_austere(
    candidate: PolicyCurve,
    reference: StandardPolicy,
    n: int = 512,
    rel_tol: float = 1e-9,
) -> bool:
    """Does the candidate harvest strictly less than the reference somewhere
    and never more (up to relative tolerance) on the overlap of domains?"""
    lo, hi = reference.overlap(candidate.x_lo, candidate.x_hi)
    if not lo < hi:
        raise ValueError("candidate and reference domains do not overlap")
    grid = np.geomspace(lo, hi, n)
    cand = np.array([eval_policy(candidate, x) for x in grid])
    ref = np.array([reference.harvest_at(x) for x in grid])
    never_more = bool(np.all(cand <= ref * (1.0 + rel_tol)))
    strictly_less = bool(np.any(cand < ref * (1.0 - rel_tol)))
    return never_more and strictly_less
