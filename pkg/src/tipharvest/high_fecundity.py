"""Optimal harvesting at full fecundity with the stock confined to x >= x_p.

With the tipping stock x_p acting as a floor, the solution takes one of two
shapes.  If the unconstrained full-fecundity steady state lies at or above
the floor, the constraint never binds and the policy is the plain saddle
path restricted to [x_p, x_max] (interior regime).  If the steady state
falls below the floor, the optimal path rides down to the floor in finite
time and parks there, harvesting exactly the recruitment flow; the policy
curve through (x_p, recruitment(x_p)) is recovered by reversed-time
integration (boundary regime).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams, notional_steady_state, recruit_smooth
from .saddle import (
    PolicyCurve,
    SAMPLES_PER_ARM,
    integrate_reversed,
    policy_value,
    resample_monotone,
    solve_saddle,
)

__all__ = ["HighSolution", "solve_constrained_high", "v_star"]

#: Relative margin that decides whether the floor binds.
_REGIME_REL = 1e-9


@dataclass(frozen=True)
class HighSolution:
    """Solution of the floor-constrained full-fecundity problem."""

    params: ModelParams
    regime: str  # "interior" or "boundary"
    curve: PolicyCurve
    steady_state: tuple[float, float]
    x_floor: float
    x_max: float


def default_x_max(p: ModelParams) -> float:
    """Stock span used when the caller does not pin one down."""
    x_hat, _ = notional_steady_state(1.0, p)
    return 4.0 * max(x_hat, p.x_p, p.x_p_h or 0.0)


def solve_constrained_high(
    p: ModelParams,
    x_max: float | None = None,
    x_floor: float | None = None,
    samples_per_arm: int = SAMPLES_PER_ARM,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> HighSolution:
    """Solve the full-fecundity problem with the stock floored at x_floor.

    The floor defaults to the tipping stock x_p.  `x_max` bounds the sampled
    span and defaults to four times the larger of the steady state and the
    floor.
    """
    if x_floor is None:
        x_floor = p.x_p
    if x_max is None:
        x_max = default_x_max(p)
    if not x_max > x_floor:
        raise ValueError(f"x_max must exceed the floor {x_floor}, got {x_max}")
    x_hat, h_hat = notional_steady_state(1.0, p)

    if x_hat >= x_floor * (1.0 - _REGIME_REL):
        # Interior: the floor never binds; clip the plain saddle.  The
        # requested span starts a whisker below the floor so the curve
        # still covers it when the steady state sits on top of the floor.
        curve = solve_saddle(
            1.0,
            p,
            x_lo=x_floor * (1.0 - 4e-6),
            x_hi=x_max,
            branch_id="high-interior",
            samples_per_arm=samples_per_arm,
            rtol=rtol,
            atol=atol,
        )
        return HighSolution(
            params=p,
            regime="interior",
            curve=curve,
            steady_state=(x_hat, h_hat),
            x_floor=x_floor,
            x_max=x_max,
        )

    # Boundary: paths fall to the floor in finite time and hold there, so
    # the floor point itself is the steady state and the policy curve grows
    # out of it.  Seeded exactly at zero drift, the reversed path leaves the
    # seed with infinite dh/dx, hence the reversed-time integration.
    h_seed = recruit_smooth(x_floor, 1.0, p)
    path = integrate_reversed(
        1.0,
        p,
        x_seed=x_floor,
        h_seed=h_seed,
        x_max=x_max,
        h_cap=20.0 * h_seed * max(x_max / x_floor, 1.0),
        rtol=rtol,
        atol=atol,
    )
    targets = np.geomspace(x_floor, x_max, 2 * samples_per_arm)
    xs, hs = resample_monotone(
        path.x, path.h, targets, exact=[(x_floor, h_seed), (path.x_end, path.h_end)]
    )
    curve = PolicyCurve(branch_id="high-boundary", factor=1.0, x=xs, h=hs)
    return HighSolution(
        params=p,
        regime="boundary",
        curve=curve,
        steady_state=(x_floor, h_seed),
        x_floor=x_floor,
        x_max=x_max,
    )


def v_star(sol: HighSolution, x):
    """Value of the constrained full-fecundity problem at stock x >= floor."""
    if np.any(np.asarray(x) < sol.x_floor * (1.0 - 1e-12)):
        raise ValueError(f"v_star is defined only for x >= {sol.x_floor}")
    return policy_value(sol.curve, np.maximum(x, sol.curve.x_lo), sol.params)
