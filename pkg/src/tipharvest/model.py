"""Model primitives for harvesting a renewable resource with a recruitment
tipping point.

The stock x regenerates according to a concave recruitment function built
from the power family A * x**alpha.  Below a critical stock x_p recruitment
is depressed by a fecundity factor pi in (0, 1); at or above x_p the stock
recruits at full fecundity.  A planner extracts a harvest flow h and values
it through CRRA utility discounted at rate rho.  Everything downstream
(saddle paths, tipping-point policies, the dynamic-programming oracle) is
built on the functions defined here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "H_MIN",
    "ModelParams",
    "SolverError",
    "recruit_smooth",
    "recruit_tipping",
    "recruit_hysteretic",
    "next_state",
    "utility",
    "marginal_utility",
    "hamiltonian",
    "hamiltonian_dh",
    "notional_steady_state",
]

#: Harvest floor used by root finders and policy searches.  CRRA utility is
#: unbounded below as h -> 0 when sigma >= 1, so nothing ever evaluates at 0.
H_MIN = 1e-12

#: Width of the band around sigma = 1 that is routed to log utility.
_SIGMA_LOG_BAND = 1e-12


class SolverError(RuntimeError):
    """Numerical failure in a solver (integration, bracketing, convergence)."""


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the harvest problem.

    sigma : float
        Relative risk aversion of the planner, > 0.  Values within 1e-12 of
        one select logarithmic utility.
    rho : float
        Discount rate per unit time, > 0.
    pi : float
        Fecundity factor applied to recruitment below the tipping stock,
        0 < pi < 1.
    x_p : float
        Tipping stock: recruitment is depressed for x < x_p and full for
        x >= x_p.
    x_p_h : float or None
        Optional recovery threshold for the hysteretic variant.  Once the
        stock has dipped below x_p, fecundity stays low until the stock
        climbs back to x_p_h > x_p.
    A, alpha : float
        Scale and curvature of the recruitment family A * x**alpha with
        A > 0 and 0 < alpha < 1.
    """

    sigma: float
    rho: float
    pi: float
    x_p: float
    x_p_h: float | None = None
    A: float = 1.0
    alpha: float = 0.5

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.rho > 0.0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not 0.0 < self.pi < 1.0:
            raise ValueError(f"pi must lie strictly in (0, 1), got {self.pi}")
        if not self.x_p > 0.0:
            raise ValueError(f"x_p must be positive, got {self.x_p}")
        if self.x_p_h is not None and not self.x_p_h > self.x_p:
            raise ValueError(
                f"x_p_h must exceed x_p ({self.x_p}), got {self.x_p_h}"
            )
        if not self.A > 0.0:
            raise ValueError(f"A must be positive, got {self.A}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(
                f"alpha must lie strictly in (0, 1), got {self.alpha}"
            )

    @property
    def log_utility(self) -> bool:
        return abs(self.sigma - 1.0) <= _SIGMA_LOG_BAND


def _check_stock(x) -> None:
    if np.any(np.asarray(x) < 0.0):
        raise ValueError("stock must be non-negative")


def _check_factor(factor: float) -> None:
    # factor = 0 is allowed so the oracle can run the pure drawdown problem.
    if not 0.0 <= factor <= 1.0:
        raise ValueError(f"fecundity factor must lie in [0, 1], got {factor}")


def recruit_smooth(x, factor: float, p: ModelParams):
    """Recruitment with a fixed fecundity factor, factor * A * x**alpha."""
    _check_stock(x)
    _check_factor(factor)
    return factor * p.A * x ** p.alpha


def recruit_smooth_dx(x, factor: float, p: ModelParams):
    """Derivative of `recruit_smooth` with respect to the stock."""
    _check_stock(x)
    _check_factor(factor)
    return factor * p.A * p.alpha * x ** (p.alpha - 1.0)


def recruit_tipping(x, p: ModelParams):
    """Recruitment with the tipping rule: depressed below x_p, full above.

    The boundary stock x = x_p itself recruits at full fecundity.
    """
    _check_stock(x)
    full = p.A * np.asarray(x, dtype=float) ** p.alpha
    out = np.where(np.asarray(x) >= p.x_p, full, p.pi * full)
    return float(out) if out.ndim == 0 else out


def recruit_hysteretic(x, s: int, p: ModelParams):
    """Recruitment given the fecundity state s (0 = depressed, 1 = full)."""
    _check_stock(x)
    if s not in (0, 1):
        raise ValueError(f"fecundity state must be 0 or 1, got {s}")
    factor = 1.0 if s == 1 else p.pi
    return factor * p.A * x ** p.alpha


def next_state(x: float, s: int, p: ModelParams) -> int:
    """Fecundity state after observing stock x, under the hysteresis rule.

    Dropping below x_p always collapses fecundity; recovery requires
    climbing to the higher threshold x_p_h.
    """
    if p.x_p_h is None:
        raise ValueError("next_state requires x_p_h to be set")
    if s not in (0, 1):
        raise ValueError(f"fecundity state must be 0 or 1, got {s}")
    _check_stock(x)
    if x < p.x_p:
        return 0
    if x >= p.x_p_h:
        return 1
    return s


def utility(h, sigma: float):
    """CRRA flow utility, h**(1-sigma)/(1-sigma), or log(h) at sigma = 1."""
    if np.any(np.asarray(h) <= 0.0):
        raise ValueError("harvest must be positive")
    if abs(sigma - 1.0) <= _SIGMA_LOG_BAND:
        return np.log(h)
    return h ** (1.0 - sigma) / (1.0 - sigma)


def marginal_utility(h, sigma: float):
    """Marginal utility h**(-sigma)."""
    if np.any(np.asarray(h) <= 0.0):
        raise ValueError("harvest must be positive")
    return h ** (-sigma)


def hamiltonian(x, h, lam, factor: float, p: ModelParams):
    """Current-value Hamiltonian u(h) + lam * (recruitment - h)."""
    return utility(h, p.sigma) + lam * (recruit_smooth(x, factor, p) - h)


def hamiltonian_dh(x, h, factor: float, p: ModelParams):
    """Slope of the maximized Hamiltonian in h along lam = u'(h).

    Substituting the first-order condition lam = u'(h) into the Hamiltonian
    and differentiating leaves u''(h) * (recruitment - h): the sign of the
    stock drift decides whether extra harvesting helps or hurts.
    """
    if np.any(np.asarray(h) <= 0.0):
        raise ValueError("harvest must be positive")
    u2 = -p.sigma * h ** (-p.sigma - 1.0)
    return u2 * (recruit_smooth(x, factor, p) - h)


def notional_steady_state(factor: float, p: ModelParams) -> tuple[float, float]:
    """Steady state of the smooth problem at a fixed fecundity factor.

    The steady state equates the marginal recruitment to the discount rate,
    factor * A * alpha * x**(alpha-1) = rho, and harvests the recruitment
    flow.  Returns (x_hat, h_hat).
    """
    if not 0.0 < factor <= 1.0:
        raise ValueError(
            f"fecundity factor must lie in (0, 1] for a steady state, got {factor}"
        )
    x_hat = (factor * p.A * p.alpha / p.rho) ** (1.0 / (1.0 - p.alpha))
    h_hat = factor * p.A * x_hat ** p.alpha
    return x_hat, h_hat
