"""Saddle paths of the smooth harvest problem at a fixed fecundity factor.

Along an optimal path the harvest obeys the Euler rule
``dh/dt = (h / sigma) * (F'(x) - rho)`` with stock dynamics
``dx/dt = F(x) - h``, where F is the recruitment at the given factor.  The
unique steady state is a saddle, and the optimal policy h(x) is its stable
manifold.  The two arms are recovered by the usual trick of integrating
away from the steady state in reversed time; on the arms the stock moves
monotonically, so they are integrated directly in the stock variable
(time elimination, dh/dx), seeded a small step along the stable eigenvector.

Curves that start from a point where the stock drift vanishes (the austere
recovery branch and the boundary curve of the constrained problem) cannot
be parametrised by x near the seed: h(x) leaves with infinite slope there.
`integrate_reversed` integrates those in reversed time and resamples onto a
stock grid afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .model import (
    H_MIN,
    ModelParams,
    SolverError,
    hamiltonian,
    marginal_utility,
    notional_steady_state,
    recruit_smooth,
    recruit_smooth_dx,
    utility,
)

__all__ = [
    "PolicyCurve",
    "SteadyStateLinearization",
    "linearize_at_steady_state",
    "solve_saddle",
    "eval_policy",
    "policy_value",
    "integrate_reversed",
]

#: Relative displacement of the integration seeds from the steady state.
SEED_REL = 1e-6

#: Samples stored per integrated arm.
SAMPLES_PER_ARM = 2048


@dataclass(frozen=True)
class SteadyStateLinearization:
    """Local saddle structure at a smooth steady state.

    The Jacobian of (dx/dt, dh/dt) at the steady state is
    ``[[rho, -1], [h_hat * F''(x_hat) / sigma, 0]]``; its determinant is
    negative, so the eigenvalues straddle zero.  `stable_slope` is the
    h-per-x slope of the stable eigenvector, used to seed the arms.
    """

    x_hat: float
    h_hat: float
    jacobian_det: float
    stable_eigenvalue: float
    unstable_eigenvalue: float
    stable_slope: float


def linearize_at_steady_state(
    factor: float, p: ModelParams
) -> SteadyStateLinearization:
    x_hat, h_hat = notional_steady_state(factor, p)
    f2 = factor * p.A * p.alpha * (p.alpha - 1.0) * x_hat ** (p.alpha - 2.0)
    det = h_hat * f2 / p.sigma
    disc = math.sqrt(p.rho * p.rho - 4.0 * det)
    mu_stable = 0.5 * (p.rho - disc)
    mu_unstable = 0.5 * (p.rho + disc)
    # Eigenvector for mu: (1, rho - mu) from the first Jacobian row.
    return SteadyStateLinearization(
        x_hat=x_hat,
        h_hat=h_hat,
        jacobian_det=det,
        stable_eigenvalue=mu_stable,
        unstable_eigenvalue=mu_unstable,
        stable_slope=p.rho - mu_stable,
    )


@dataclass(frozen=True)
class PolicyCurve:
    """Sampled optimal-harvest branch h(x) at a fixed fecundity factor.

    Samples are strictly increasing in x with positive harvests.
    Evaluation between samples uses monotone piecewise-cubic interpolation,
    which never overshoots and reproduces the samples exactly.
    """

    branch_id: str
    factor: float
    x: np.ndarray
    h: np.ndarray

    def __post_init__(self) -> None:
        x = np.ascontiguousarray(np.asarray(self.x, dtype=float))
        h = np.ascontiguousarray(np.asarray(self.h, dtype=float))
        if x.ndim != 1 or x.shape != h.shape or x.size < 2:
            raise ValueError("curve needs matching 1-d x and h with >= 2 samples")
        if np.any(np.diff(x) <= 0.0):
            raise ValueError(f"curve {self.branch_id}: x samples must increase strictly")
        if np.any(h <= 0.0):
            raise ValueError(f"curve {self.branch_id}: harvests must be positive")
        if not 0.0 < self.factor <= 1.0:
            raise ValueError(f"fecundity factor must lie in (0, 1], got {self.factor}")
        x.flags.writeable = False
        h.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "h", h)

    @property
    def x_lo(self) -> float:
        return float(self.x[0])

    @property
    def x_hi(self) -> float:
        return float(self.x[-1])

    @cached_property
    def _interp(self) -> PchipInterpolator:
        return PchipInterpolator(self.x, self.h, extrapolate=False)


def eval_policy(curve: PolicyCurve, x):
    """Harvest prescribed by the curve at stock x (scalar or array).

    Rejects stocks outside the sampled domain; a hair of slack covers
    round-off at the endpoints.
    """
    xq = np.asarray(x, dtype=float)
    slack = 1e-12 * (curve.x_hi - curve.x_lo)
    if np.any(xq < curve.x_lo - slack) or np.any(xq > curve.x_hi + slack):
        raise ValueError(
            f"stock outside curve domain [{curve.x_lo}, {curve.x_hi}] "
            f"for branch {curve.branch_id}"
        )
    out = curve._interp(np.clip(xq, curve.x_lo, curve.x_hi))
    return float(out) if out.ndim == 0 else out


def policy_value(curve: PolicyCurve, x, p: ModelParams, factor: float | None = None):
    """Value of following the curve from stock x.

    Along an optimal branch the maximized current-value Hamiltonian is
    constant in time at rho * V, so V(x) = H(x, h(x), u'(h(x))) / rho.
    """
    if factor is None:
        factor = curve.factor
    h = eval_policy(curve, x)
    lam = marginal_utility(h, p.sigma)
    ham = hamiltonian(x, h, lam, factor, p)
    return ham / p.rho


def _policy_slope(x: float, h: float, factor: float, p: ModelParams) -> float:
    drift = recruit_smooth(x, factor, p) - h
    return (h / p.sigma) * (recruit_smooth_dx(x, factor, p) - p.rho) / drift


def _integrate_arm(
    factor: float,
    p: ModelParams,
    x_seed: float,
    h_seed: float,
    targets: np.ndarray,
    h_cap: float,
    rtol: float,
    atol: float,
) -> np.ndarray:
    """Integrate dh/dx from the seed through the target stocks.

    Targets must be ordered away from the seed (ascending for the right
    arm, descending for the left).  Returns harvests at the targets.
    """

    def rhs(x, y):
        return [_policy_slope(x, y[0], factor, p)]

    def hit_cap(x, y):
        return y[0] - h_cap

    def hit_floor(x, y):
        return y[0] - H_MIN

    hit_cap.terminal = True
    hit_floor.terminal = True
    sol = solve_ivp(
        rhs,
        (x_seed, targets[-1]),
        [h_seed],
        method="RK45",
        t_eval=targets,
        rtol=rtol,
        atol=atol,
        events=[hit_cap, hit_floor],
        dense_output=False,
    )
    if sol.status == 1:
        raise SolverError(
            f"saddle arm left the harvest bounds near x = {sol.t[-1] if sol.t.size else x_seed}"
        )
    if not sol.success:
        raise SolverError(f"saddle arm integration failed: {sol.message}")
    if sol.t.size != targets.size:
        raise SolverError("saddle arm integration stopped before covering its span")
    return sol.y[0]


def solve_saddle(
    factor: float,
    p: ModelParams,
    x_lo: float,
    x_hi: float,
    branch_id: str | None = None,
    samples_per_arm: int = SAMPLES_PER_ARM,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> PolicyCurve:
    """Stable manifold h(x) of the smooth problem on [x_lo, x_hi].

    The span is clipped to the side(s) of the steady state it actually
    covers; a span lying entirely on one side yields a single arm.  Sample
    stocks are log-spaced per arm and include the seeds, and the steady
    state itself when interior to the span.
    """
    if not 0.0 < x_lo < x_hi:
        raise ValueError(f"need 0 < x_lo < x_hi, got [{x_lo}, {x_hi}]")
    lin = linearize_at_steady_state(factor, p)
    x_hat, h_hat = lin.x_hat, lin.h_hat
    if branch_id is None:
        branch_id = f"saddle-{factor:g}"
    eps = SEED_REL * x_hat
    h_cap = 10.0 * h_hat * max(x_hi / x_hat, 1.0)

    xs: list[np.ndarray] = []
    hs: list[np.ndarray] = []
    if x_lo < x_hat - eps:
        hi = min(x_hi, x_hat - eps)
        targets = np.geomspace(hi, x_lo, samples_per_arm)
        seed_h = h_hat - eps * lin.stable_slope
        if hi < x_hat - eps:
            # Span ends below the steady state: walk down from the seed,
            # then keep only the requested window.
            targets = np.concatenate(([x_hat - eps], targets))
            arm = _integrate_arm(factor, p, x_hat - eps, seed_h, targets, h_cap, rtol, atol)
            xs.append(targets[:0:-1])
            hs.append(arm[:0:-1])
        else:
            arm = _integrate_arm(factor, p, x_hat - eps, seed_h, targets, h_cap, rtol, atol)
            xs.append(targets[::-1])
            hs.append(arm[::-1])
    if x_lo <= x_hat <= x_hi:
        xs.append(np.array([x_hat]))
        hs.append(np.array([h_hat]))
    if x_hi > x_hat + eps:
        lo = max(x_lo, x_hat + eps)
        targets = np.geomspace(lo, x_hi, samples_per_arm)
        seed_h = h_hat + eps * lin.stable_slope
        if lo > x_hat + eps:
            targets = np.concatenate(([x_hat + eps], targets))
            arm = _integrate_arm(factor, p, x_hat + eps, seed_h, targets, h_cap, rtol, atol)
            xs.append(targets[1:])
            hs.append(arm[1:])
        else:
            arm = _integrate_arm(factor, p, x_hat + eps, seed_h, targets, h_cap, rtol, atol)
            xs.append(targets)
            hs.append(arm)
    if not xs:
        raise SolverError("saddle span degenerate around the steady state")
    x_all = np.concatenate(xs)
    h_all = np.concatenate(hs)
    keep = np.concatenate(([True], np.diff(x_all) > 0.0))
    return PolicyCurve(branch_id=branch_id, factor=factor, x=x_all[keep], h=h_all[keep])


@dataclass(frozen=True)
class ReversedPath:
    """Raw reversed-time integration output before resampling."""

    x: np.ndarray
    h: np.ndarray
    stop_reason: str
    x_end: float
    h_end: float


def integrate_reversed(
    factor: float,
    p: ModelParams,
    x_seed: float,
    h_seed: float,
    x_min: float | None = None,
    x_max: float | None = None,
    locus_rel: float | None = None,
    h_cap: float | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> ReversedPath:
    """Integrate the optimality system backwards in time from a seed point.

    In reversed time the system is dx/dtau = h - F(x),
    dh/dtau = -(h / sigma) * (F'(x) - rho).  Integration stops at x_min or
    x_max, or (with locus_rel set) where the forward drift F(x) - h falls
    below locus_rel * F(x), i.e. where the path meets the zero-drift locus.
    Leaving the harvest bounds is an error, not a clip.
    """

    def rhs(tau, y):
        x, h = y
        return [
            h - recruit_smooth(x, factor, p),
            -(h / p.sigma) * (recruit_smooth_dx(x, factor, p) - p.rho),
        ]

    events = []
    reasons = []
    if x_min is not None:
        def ev_lo(tau, y, _m=x_min):
            return y[0] - _m
        ev_lo.terminal = True
        ev_lo.direction = -1
        events.append(ev_lo)
        reasons.append("x_min")
    if x_max is not None:
        def ev_hi(tau, y, _m=x_max):
            return y[0] - _m
        ev_hi.terminal = True
        ev_hi.direction = 1
        events.append(ev_hi)
        reasons.append("x_max")
    if locus_rel is not None:
        def ev_locus(tau, y, _r=locus_rel):
            f = recruit_smooth(y[0], factor, p)
            return (f - y[1]) - _r * f
        ev_locus.terminal = True
        ev_locus.direction = -1
        events.append(ev_locus)
        reasons.append("locus")
    if h_cap is not None:
        def ev_cap(tau, y, _c=h_cap):
            return y[1] - _c
        ev_cap.terminal = True
        events.append(ev_cap)
        reasons.append("h_cap")

    def ev_floor(tau, y):
        return y[1] - H_MIN
    ev_floor.terminal = True
    ev_floor.direction = -1
    events.append(ev_floor)
    reasons.append("h_floor")

    sol = solve_ivp(
        rhs,
        (0.0, 1e9),
        [x_seed, h_seed],
        method="RK45",
        dense_output=True,
        events=events,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise SolverError(f"reversed-time integration failed: {sol.message}")
    if sol.status != 1:
        raise SolverError(
            "reversed-time integration ran out of span without hitting a stop"
        )
    which = [i for i, te in enumerate(sol.t_events) if te.size > 0]
    idx = min(which, key=lambda i: sol.t_events[i][0])
    reason = reasons[idx]
    if reason in ("h_cap", "h_floor"):
        y_end = sol.y_events[idx][0]
        raise SolverError(
            f"reversed-time path left the harvest bounds at (x, h) = "
            f"({y_end[0]:.6g}, {y_end[1]:.6g})"
        )
    tau_end = sol.t_events[idx][0]
    x_end, h_end = sol.y_events[idx][0]

    # Dense, integrator-accurate polyline: refine each accepted step.
    knots = sol.t[sol.t <= tau_end]
    tau_fine = np.unique(
        np.concatenate(
            [np.linspace(a, b, 9) for a, b in zip(knots[:-1], knots[1:])]
            + [np.array([0.0, tau_end])]
        )
    )
    yf = sol.sol(tau_fine)
    return ReversedPath(
        x=yf[0], h=yf[1], stop_reason=reason, x_end=float(x_end), h_end=float(h_end)
    )


def resample_monotone(
    path_x: np.ndarray,
    path_h: np.ndarray,
    targets: np.ndarray,
    exact: list[tuple[float, float]] = (),
) -> tuple[np.ndarray, np.ndarray]:
    """Resample a monotone-in-x polyline onto target stocks.

    The raw path may stall in x near a vertical tangent; duplicates are
    dropped before fitting the monotone interpolant.  `exact` pins
    (x, h) pairs (seeds, event endpoints) to their integrator-exact values.
    """
    order = np.argsort(path_x)
    px = path_x[order]
    ph = path_h[order]
    keep = np.concatenate(([True], np.diff(px) > 0.0))
    px, ph = px[keep], ph[keep]
    if px.size < 4:
        raise SolverError("reversed-time path too short to resample")
    interp = PchipInterpolator(px, ph, extrapolate=False)
    tq = np.clip(targets, px[0], px[-1])
    hq = interp(tq)
    for xe, he in exact:
        j = np.argmin(np.abs(targets - xe))
        if abs(targets[j] - xe) <= 1e-9 * max(1.0, abs(xe)):
            hq[j] = he
    if np.any(~np.isfinite(hq)):
        raise SolverError("resampling produced non-finite harvests")
    return targets, hq
