"""Forward simulation of stock paths under a harvest policy.

`simulate` integrates dx/dt = f(x) - h(x) under a policy source (a full
solution, a hysteretic solution, a single policy curve, a constant harvest,
or a plain callable), detecting threshold crossings and convergence along
the way.  Crossing the tipping stock re-dispatches the policy and, in the
hysteretic model, flips the fecundity state; coming within 1e-6 (relative)
of the attractor of the governing branch snaps the path onto it exactly,
after which stock and harvest stay constant.  Discounted utility is
accumulated as an extra state of the same integration, with constant
stretches added in closed form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .composite import FullSolution, Regime, global_policy_at
from .hysteresis import HystSolution, hysteretic_policy_at
from .model import (
    ModelParams,
    SolverError,
    notional_steady_state,
    recruit_hysteretic,
    recruit_smooth,
    recruit_tipping,
    utility,
)
from .saddle import PolicyCurve, eval_policy

__all__ = ["EventKind", "Trajectory", "simulate", "discounted_welfare"]

#: Relative half-width of the snap tube around an absorbing point.
SNAP_REL = 1e-6

#: Relative nudge applied after a threshold crossing so the event does not
#: retrigger at the start of the next integration segment.
_NUDGE_REL = 1e-13


class EventKind(enum.Enum):
    CROSS_UP_HIGH = "CrossUpHigh"
    CROSS_DOWN_LOW = "CrossDownLow"
    ABSORBED_AT_BOUNDARY = "AbsorbedAtBoundary"
    CONVERGED_TO_STEADY_STATE = "ConvergedToSteadyState"
    EXTINCTION = "Extinction"
    DOMAIN_EXIT = "DomainExit"


@dataclass(frozen=True)
class Trajectory:
    """Simulated path: samples on the output grid plus one row per event."""

    t: np.ndarray
    x: np.ndarray
    h: np.ndarray
    s: np.ndarray
    events: tuple[tuple[float, EventKind], ...]
    welfare: float
    horizon: float
    ended: str  # "horizon", "absorbed", "converged", "extinct", "domain-exit"

    @property
    def h_end(self) -> float:
        return float(self.h[-1])

    @property
    def t_end(self) -> float:
        return float(self.t[-1])


@dataclass(frozen=True)
class _Crossing:
    threshold: float
    direction: int  # +1 up, -1 down
    new_s: int | None
    kind: EventKind


@dataclass(frozen=True)
class _Plan:
    """What can happen while the current branch governs."""

    attractor: tuple[float, float, EventKind] | None
    crossings: tuple[_Crossing, ...]
    x_min: float
    x_max: float | None


class _Driver:
    """Adapts a policy source to harvest/recruitment/dispatch callables."""

    def __init__(self, source, p: ModelParams, s0: int | None):
        self.p = p
        self.source = source
        if isinstance(source, FullSolution):
            if s0 is not None:
                raise ValueError("s0 only applies to hysteretic solutions")
            self.kind = "full"
        elif isinstance(source, HystSolution):
            self.kind = "hyst"
        elif isinstance(source, PolicyCurve):
            self.kind = "curve"
        elif isinstance(source, (int, float)) and not isinstance(source, bool):
            if not float(source) > 0.0:
                raise ValueError("constant harvest must be positive")
            self.kind = "const"
        elif callable(source):
            self.kind = "callable"
        else:
            raise TypeError(f"unsupported policy source {type(source)!r}")

    def initial_state(self, x0: float, s0: int | None) -> int:
        p = self.p
        if self.kind == "hyst":
            if s0 is None:
                s0 = 1 if x0 >= p.x_p else 0
            if s0 not in (0, 1):
                raise ValueError("s0 must be 0 or 1")
            if s0 == 1 and x0 < p.x_p:
                raise ValueError("s0 = 1 requires x0 >= x_p")
            if s0 == 0 and p.x_p_h is not None and x0 >= p.x_p_h:
                s0 = 1
            return s0
        if self.kind == "full":
            return 1 if x0 >= p.x_p else 0
        if self.kind == "curve":
            return 1 if self.source.factor == 1.0 else 0
        return 1 if x0 >= p.x_p else 0

    def harvest(self, x: float, s: int) -> float:
        if self.kind == "full":
            return global_policy_at(self.source, x)
        if self.kind == "hyst":
            return hysteretic_policy_at(self.source, x, s)
        if self.kind == "curve":
            return float(eval_policy(self.source, x))
        if self.kind == "const":
            return float(self.source)
        return float(self.source(x))

    def recruit(self, x: float, s: int) -> float:
        if self.kind == "hyst":
            return float(recruit_hysteretic(x, s, self.p))
        if self.kind == "curve":
            return float(recruit_smooth(x, self.source.factor, self.p))
        return float(recruit_tipping(x, self.p))

    def output_state(self, x: float, s: int) -> int:
        if self.kind == "hyst":
            return s
        if self.kind == "curve":
            return 1 if self.source.factor == 1.0 else 0
        return 1 if x >= self.p.x_p else 0

    def plan(self, x: float, s: int) -> _Plan:
        p = self.p
        if self.kind == "full":
            sol: FullSolution = self.source
            if sol.regime is Regime.NO_HIGH_STEADY_STATE and x >= p.x_p:
                raise SolverError(
                    "cannot simulate at or above x_p: no optimal plan exists "
                    "there in the no-high-steady-state regime"
                )
            if x >= p.x_p:
                if sol.high.regime == "interior":
                    xa, ha = sol.high.steady_state
                    attractor = (xa, ha, EventKind.CONVERGED_TO_STEADY_STATE)
                else:
                    xa, ha = sol.high.steady_state
                    attractor = (xa, ha, EventKind.ABSORBED_AT_BOUNDARY)
                crossings = (
                    _Crossing(p.x_p, -1, None, EventKind.CROSS_DOWN_LOW),
                )
                return _Plan(attractor, crossings, sol.x_floor, sol.x_max)
            skiba = sol.skiba if sol.skiba is not None else math.inf
            if sol.regime is Regime.NO_HIGH_STEADY_STATE or x < skiba:
                xa, ha = notional_steady_state(p.pi, p)
                return _Plan(
                    (xa, ha, EventKind.CONVERGED_TO_STEADY_STATE),
                    (),
                    sol.x_floor,
                    sol.x_max,
                )
            crossings = (_Crossing(p.x_p, 1, None, EventKind.CROSS_UP_HIGH),)
            return _Plan(None, crossings, sol.x_floor, sol.x_max)
        if self.kind == "hyst":
            hsol: HystSolution = self.source
            if s == 1:
                if hsol.high.regime == "interior":
                    xa, ha = hsol.high.steady_state
                    attractor = (xa, ha, EventKind.CONVERGED_TO_STEADY_STATE)
                else:
                    xa, ha = hsol.high.steady_state
                    attractor = (xa, ha, EventKind.ABSORBED_AT_BOUNDARY)
                crossings = (_Crossing(p.x_p, -1, 0, EventKind.CROSS_DOWN_LOW),)
                return _Plan(attractor, crossings, hsol.x_floor, hsol.x_max)
            if hsol.regime is Regime.NO_HIGH_STEADY_STATE:
                xa, ha = notional_steady_state(p.pi, p)
                return _Plan(
                    (xa, ha, EventKind.CONVERGED_TO_STEADY_STATE),
                    (),
                    hsol.x_floor,
                    hsol.x_max,
                )
            skiba = hsol.skiba if hsol.skiba is not None else math.inf
            if x < skiba:
                xa, ha = notional_steady_state(p.pi, p)
                return _Plan(
                    (xa, ha, EventKind.CONVERGED_TO_STEADY_STATE),
                    (),
                    hsol.x_floor,
                    hsol.x_max,
                )
            crossings = (_Crossing(p.x_p_h, 1, 1, EventKind.CROSS_UP_HIGH),)
            return _Plan(None, crossings, hsol.x_floor, hsol.x_max)
        if self.kind == "curve":
            curve: PolicyCurve = self.source
            attractor = None
            xa, ha = notional_steady_state(curve.factor, p)
            if curve.x_lo <= xa <= curve.x_hi:
                try:
                    on_curve = abs(eval_policy(curve, xa) - ha) <= SNAP_REL * ha
                except ValueError:
                    on_curve = False
                if on_curve:
                    attractor = (xa, ha, EventKind.CONVERGED_TO_STEADY_STATE)
            return _Plan(attractor, (), curve.x_lo, curve.x_hi)
        return _Plan(None, (), 0.0, None)


def simulate(
    policy_source,
    p: ModelParams,
    x0: float,
    s0: int | None = None,
    horizon: float | None = None,
    output_dt: float | None = None,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> Trajectory:
    """Simulate the stock path from x0 under the given policy source.

    Returns samples on a uniform output grid plus a row at each event time.
    `welfare` is the discounted utility integral over [0, horizon], with
    post-absorption stretches included in closed form.
    """
    if not x0 > 0.0:
        raise ValueError("x0 must be positive")
    if horizon is None:
        horizon = 200.0 / p.rho
    if not horizon > 0.0:
        raise ValueError("horizon must be positive")
    if output_dt is None:
        output_dt = horizon / 512.0
    if not 0.0 < output_dt <= horizon:
        raise ValueError("output_dt must lie in (0, horizon]")

    driver = _Driver(policy_source, p, s0)
    s = driver.initial_state(x0, s0)

    grid = np.arange(0.0, horizon + 0.5 * output_dt, output_dt)
    grid[-1] = horizon

    ts: list[float] = []
    xs: list[float] = []
    hs: list[float] = []
    ss: list[int] = []
    events: list[tuple[float, EventKind]] = []

    def emit(t: float, x: float, h: float, st: int) -> None:
        ts.append(t)
        xs.append(x)
        hs.append(h)
        ss.append(st)

    def fill_constant(t_from: float, x_c: float, h_c: float, st: int) -> None:
        for tg in grid[(grid > t_from + 1e-12 * max(1.0, horizon))]:
            emit(float(tg), x_c, h_c, st)
        if not ts or ts[-1] < horizon:
            emit(horizon, x_c, h_c, st)

    t = 0.0
    x = float(x0)
    welfare = 0.0
    ended = "horizon"
    guard = 0

    while t < horizon:
        guard += 1
        if guard > 64:
            raise SolverError("trajectory dispatch failed to settle (event loop)")
        plan = driver.plan(x, s)

        if plan.attractor is not None:
            xa, ha, kind = plan.attractor
            if abs(x - xa) <= SNAP_REL * xa:
                events.append((t, kind))
                emit(t, xa, ha, driver.output_state(xa, s))
                welfare += (
                    utility(ha, p.sigma)
                    * (math.exp(-p.rho * t) - math.exp(-p.rho * horizon))
                    / p.rho
                )
                fill_constant(t, xa, ha, driver.output_state(xa, s))
                ended = (
                    "absorbed"
                    if kind is EventKind.ABSORBED_AT_BOUNDARY
                    else "converged"
                )
                break

        ev_funcs = []
        ev_meta = []
        for c in plan.crossings:
            def cross_fn(tt, y, _c=c):
                return y[0] - _c.threshold
            cross_fn.terminal = True
            cross_fn.direction = float(c.direction)
            ev_funcs.append(cross_fn)
            ev_meta.append(("cross", c))
        if plan.attractor is not None:
            xa, ha, kind = plan.attractor
            tube = SNAP_REL * xa
            def snap_fn(tt, y, _xa=xa, _tube=tube):
                d = y[0] - _xa
                return d * d - _tube * _tube
            snap_fn.terminal = True
            snap_fn.direction = -1.0
            ev_funcs.append(snap_fn)
            ev_meta.append(("snap", plan.attractor))
        x_min = max(plan.x_min, 1e-9 * x0)
        def floor_fn(tt, y, _m=x_min):
            return y[0] - _m
        floor_fn.terminal = True
        floor_fn.direction = -1.0
        ev_funcs.append(floor_fn)
        ev_meta.append(("floor", None))
        if plan.x_max is not None:
            def ceil_fn(tt, y, _m=plan.x_max):
                return y[0] - _m
            ceil_fn.terminal = True
            ceil_fn.direction = 1.0
            ev_funcs.append(ceil_fn)
            ev_meta.append(("ceil", None))

        # The integrator evaluates trial points beyond terminal events;
        # clamp policy lookups into the stretch this segment governs.
        lo_c = x_min
        hi_c = plan.x_max if plan.x_max is not None else math.inf
        for c in plan.crossings:
            if c.direction > 0:
                hi_c = min(hi_c, c.threshold * (1.0 - 1e-15))
            else:
                lo_c = max(lo_c, c.threshold)

        def rhs(tt, y, _s=s, _lo=lo_c, _hi=hi_c):
            xx = min(max(y[0], _lo), _hi)
            hh = driver.harvest(xx, _s)
            return [
                driver.recruit(xx, _s) - hh,
                math.exp(-p.rho * tt) * utility(hh, p.sigma),
            ]

        sol = solve_ivp(
            rhs,
            (t, horizon),
            [x, welfare],
            method="RK45",
            dense_output=True,
            events=ev_funcs,
            rtol=rtol,
            atol=atol,
        )
        if not sol.success:
            raise SolverError(f"trajectory integration failed: {sol.message}")

        t_stop = float(sol.t[-1])
        hit = None
        for i, (tag, meta) in enumerate(ev_meta):
            if sol.t_events[i].size > 0 and (
                hit is None or sol.t_events[i][0] < hit[0]
            ):
                hit = (float(sol.t_events[i][0]), tag, meta, i)
        if hit is not None:
            t_stop = hit[0]

        for tg in grid[(grid >= t - 1e-12) & (grid < t_stop - 1e-15 * max(1.0, t_stop))]:
            if ts and abs(ts[-1] - tg) < 1e-12 * max(1.0, horizon):
                continue
            xg = min(max(float(sol.sol(tg)[0]), lo_c), hi_c)
            emit(float(tg), xg, driver.harvest(xg, s), driver.output_state(xg, s))

        if hit is None:
            welfare = float(sol.y[1, -1])
            x = min(max(float(sol.y[0, -1]), lo_c), hi_c)
            emit(horizon, x, driver.harvest(x, s), driver.output_state(x, s))
            t = horizon
            ended = "horizon"
            break

        t_e, tag, meta, idx = hit
        y_e = sol.sol(t_e)
        welfare = float(y_e[1])
        x = float(y_e[0])
        t = t_e
        if tag == "cross":
            c: _Crossing = meta
            x_snap = c.threshold
            s_new = c.new_s if c.new_s is not None else s
            events.append((t_e, c.kind))
            # Two rows at the crossing: the harvest jumps, so record the
            # left limit first, then the event row with the new branch.
            h_pre = driver.harvest(min(max(x_snap, lo_c), hi_c), s)
            emit(t_e, x_snap, h_pre, driver.output_state(x_snap, s_new))
            if c.direction > 0:
                h_row = driver.harvest(x_snap, s_new)
            else:
                h_row = driver.harvest(x_snap * (1.0 - _NUDGE_REL), s_new)
            emit(t_e, x_snap, h_row, driver.output_state(x_snap, s_new))
            x = x_snap * (1.0 + _NUDGE_REL * c.direction)
            s = s_new
            continue
        if tag == "snap":
            xa, ha, kind = meta
            events.append((t_e, kind))
            emit(t_e, xa, ha, driver.output_state(xa, s))
            welfare += (
                utility(ha, p.sigma)
                * (math.exp(-p.rho * t_e) - math.exp(-p.rho * horizon))
                / p.rho
            )
            fill_constant(t_e, xa, ha, driver.output_state(xa, s))
            ended = (
                "absorbed" if kind is EventKind.ABSORBED_AT_BOUNDARY else "converged"
            )
            break
        if tag == "floor":
            events.append((t_e, EventKind.EXTINCTION))
            emit(t_e, x, driver.harvest(max(x, x_min), s), driver.output_state(x, s))
            ended = "extinct"
            break
        events.append((t_e, EventKind.DOMAIN_EXIT))
        emit(t_e, x, driver.harvest(min(x, plan.x_max), s), driver.output_state(x, s))
        ended = "domain-exit"
        break

    return Trajectory(
        t=np.asarray(ts),
        x=np.asarray(xs),
        h=np.asarray(hs),
        s=np.asarray(ss, dtype=int),
        events=tuple(events),
        welfare=float(welfare),
        horizon=float(horizon),
        ended=ended,
    )


def discounted_welfare(
    traj: Trajectory, p: ModelParams, include_tail: bool = True
) -> float:
    """Discounted utility integral over the sampled path.

    Simpson's rule per sample interval with the harvest taken linear within
    each interval.  When the path ended absorbed or converged, the constant
    continuation beyond the last sample is added in closed form
    (u(h_end) / rho * e^(-rho * t_end)); set include_tail=False to integrate
    the samples alone.
    """
    t, h = traj.t, traj.h
    if t.size < 2:
        total = 0.0
    else:
        dt_i = np.diff(t)
        hm = 0.5 * (h[:-1] + h[1:])
        tm = 0.5 * (t[:-1] + t[1:])
        phi0 = np.exp(-p.rho * t[:-1]) * utility(h[:-1], p.sigma)
        phi1 = np.exp(-p.rho * t[1:]) * utility(h[1:], p.sigma)
        phim = np.exp(-p.rho * tm) * utility(hm, p.sigma)
        total = float(np.sum(dt_i / 6.0 * (phi0 + 4.0 * phim + phi1)))
    if include_tail and traj.ended in ("absorbed", "converged"):
        total += (
            utility(traj.h_end, p.sigma) / p.rho * math.exp(-p.rho * traj.t_end)
        )
    return total
