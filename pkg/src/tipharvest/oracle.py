"""Discrete dynamic-programming oracle for verifying the analytic solver.

The continuous problem is discretised on a log-spaced stock grid with a
log-spaced action set and solved by plain value iteration on the Euler
step x' = x + (f(x) - h) * dt.  The flow payoff is weighted by
(1 - e^(-rho*dt)) / rho, the exact discounted weight of a constant flow
over a step, so the fixed point converges to the continuous value with an
O(dt) policy bias but no leading-order value bias.  After convergence a
greedy readout refines each node's harvest inside the bracketing action
cells, removing the action-grid quantisation from the reported policy.

Three modes: "smooth" (fixed fecundity factor; factor 0 runs the pure
drawdown problem), "tipping" (factor jumps at x_p), "hysteretic" (two
value functions coupled through the hysteresis rule).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _bellman_np as _nb
from .composite import Regime, global_policy_at, global_value
from .hysteresis import HystSolution, hysteretic_policy_at, hysteretic_value_at
from .kernels import get_backend
from .model import (
    ModelParams,
    SolverError,
    notional_steady_state,
    recruit_smooth,
    utility,
)

__all__ = [
    "DPConfig",
    "DPResult",
    "SkibaEstimate",
    "CompareReport",
    "dp_solve",
    "dp_skiba",
    "compare",
]


@dataclass(frozen=True)
class DPConfig:
    """Grid and iteration settings for the oracle.

    Defaults scale off the full-fecundity steady state (or the largest
    threshold if that is bigger): stocks log-spaced on
    [1e-3 * x_ref, 4 * x_ref], actions log-spaced up to three times the
    reference harvest scale.  The step defaults to
    dt = 0.25/rho * (cell / maxflow), capped at 0.1/rho, with `cell` the
    grid cell width at the reference stock; on a log grid no global dt can
    stay below every local cell width, so the cell at the economically
    relevant scale sets the pace.  The induced policy bias is roughly
    dt * f'(x) / (2 sigma), about one percent at the bottom of the
    compared region for desk-scale parameters.  The sanity check below
    only demands that a step cannot vault across a meaningful part of the
    grid span.
    """

    x_lo: float
    x_hi: float
    n_x: int
    h_lo: float
    h_hi: float
    n_h: int
    dt: float
    tol: float = 1e-9
    max_iter: int = 60000

    def __post_init__(self) -> None:
        if not 0.0 < self.x_lo < self.x_hi:
            raise ValueError("need 0 < x_lo < x_hi")
        if not 0.0 < self.h_lo < self.h_hi:
            raise ValueError("need 0 < h_lo < h_hi")
        if self.n_x < 16 or self.n_h < 8:
            raise ValueError("grid too small to mean anything")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")

    @staticmethod
    def defaults(p: ModelParams, dt: float | None = None, n_x: int = 1200,
                 n_h: int = 400) -> "DPConfig":
        x_ref = max(notional_steady_state(1.0, p)[0], p.x_p, p.x_p_h or 0.0)
        x_lo = 1e-3 * x_ref
        x_hi = 4.0 * x_ref
        h_ref = max(notional_steady_state(1.0, p)[1],
                    recruit_smooth(x_hi, 1.0, p))
        if dt is None:
            cell = x_ref * ((x_hi / x_lo) ** (1.0 / (n_x - 1)) - 1.0)
            maxflow = 3.0 * h_ref
            dt = min(0.25 / p.rho * cell / maxflow, 0.1 / p.rho)
        return DPConfig(
            x_lo=x_lo,
            x_hi=x_hi,
            n_x=n_x,
            h_lo=1e-6 * h_ref,
            h_hi=3.0 * h_ref,
            n_h=n_h,
            dt=dt,
        )

    def x_grid(self) -> np.ndarray:
        return np.geomspace(self.x_lo, self.x_hi, self.n_x)

    def h_grid(self) -> np.ndarray:
        return np.geomspace(self.h_lo, self.h_hi, self.n_h)

    def check_step(self, p: ModelParams) -> None:
        """Reject steps that could vault across the grid in one move."""
        if not math.exp(-p.rho * self.dt) < 1.0:
            raise ValueError("discount factor per step must be below one")
        max_flow = max(recruit_smooth(self.x_hi, 1.0, p), self.h_hi)
        if self.dt * max_flow > 0.25 * (self.x_hi - self.x_lo):
            raise ValueError(
                "dt lets a single step cross a quarter of the stock grid; "
                "refine dt or shrink the action cap"
            )


@dataclass(frozen=True)
class DPResult:
    """Converged oracle output.

    `values` and `greedy` have shape (n_x,) in smooth/tipping mode and
    (2, n_x) in hysteretic mode, first row depressed fecundity.
    """

    cfg: DPConfig
    mode: str
    factor: float | None
    x: np.ndarray
    values: np.ndarray
    greedy: np.ndarray
    iterations: int
    residual: float
    residual_history: np.ndarray = field(repr=False)
    backend: str = "compiled"

    @property
    def cell_rel(self) -> float:
        """Relative width of a stock cell (the grid is geometric)."""
        return float(self.x[1] / self.x[0] - 1.0)


def _recruitment_rows(p: ModelParams, mode: str, factor: float | None,
                      x: np.ndarray) -> tuple[np.ndarray, ...]:
    full = p.A * x ** p.alpha
    if mode == "smooth":
        if factor is None:
            raise ValueError("smooth mode needs a fecundity factor")
        if not 0.0 <= factor <= 1.0:
            raise ValueError("fecundity factor must lie in [0, 1]")
        return (factor * full,)
    if mode == "tipping":
        return (np.where(x >= p.x_p, full, p.pi * full),)
    if mode == "hysteretic":
        if p.x_p_h is None:
            raise ValueError("hysteretic mode requires x_p_h")
        return (p.pi * full, full)
    raise ValueError(f"unknown oracle mode {mode!r}")


def dp_solve(
    p: ModelParams,
    cfg: DPConfig | None = None,
    mode: str = "tipping",
    factor: float | None = None,
    backend: str | None = None,
    threads: int = 1,
) -> DPResult:
    """Run value iteration to convergence and read out the greedy policy.

    Convergence: sup-norm residual below tol * (1 + sup|V|).  The residual
    of a beta-contraction shrinks monotonically, which is asserted as a
    cheap invariant.  Non-convergence raises with the residual history.
    """
    if cfg is None:
        cfg = DPConfig.defaults(p)
    cfg.check_step(p)
    kern = get_backend(backend)
    backend_name = "compiled" if kern.COMPILED else "python"
    x = cfg.x_grid()
    h = cfg.h_grid()
    rows = _recruitment_rows(p, mode, factor, x)
    beta = math.exp(-p.rho * cfg.dt)
    weight = (1.0 - beta) / p.rho
    uw = utility(h, p.sigma) * weight

    history: list[float] = []
    if mode == "hysteretic":
        f0, f1 = rows
        v0 = np.zeros_like(x)
        v1 = np.zeros_like(x)
        o0 = np.empty_like(x)
        o1 = np.empty_like(x)
        it = 0
        resid = math.inf
        for it in range(1, cfg.max_iter + 1):
            kern.sweep_hyst(v0, v1, x, f0, f1, h, uw, beta, cfg.dt,
                            p.x_p, p.x_p_h, o0, o1, threads)
            resid = max(
                float(np.max(np.abs(o0 - v0))), float(np.max(np.abs(o1 - v1)))
            )
            history.append(resid)
            v0, o0 = o0, v0
            v1, o1 = o1, v1
            sup = max(float(np.max(np.abs(v0))), float(np.max(np.abs(v1))))
            if resid <= cfg.tol * (1.0 + sup):
                break
        else:
            raise SolverError(
                f"oracle failed to converge in {cfg.max_iter} iterations; "
                f"last residuals {history[-5:]}"
            )
        values = np.vstack([v0, v1])
        g0 = _greedy_row(v0, v1, x, f0, h, uw, beta, cfg, p, thresh=p.x_p_h)
        g1 = _greedy_row(v0, v1, x, f1, h, uw, beta, cfg, p, thresh=p.x_p)
        greedy = np.vstack([g0, g1])
    else:
        (fx,) = rows
        v = np.zeros_like(x)
        out = np.empty_like(x)
        it = 0
        resid = math.inf
        for it in range(1, cfg.max_iter + 1):
            kern.sweep_single(v, x, fx, h, uw, beta, cfg.dt, out, threads)
            resid = float(np.max(np.abs(out - v)))
            history.append(resid)
            v, out = out, v
            if resid <= cfg.tol * (1.0 + float(np.max(np.abs(v)))):
                break
        else:
            raise SolverError(
                f"oracle failed to converge in {cfg.max_iter} iterations; "
                f"last residuals {history[-5:]}"
            )
        values = v
        greedy = _greedy_row(v, None, x, fx, h, uw, beta, cfg, p, thresh=None)

    return DPResult(
        cfg=cfg,
        mode=mode,
        factor=factor,
        x=x,
        values=values,
        greedy=greedy,
        iterations=it,
        residual=resid,
        residual_history=np.asarray(history),
        backend=backend_name,
    )


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _greedy_row(
    v_low: np.ndarray,
    v_high: np.ndarray | None,
    x: np.ndarray,
    fx: np.ndarray,
    h: np.ndarray,
    uw: np.ndarray,
    beta: float,
    cfg: DPConfig,
    p: ModelParams,
    thresh: float | None,
) -> np.ndarray:
    """Greedy harvest per node, refined between the bracketing actions.

    The discrete argmax is exact for the iterated fixed point; the golden
    -section pass only polishes the harvest inside the two neighbouring
    action cells, against the same interpolated continuation.  This is a
    readout refinement, not an acceleration of the iteration.
    """
    n = x.shape[0]
    weight = (1.0 - beta) / p.rho

    def contin(xq: float) -> float:
        xc = min(max(xq, x[0]), x[-1])
        if v_high is not None and thresh is not None and xc >= thresh:
            row = v_high
        else:
            row = v_low
        i = int(np.searchsorted(x, xc, side="right")) - 1
        i = min(max(i, 0), n - 2)
        t = (xc - x[i]) / (x[i + 1] - x[i])
        return float(row[i] + t * (row[i + 1] - row[i]))

    # Discrete argmax, vectorised over nodes.  Actions that would draw the
    # stock below the grid floor are inadmissible, matching the sweep.
    best = np.full(n, -np.inf)
    arg = np.zeros(n, dtype=np.intp)
    for k in range(h.shape[0]):
        xq_raw = x + cfg.dt * (fx - h[k])
        xq = np.minimum(np.maximum(xq_raw, x[0]), x[-1])
        if v_high is not None and thresh is not None:
            row_vals = np.where(
                xq >= thresh,
                _nb._interp(v_high, x, xq),
                _nb._interp(v_low, x, xq),
            )
        else:
            row_vals = _nb._interp(v_low, x, xq)
        cand = np.where(xq_raw >= x[0], uw[k] + beta * row_vals, -np.inf)
        better = cand > best
        arg[better] = k
        best[better] = cand[better]

    refined = np.empty(n)
    for j in range(n):
        k = int(arg[j])
        # Feasibility cap keeps the landing on the grid; floored at the
        # smallest action so the floor node's degenerate bracket stays
        # positive (mirrors the sweep's clamped fallback there).
        h_feas = max(fx[j] + (x[j] - x[0]) / cfg.dt, h[0])
        lo = min(h[max(k - 1, 0)], h_feas)
        hi = min(h[min(k + 1, h.shape[0] - 1)], h_feas)

        def value_of(hh: float) -> float:
            return utility(hh, p.sigma) * weight + beta * contin(
                x[j] + cfg.dt * (fx[j] - hh)
            )

        a, b = lo, hi
        fa_x = a + (1.0 - _INVPHI) * (b - a)
        fb_x = a + _INVPHI * (b - a)
        fa = value_of(fa_x)
        fb = value_of(fb_x)
        for _ in range(48):
            if fa < fb:
                a = fa_x
                fa_x, fa = fb_x, fb
                fb_x = a + _INVPHI * (b - a)
                fb = value_of(fb_x)
            else:
                b = fb_x
                fb_x, fb = fa_x, fa
                fa_x = a + (1.0 - _INVPHI) * (b - a)
                fa = value_of(fa_x)
        h_mid = 0.5 * (a + b)
        candidates = [(value_of(lo), lo), (value_of(hi), hi),
                      (value_of(h_mid), h_mid)]
        refined[j] = max(candidates)[1]
    return refined


@dataclass(frozen=True)
class SkibaEstimate:
    """Grid-resolution estimate of the give-up stock, half-cell uncertainty."""

    value: float
    uncertainty: float
    trivial: bool


def dp_skiba(result: DPResult, p: ModelParams) -> SkibaEstimate:
    """Locate the Skiba stock in the oracle's greedy policy.

    Below the recovery target the policy is drawdown (harvest above the
    depressed recruitment) on the standard side and rebuilding (harvest
    below it) on the austere side; the estimate is the largest transition
    from drawdown to rebuilding below the target.  No transition means the
    austere plan rules everywhere (trivial Skiba).
    """
    if result.mode == "tipping":
        target = p.x_p
        greedy = result.greedy
    elif result.mode == "hysteretic":
        if p.x_p_h is None:
            raise ValueError("hysteretic result needs x_p_h")
        target = p.x_p_h
        greedy = result.greedy[0]
    else:
        raise ValueError("dp_skiba needs a tipping or hysteretic result")
    x = result.x
    f_low = p.pi * p.A * x ** p.alpha
    below = x < target
    rebuild = greedy < f_low
    idx = np.nonzero(below[:-1] & below[1:] & ~rebuild[:-1] & rebuild[1:])[0]
    if idx.size == 0:
        return SkibaEstimate(value=0.0, uncertainty=0.0, trivial=True)
    i = int(idx[-1])
    return SkibaEstimate(
        value=0.5 * (x[i] + x[i + 1]),
        uncertainty=0.5 * (x[i + 1] - x[i]),
        trivial=False,
    )


@dataclass(frozen=True)
class CompareReport:
    """Error summary of the analytic solution against the oracle.

    Value errors are scaled by the spread of the analytic value over the
    compared nodes (a pointwise relative error is meaningless where the
    value crosses zero); policy errors are pointwise relative.  Nodes in
    the bottom five percent of the grid and within three cells of a policy
    discontinuity are excluded.
    """

    value_sup_rel: float
    value_mean_rel: float
    policy_sup_rel: float
    policy_mean_rel: float
    n_compared: int
    skiba_analytic: float | None
    skiba_dp: float | None
    skiba_cells: float | None

    def as_dict(self) -> dict:
        return {
            "value_sup_rel": self.value_sup_rel,
            "value_mean_rel": self.value_mean_rel,
            "policy_sup_rel": self.policy_sup_rel,
            "policy_mean_rel": self.policy_mean_rel,
            "n_compared": self.n_compared,
            "skiba_analytic": self.skiba_analytic,
            "skiba_dp": self.skiba_dp,
            "skiba_cells": self.skiba_cells,
        }


def _discontinuities(analytic, p: ModelParams) -> list[float]:
    pts = []
    if isinstance(analytic, HystSolution):
        pts.extend([p.x_p, p.x_p_h])
    else:
        pts.append(p.x_p)
    sk = analytic.skiba
    if sk is not None and sk > 0.0:
        pts.append(sk)
    return pts


def compare(analytic, dp: DPResult, p: ModelParams,
            exclude_cells: int = 3, exclude_bottom: float = 0.05) -> CompareReport:
    """Compare an analytic solution with an oracle run on matching params.

    `analytic` is a FullSolution (tipping oracle) or HystSolution
    (hysteretic oracle).  In the no-high-steady-state regime only the
    depressed side is compared.
    """
    hyst = isinstance(analytic, HystSolution)
    if hyst != (dp.mode == "hysteretic"):
        raise ValueError("analytic solution and oracle mode disagree")
    x = dp.x
    n = x.size

    mask = np.ones(n, dtype=bool)
    mask[: int(math.ceil(exclude_bottom * n))] = False
    for pt in _discontinuities(analytic, p):
        j = int(np.searchsorted(x, pt))
        lo = max(j - exclude_cells, 0)
        hi = min(j + exclude_cells + 1, n)
        mask[lo:hi] = False

    if hyst:
        states = (0, 1)
    else:
        states = (None,)

    err_v: list[np.ndarray] = []
    err_h: list[np.ndarray] = []
    v_all: list[np.ndarray] = []
    count = 0
    for s in states:
        m = mask.copy()
        if hyst:
            if s == 1:
                m &= x >= p.x_p
            else:
                m &= x < p.x_p_h
        if analytic.regime is Regime.NO_HIGH_STEADY_STATE:
            if s == 1:
                continue
            m &= x < (p.x_p_h if hyst else p.x_p)
        floor = analytic.low.x_floor
        if analytic.low.low_saddle is not None:
            floor = max(floor, analytic.low.low_saddle.x_lo)
        m &= x >= floor
        idx = np.nonzero(m)[0]
        if idx.size == 0:
            continue
        va = np.empty(idx.size)
        ha = np.empty(idx.size)
        for out_i, j in enumerate(idx):
            if hyst:
                va[out_i] = hysteretic_value_at(analytic, float(x[j]), s)
                ha[out_i] = hysteretic_policy_at(analytic, float(x[j]), s)
            else:
                va[out_i] = global_value(analytic, float(x[j]))
                ha[out_i] = global_policy_at(analytic, float(x[j]))
        vd = (dp.values[s] if hyst else dp.values)[idx]
        hd = (dp.greedy[s] if hyst else dp.greedy)[idx]
        err_v.append(np.abs(vd - va))
        err_h.append(np.abs(hd - ha) / np.abs(ha))
        v_all.append(va)
        count += idx.size

    if count == 0:
        raise ValueError("nothing left to compare after exclusions")
    ev = np.concatenate(err_v)
    eh = np.concatenate(err_h)
    va = np.concatenate(v_all)
    spread = float(np.max(va) - np.min(va))
    if spread <= 0.0:
        spread = max(abs(float(np.max(va))), 1.0)
    ev_rel = ev / spread

    sk_an = analytic.skiba
    sk_dp: float | None = None
    sk_cells: float | None = None
    if dp.mode in ("tipping", "hysteretic"):
        est = dp_skiba(dp, p)
        sk_dp = est.value
        if sk_an is not None and not est.trivial:
            target = p.x_p_h if hyst else p.x_p
            j = int(np.clip(np.searchsorted(x, min(sk_an, target)), 1, n - 1))
            cell = x[j] - x[j - 1]
            sk_cells = abs(est.value - sk_an) / cell
        elif sk_an is not None and sk_an == 0.0 and est.trivial:
            sk_cells = 0.0

    return CompareReport(
        value_sup_rel=float(np.max(ev_rel)),
        value_mean_rel=float(np.mean(ev_rel)),
        policy_sup_rel=float(np.max(eh)),
        policy_mean_rel=float(np.mean(eh)),
        n_compared=count,
        skiba_analytic=sk_an,
        skiba_dp=sk_dp,
        skiba_cells=sk_cells,
    )
