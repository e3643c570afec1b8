"""Pure-numpy Bellman sweep kernels.

Fallback used when the compiled extension is unavailable.  Arithmetic is
arranged expression-by-expression to match the compiled kernel exactly
(same operation tree, same clamped linear interpolation, same running-max
order over actions), so the two backends produce bit-identical value
iterates.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def _interp(v: np.ndarray, x: np.ndarray, xq: np.ndarray) -> np.ndarray:
    """Clamped linear interpolation of v (sampled on x) at query points."""
    n = x.shape[0]
    xc = np.maximum(xq, x[0])
    xc = np.minimum(xc, x[n - 1])
    i = np.searchsorted(x, xc, side="right") - 1
    np.clip(i, 0, n - 2, out=i)
    t = (xc - x[i]) / (x[i + 1] - x[i])
    return v[i] + t * (v[i + 1] - v[i])


def sweep_single(
    v: np.ndarray,
    x: np.ndarray,
    fx: np.ndarray,
    h: np.ndarray,
    uw: np.ndarray,
    beta: float,
    dt: float,
    out: np.ndarray,
    threads: int = 1,
) -> None:
    """One Bellman sweep for a single-fecundity-state problem.

    out[j] = max_k uw[k] + beta * V(x[j] + dt * (fx[j] - h[k])), maximising
    over actions whose landing stock stays on the grid: drawing the stock
    below x[0] is inadmissible, since clamping there would let a policy pin
    the state at the floor and harvest for free.  A node with no admissible
    action (the floor node when recruitment is below the smallest harvest)
    takes the smallest action with the landing clamped, an absorbing floor
    worth u(h_min)/rho.  `threads` is accepted for signature parity; numpy
    runs vectorised.
    """
    best = np.full(x.shape[0], -1e308)
    x_lo = x[0]
    for k in range(h.shape[0]):
        xq = x + dt * (fx - h[k])
        cand = uw[k] + beta * _interp(v, x, xq)
        cand = np.where(xq >= x_lo, cand, -1e308)
        np.maximum(best, cand, out=best)
    stuck = best == -1e308
    if np.any(stuck):
        xq = x + dt * (fx - h[0])
        cand = uw[0] + beta * _interp(v, x, xq)
        best = np.where(stuck, cand, best)
    out[:] = best


def sweep_hyst(
    v0: np.ndarray,
    v1: np.ndarray,
    x: np.ndarray,
    f0: np.ndarray,
    f1: np.ndarray,
    h: np.ndarray,
    uw: np.ndarray,
    beta: float,
    dt: float,
    x_p: float,
    x_p_h: float,
    out0: np.ndarray,
    out1: np.ndarray,
    threads: int = 1,
) -> None:
    """One Bellman sweep for the two-state hysteretic problem.

    The fecundity state after a step follows the hysteresis rule applied to
    the (clamped) landing stock: below x_p collapse, at or above x_p_h
    recover, otherwise keep the current state.  Landing below the grid
    floor is inadmissible, with the same absorbing-floor fallback as the
    single-state sweep.
    """
    x_lo = x[0]
    for s, fx, out in ((0, f0, out0), (1, f1, out1)):
        best = np.full(x.shape[0], -1e308)
        for k in range(h.shape[0]):
            xq = x + dt * (fx - h[k])
            xc = np.maximum(xq, x_lo)
            xc = np.minimum(xc, x[x.shape[0] - 1])
            if s == 0:
                keep_high = xc >= x_p_h
            else:
                keep_high = xc >= x_p
            val0 = _interp(v0, x, xc)
            val1 = _interp(v1, x, xc)
            val = np.where(keep_high, val1, val0)
            cand = uw[k] + beta * val
            cand = np.where(xq >= x_lo, cand, -1e308)
            np.maximum(best, cand, out=best)
        stuck = best == -1e308
        if np.any(stuck):
            xq = x + dt * (fx - h[0])
            xc = np.maximum(xq, x_lo)
            xc = np.minimum(xc, x[x.shape[0] - 1])
            if s == 0:
                keep_high = xc >= x_p_h
            else:
                keep_high = xc >= x_p
            val = np.where(keep_high, _interp(v1, x, xc), _interp(v0, x, xc))
            best = np.where(stuck, uw[0] + beta * val, best)
        out[:] = best
