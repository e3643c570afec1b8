# cython: language_level=3
# cython: boundscheck=False
# cython: wraparound=False
# cython: cdivision=True
"""Compiled Bellman sweep kernels.

Scalar arithmetic mirrors the numpy fallback expression by expression
(clamp, bracketing via searchsorted-right semantics, the interpolation
formula, running max in action order), and the extension is built with
FP contraction disabled, so both backends produce bit-identical iterates.
The node loop optionally runs under OpenMP; nodes are independent, so the
thread count cannot change results either.
"""

import numpy as np

cimport cython
from cython.parallel cimport prange


cdef inline Py_ssize_t _bracket(const double[::1] x, double v, Py_ssize_t n) nogil:
    # Index i with x[i] <= v < x[i+1], clamped to [0, n-2]: matches
    # np.searchsorted(x, v, side="right") - 1 after clamping.
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if x[mid] <= v:
            lo = mid + 1
        else:
            hi = mid
    lo = lo - 1
    if lo < 0:
        lo = 0
    if lo > n - 2:
        lo = n - 2
    return lo


cdef inline double _interp_at(const double[::1] v, const double[::1] x,
                              double xq, Py_ssize_t n) nogil:
    cdef double xc = xq
    cdef Py_ssize_t i
    cdef double t
    if xc < x[0]:
        xc = x[0]
    if xc > x[n - 1]:
        xc = x[n - 1]
    i = _bracket(x, xc, n)
    t = (xc - x[i]) / (x[i + 1] - x[i])
    return v[i] + t * (v[i + 1] - v[i])


cdef inline double _node_single(const double[::1] v, const double[::1] x,
                                double xj, double fj,
                                const double[::1] h, const double[::1] uw,
                                double beta, double dt,
                                Py_ssize_t n, Py_ssize_t m) nogil:
    cdef double best = -1e308
    cdef double xq, cand
    cdef Py_ssize_t k
    for k in range(m):
        xq = xj + dt * (fj - h[k])
        if xq >= x[0]:
            # Landing below the grid floor is inadmissible.
            cand = uw[k] + beta * _interp_at(v, x, xq, n)
            if cand > best:
                best = cand
    if best == -1e308:
        # No admissible action (floor node with recruitment below the
        # smallest harvest): smallest action, landing clamped.
        xq = xj + dt * (fj - h[0])
        best = uw[0] + beta * _interp_at(v, x, xq, n)
    return best


cdef inline double _node_hyst(const double[::1] v0, const double[::1] v1,
                              const double[::1] x, double xj, double fj,
                              const double[::1] h, const double[::1] uw,
                              double beta, double dt, double thresh,
                              Py_ssize_t n, Py_ssize_t m) nogil:
    # thresh is x_p_h when the current state is depressed, x_p when full:
    # landing at or above it continues at full fecundity.
    cdef double best = -1e308
    cdef double xq, val, cand
    cdef Py_ssize_t k
    for k in range(m):
        xq = xj + dt * (fj - h[k])
        if xq >= x[0]:
            if xq > x[n - 1]:
                xq = x[n - 1]
            if xq >= thresh:
                val = _interp_at(v1, x, xq, n)
            else:
                val = _interp_at(v0, x, xq, n)
            cand = uw[k] + beta * val
            if cand > best:
                best = cand
    if best == -1e308:
        xq = xj + dt * (fj - h[0])
        if xq < x[0]:
            xq = x[0]
        if xq > x[n - 1]:
            xq = x[n - 1]
        if xq >= thresh:
            val = _interp_at(v1, x, xq, n)
        else:
            val = _interp_at(v0, x, xq, n)
        best = uw[0] + beta * val
    return best


def sweep_single(const double[::1] v, const double[::1] x,
                 const double[::1] fx, const double[::1] h,
                 const double[::1] uw, double beta, double dt,
                 double[::1] out, int threads=1):
    """One Bellman sweep for a single-fecundity-state problem."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = h.shape[0]
    cdef Py_ssize_t j
    if threads > 1:
        for j in prange(n, nogil=True, num_threads=threads, schedule="static"):
            out[j] = _node_single(v, x, x[j], fx[j], h, uw, beta, dt, n, m)
    else:
        with nogil:
            for j in range(n):
                out[j] = _node_single(v, x, x[j], fx[j], h, uw, beta, dt, n, m)


def sweep_hyst(const double[::1] v0, const double[::1] v1,
               const double[::1] x, const double[::1] f0,
               const double[::1] f1, const double[::1] h,
               const double[::1] uw, double beta, double dt,
               double x_p, double x_p_h,
               double[::1] out0, double[::1] out1, int threads=1):
    """One Bellman sweep for the two-state hysteretic problem."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t m = h.shape[0]
    cdef Py_ssize_t j
    if threads > 1:
        for j in prange(n, nogil=True, num_threads=threads, schedule="static"):
            out0[j] = _node_hyst(v0, v1, x, x[j], f0[j], h, uw, beta, dt, x_p_h, n, m)
            out1[j] = _node_hyst(v0, v1, x, x[j], f1[j], h, uw, beta, dt, x_p, n, m)
    else:
        with nogil:
            for j in range(n):
                out0[j] = _node_hyst(v0, v1, x, x[j], f0[j], h, uw, beta, dt, x_p_h, n, m)
                out1[j] = _node_hyst(v0, v1, x, x[j], f1[j], h, uw, beta, dt, x_p, n, m)


COMPILED = True
