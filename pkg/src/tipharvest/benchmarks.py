"""Timing harness for the Bellman sweep backends.

Runs a fixed number of value-iteration sweeps on identical inputs with
the pure-Python kernel and, when available, the compiled kernel at each
requested thread count.  Besides wall time, each run's final iterate is
checked bitwise against the Python reference; the backends are required
to agree to the last bit, so any mismatch is reported loudly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .kernels import available_backends, get_backend
from .model import ModelParams, utility
from .oracle import DPConfig, _recruitment_rows

__all__ = ["BenchResult", "run_bench", "format_results"]


@dataclass(frozen=True)
class BenchResult:
    backend: str
    threads: int
    n_x: int
    n_h: int
    iterations: int
    seconds: float
    matches_reference: bool


def run_bench(
    p: ModelParams,
    n_x: int = 300,
    n_h: int = 100,
    iterations: int = 200,
    thread_counts: tuple[int, ...] | list[int] = (1, 4),
) -> list[BenchResult]:
    """Time `iterations` sweeps of the tipping-mode Bellman operator."""
    cfg = DPConfig.defaults(p, n_x=n_x, n_h=n_h)
    x = cfg.x_grid()
    h = cfg.h_grid()
    (fx,) = _recruitment_rows(p, "tipping", None, x)
    beta = math.exp(-p.rho * cfg.dt)
    uw = utility(h, p.sigma) * (1.0 - beta) / p.rho

    def run(kern, threads: int) -> tuple[np.ndarray, float]:
        v = np.zeros_like(x)
        out = np.empty_like(x)
        kern.sweep_single(v, x, fx, h, uw, beta, cfg.dt, out, threads)  # warm
        v[:] = 0.0
        t0 = time.perf_counter()
        for _ in range(iterations):
            kern.sweep_single(v, x, fx, h, uw, beta, cfg.dt, out, threads)
            v, out = out, v
        elapsed = time.perf_counter() - t0
        return v, elapsed

    reference, seconds = run(get_backend("python"), 1)
    results = [BenchResult("python", 1, n_x, n_h, iterations, seconds, True)]
    if "compiled" in available_backends():
        for threads in thread_counts:
            final, seconds = run(get_backend("compiled"), int(threads))
            results.append(BenchResult(
                "compiled", int(threads), n_x, n_h, iterations, seconds,
                bool(np.array_equal(final, reference)),
            ))
    return results


def format_results(results: list[BenchResult]) -> str:
    base = next(r.seconds for r in results if r.backend == "python")
    lines = [
        f"{results[0].n_x} stock nodes x {results[0].n_h} actions, "
        f"{results[0].iterations} sweeps",
        f"{'backend':<10} {'threads':>7} {'seconds':>9} {'sweeps/s':>9} "
        f"{'speedup':>8}  bitwise",
    ]
    for r in results:
        lines.append(
            f"{r.backend:<10} {r.threads:>7d} {r.seconds:>9.3f} "
            f"{r.iterations / r.seconds:>9.1f} {base / r.seconds:>7.2f}x  "
            f"{'identical' if r.matches_reference else 'MISMATCH'}"
        )
    return "\n".join(lines)
