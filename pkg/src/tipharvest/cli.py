"""Command-line surface for the harvest solver.

Subcommands: solve, simulate, skiba, sweep, oracle, bench.  Every
subcommand takes a run-configuration file (see the config module for
the schema) and writes its artifacts into an output directory resolved
in this order: the -o/--output option, the TIPHARVEST_OUTPUT environment
variable, the [output] dir key in the configuration, the working
directory.

Exit codes: 0 success; 2 invalid configuration or record; 3 solver or
oracle failure; 4 hysteresis requested but the parameters admit no
optimal plan at full fecundity (no high steady state).
"""

from __future__ import annotations

import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import click

from . import serialize
from .composite import FullSolution, Regime, solve_full
from .config import ConfigError, RunConfig, load_config
from .hysteresis import solve_hysteretic
from .model import ModelParams, SolverError
from .oracle import compare, dp_skiba, dp_solve
from .serialize import RecordError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_NO_HIGH_HYST = 4

OUTPUT_ENV = "TIPHARVEST_OUTPUT"


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(config_path: str) -> RunConfig:
    try:
        return load_config(config_path)
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))


def _out_dir(flag: str | None, rc: RunConfig) -> Path:
    if flag:
        chosen = flag
    elif os.environ.get(OUTPUT_ENV):
        chosen = os.environ[OUTPUT_ENV]
    elif rc.output_dir:
        chosen = rc.output_dir
    else:
        chosen = "."
    path = Path(chosen)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _solve(rc: RunConfig, hysteresis: bool):
    p = rc.params
    if hysteresis and p.x_p_h is None:
        _fail(EXIT_CONFIG, "hysteresis requested but [model] x_p_h is not set")
    kwargs = dict(
        x_max=rc.solver.x_max,
        x_floor=rc.solver.x_floor,
        rtol=rc.solver.rtol,
        atol=rc.solver.atol,
    )
    try:
        if hysteresis:
            return solve_hysteretic(p, **kwargs)
        return solve_full(p, **kwargs)
    except (SolverError, ValueError) as exc:
        _fail(EXIT_SOLVER, f"solver failure: {exc}")


def _fmt_opt(v) -> str:
    return "none" if v is None else format(float(v), ".12g")


def _print_summary(sol) -> None:
    click.echo(f"regime: {sol.regime.value}")
    click.echo(f"skiba: {_fmt_opt(sol.skiba)}")
    if sol.regime is Regime.NO_HIGH_STEADY_STATE:
        click.echo("steady state (full fecundity): none")
    else:
        x, h = sol.high.steady_state
        click.echo(f"steady state (full fecundity): x = {x:.12g}, h = {h:.12g}")
    low_ss = serialize._low_steady(sol)
    if low_ss is not None:
        click.echo(
            f"steady state (depressed): x = {low_ss[0]:.12g}, h = {low_ss[1]:.12g}"
        )


@click.group()
def main() -> None:
    """Optimal harvest policies under recruitment tipping points."""


@main.command()
@click.argument("config_path", type=click.Path())
@click.option("--hysteresis", is_flag=True,
              help="Solve the hysteretic variant (requires x_p_h).")
@click.option("-o", "--output", "output", default=None,
              help="Output directory (overrides env and config).")
def solve(config_path: str, hysteresis: bool, output: str | None) -> None:
    """Solve the model and write the solution record plus curve CSVs."""
    rc = _load(config_path)
    sol = _solve(rc, hysteresis)
    out = _out_dir(output, rc)
    serialize.write_solution(sol, out)
    _print_summary(sol)
    click.echo(f"wrote {out / serialize.SOLUTION_RECORD}")
    if hysteresis and sol.regime is Regime.NO_HIGH_STEADY_STATE:
        click.echo(
            "error: no high steady state exists: above x_p every plan is "
            "dominated by one that eventually tips; hysteresis adds nothing",
            err=True,
        )
        sys.exit(EXIT_NO_HIGH_HYST)


@main.command()
@click.argument("config_path", type=click.Path())
@click.option("--x0", type=float, required=True, help="Initial stock.")
@click.option("--s0", type=int, default=None,
              help="Initial fecundity state (hysteretic runs only).")
@click.option("--horizon", type=float, default=None,
              help="Simulation horizon (default 200 / rho).")
@click.option("--output-dt", type=float, default=None,
              help="Output sampling interval (default horizon / 512).")
@click.option("--solution", "solution_dir", type=click.Path(), default=None,
              help="Re-use a written solution record instead of re-solving.")
@click.option("-o", "--output", "output", default=None)
def simulate(config_path: str, x0: float, s0: int | None,
             horizon: float | None, output_dt: float | None,
             solution_dir: str | None, output: str | None) -> None:
    """Simulate the optimally harvested stock path from x0."""
    from .trajectory import simulate as run_simulation

    rc = _load(config_path)
    if solution_dir is not None:
        try:
            sol = serialize.load_solution(solution_dir)
        except RecordError as exc:
            _fail(EXIT_CONFIG, str(exc))
        if sol.params != rc.params:
            _fail(
                EXIT_CONFIG,
                "solution record parameters disagree with the configuration; "
                "refusing to mix runs",
            )
    else:
        sol = _solve(rc, hysteresis=rc.params.x_p_h is not None)
    try:
        traj = run_simulation(
            sol, rc.params, x0=x0, s0=s0, horizon=horizon,
            output_dt=output_dt, rtol=rc.solver.rtol, atol=rc.solver.atol,
        )
    except (SolverError, ValueError) as exc:
        _fail(EXIT_SOLVER, f"simulation failure: {exc}")
    out = _out_dir(output, rc)
    dest = out / "trajectory.csv"
    serialize.write_trajectory_csv(dest, traj)
    click.echo(f"end: t = {traj.t[-1]:.12g}, x = {traj.x[-1]:.12g} ({traj.ended})")
    for t_e, kind in traj.events:
        click.echo(f"event: {kind.value} at t = {t_e:.12g}")
    click.echo(f"discounted welfare: {traj.welfare:.12g}")
    click.echo(f"wrote {dest}")


@main.command()
@click.argument("config_path", type=click.Path())
@click.option("--oracle/--no-oracle", "with_oracle", default=False,
              help="Also locate the Skiba stock in the oracle's policy.")
def skiba(config_path: str, with_oracle: bool) -> None:
    """Print the Skiba stock (where giving up on recovery becomes optimal)."""
    rc = _load(config_path)
    hyst = rc.params.x_p_h is not None
    sol = _solve(rc, hysteresis=hyst)
    if sol.skiba is None:
        click.echo("skiba: none (recovery never pays)")
    elif sol.skiba <= 0.0:
        click.echo("skiba: 0 (trivial: recovery pays from any positive stock)")
    else:
        click.echo(f"skiba: {sol.skiba:.12g}")
    if not with_oracle:
        return
    cfg = rc.oracle.dp_config(rc.params)
    try:
        res = dp_solve(rc.params, cfg, mode="hysteretic" if hyst else "tipping",
                       backend=rc.oracle.backend, threads=rc.oracle.threads)
    except (SolverError, ValueError, RuntimeError) as exc:
        _fail(EXIT_SOLVER, f"oracle failure: {exc}")
    est = dp_skiba(res, rc.params)
    if est.trivial:
        click.echo("oracle skiba: trivial (no give-up transition on the grid)")
    else:
        click.echo(f"oracle skiba: {est.value:.12g} +- {est.uncertainty:.3g}")
        if sol.skiba is not None and sol.skiba > 0.0:
            cells = abs(sol.skiba - est.value) / max(2.0 * est.uncertainty, 1e-300)
            click.echo(f"analytic - oracle distance: {cells:.3g} cells")


def _sweep_entry(args):
    p, x_p, pi, solver, entry_dir = args
    q = replace(p, x_p=x_p, pi=pi, x_p_h=None)
    sol = solve_full(q, x_max=solver.x_max, x_floor=solver.x_floor,
                     rtol=solver.rtol, atol=solver.atol)
    serialize.write_solution(sol, entry_dir)
    x_hat = None
    if sol.regime is not Regime.NO_HIGH_STEADY_STATE:
        x_hat = sol.high.steady_state[0]
    return (x_p, pi, sol.regime.value, sol.skiba, x_hat)


def _parse_list(raw: str, name: str) -> list[float]:
    try:
        vals = [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError:
        _fail(EXIT_CONFIG, f"{name} must be a comma-separated list of numbers")
    if not vals:
        _fail(EXIT_CONFIG, f"{name} must name at least one value")
    return vals


@main.command()
@click.argument("config_path", type=click.Path())
@click.option("--xp-list", required=True,
              help="Comma-separated tipping stocks to sweep.")
@click.option("--pi-list", required=True,
              help="Comma-separated fecundity factors to sweep.")
@click.option("--jobs", type=int, default=1,
              help="Worker processes (entries are independent).")
@click.option("-o", "--output", "output", default=None)
def sweep(config_path: str, xp_list: str, pi_list: str, jobs: int,
          output: str | None) -> None:
    """Classify the regime over an x_p x pi grid; writes sweep.csv."""
    rc = _load(config_path)
    xps = _parse_list(xp_list, "--xp-list")
    pis = _parse_list(pi_list, "--pi-list")
    out = _out_dir(output, rc)
    tasks = []
    for x_p in xps:
        for pi in pis:
            entry_dir = out / f"entry_xp{x_p:g}_pi{pi:g}"
            tasks.append((rc.params, x_p, pi, rc.solver, entry_dir))
    try:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                rows = list(pool.map(_sweep_entry, tasks))
        else:
            rows = [_sweep_entry(t) for t in tasks]
    except (SolverError, ValueError) as exc:
        _fail(EXIT_SOLVER, f"sweep entry failed: {exc}")
    dest = out / "sweep.csv"
    serialize.write_sweep_csv(dest, rows)
    for x_p, pi, regime, sk, x_hat in rows:
        click.echo(f"x_p = {x_p:g}, pi = {pi:g}: {regime}"
                   f" (skiba {_fmt_opt(sk)}, x_hat {_fmt_opt(x_hat)})")
    click.echo(f"wrote {dest}")


@main.command()
@click.argument("config_path", type=click.Path())
@click.option("--mode", type=click.Choice(["tipping", "hysteretic"]),
              default=None,
              help="Oracle variant (default: hysteretic iff x_p_h is set).")
@click.option("-o", "--output", "output", default=None)
def oracle(config_path: str, mode: str | None, output: str | None) -> None:
    """Cross-check the analytic solution against the grid oracle."""
    rc = _load(config_path)
    if mode is None:
        mode = "hysteretic" if rc.params.x_p_h is not None else "tipping"
    if mode == "hysteretic" and rc.params.x_p_h is None:
        _fail(EXIT_CONFIG, "hysteretic oracle requires [model] x_p_h")
    sol = _solve(rc, hysteresis=(mode == "hysteretic"))
    cfg = rc.oracle.dp_config(rc.params)
    try:
        res = dp_solve(rc.params, cfg, mode=mode,
                       backend=rc.oracle.backend, threads=rc.oracle.threads)
    except (SolverError, ValueError, RuntimeError) as exc:
        _fail(EXIT_SOLVER, f"oracle failure: {exc}")
    report = compare(sol, res, rc.params)
    out = _out_dir(output, rc)
    serialize.write_dp_csv(out / "dp.csv", res, rc.params)
    serialize.write_comparison_json(out / "comparison.json", report)
    click.echo(f"oracle: {res.backend} backend, {res.iterations} iterations, "
               f"residual {res.residual:.3g}")
    click.echo(f"value error: sup {report.value_sup_rel:.3e}, "
               f"mean {report.value_mean_rel:.3e}")
    click.echo(f"policy error: sup {report.policy_sup_rel:.3e}, "
               f"mean {report.policy_mean_rel:.3e}")
    if report.skiba_cells is not None:
        click.echo(f"skiba: analytic {report.skiba_analytic:.9g}, "
                   f"oracle {report.skiba_dp:.9g} "
                   f"({report.skiba_cells:.3g} cells apart)")
    click.echo(f"wrote {out / 'dp.csv'} and {out / 'comparison.json'}")


@main.command()
@click.argument("config_path", type=click.Path())
@click.option("--n-x", type=int, default=300)
@click.option("--n-h", type=int, default=100)
@click.option("--iterations", type=int, default=200,
              help="Bellman sweeps per timing run.")
@click.option("--threads", default="1,4",
              help="Comma-separated thread counts for the compiled backend.")
def bench(config_path: str, n_x: int, n_h: int, iterations: int,
          threads: str) -> None:
    """Time the compiled Bellman kernel against the pure-Python one."""
    from .benchmarks import format_results, run_bench

    rc = _load(config_path)
    counts = [int(t) for t in threads.split(",") if t.strip()]
    try:
        results = run_bench(rc.params, n_x=n_x, n_h=n_h,
                            iterations=iterations, thread_counts=counts)
    except (SolverError, ValueError, RuntimeError) as exc:
        _fail(EXIT_SOLVER, f"benchmark failure: {exc}")
    click.echo(format_results(results))


if __name__ == "__main__":
    main()
