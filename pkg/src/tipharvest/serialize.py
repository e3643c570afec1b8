"""CSV and structured-record export of solver artifacts, and the reverse.

Every number is written with 17 significant digits, enough to reproduce
the double exactly, so a curve written to disk and read back evaluates
bit-identically.  A solution directory holds one `solution.json` record
(regime, Skiba stock, steady states, a curve inventory with domains, and
a parameter echo) plus one `curve_<branch>.csv` per emitted policy
branch; `load_solution` rebuilds the full solution object from these
files alone.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .composite import FullSolution, Regime
from .high_fecundity import HighSolution
from .hysteresis import HystSolution, PostRecovery
from .low_fecundity import LowSolution
from .model import ModelParams, notional_steady_state
from .oracle import CompareReport, DPResult
from .saddle import PolicyCurve, policy_value
from .trajectory import Trajectory

__all__ = [
    "RecordError",
    "write_curve_csv",
    "read_curve_csv",
    "write_solution",
    "load_solution",
    "write_trajectory_csv",
    "write_dp_csv",
    "write_comparison_json",
    "write_sweep_csv",
    "SWEEP_COLUMNS",
]

SOLUTION_RECORD = "solution.json"
SWEEP_COLUMNS = ("x_p", "pi", "regime", "skiba", "x_hat")


class RecordError(ValueError):
    """A record or CSV on disk does not match the documented schema."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _opt(v) -> float | None:
    return None if v is None else float(v)


def write_curve_csv(path, curve: PolicyCurve, p: ModelParams,
                    s: int | None = None) -> None:
    """Write a policy branch as `x,h,V,branch_id,factor` (plus `s` when
    the branch belongs to a hysteretic solution)."""
    values = policy_value(curve, curve.x, p)
    header = ["x", "h", "V", "branch_id", "factor"]
    if s is not None:
        header.append("s")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(curve.x.size):
            row = [_fmt(curve.x[i]), _fmt(curve.h[i]), _fmt(values[i]),
                   curve.branch_id, _fmt(curve.factor)]
            if s is not None:
                row.append(str(int(s)))
            w.writerow(row)


def read_curve_csv(path) -> tuple[PolicyCurve, int | None]:
    """Rebuild a PolicyCurve from its CSV; returns (curve, s-or-None)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise RecordError(f"{path}: empty curve file")
    header = rows[0]
    base = ["x", "h", "V", "branch_id", "factor"]
    if header != base and header != base + ["s"]:
        raise RecordError(
            f"{path}: unexpected curve columns {header!r}, "
            f"expected {base!r} with optional trailing 's'"
        )
    has_s = len(header) == 6
    body = rows[1:]
    if not body:
        raise RecordError(f"{path}: curve file has no samples")
    x = np.array([float(r[0]) for r in body])
    h = np.array([float(r[1]) for r in body])
    branch = body[0][3]
    factor = float(body[0][4])
    s = int(body[0][5]) if has_s else None
    try:
        curve = PolicyCurve(branch_id=branch, factor=factor, x=x, h=h)
    except ValueError as exc:
        raise RecordError(f"{path}: {exc}") from exc
    return curve, s


def _params_record(p: ModelParams) -> dict:
    rec = {
        "sigma": p.sigma,
        "rho": p.rho,
        "pi": p.pi,
        "x_p": p.x_p,
        "A": p.A,
        "alpha": p.alpha,
    }
    if p.x_p_h is not None:
        rec["x_p_h"] = p.x_p_h
    return rec


def _curve_inventory(entries) -> list[dict]:
    inv = []
    for curve, s in entries:
        if curve is None:
            continue
        inv.append({
            "branch_id": curve.branch_id,
            "factor": curve.factor,
            "x_lo": curve.x_lo,
            "x_hi": curve.x_hi,
            "samples": int(curve.x.size),
            "file": f"curve_{curve.branch_id}.csv",
            **({"s": s} if s is not None else {}),
        })
    return inv


def write_solution(sol: FullSolution | HystSolution, out_dir) -> dict:
    """Write solution.json plus one CSV per curve; returns the record."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hyst = isinstance(sol, HystSolution)
    p = sol.params

    entries = [
        (sol.high.curve, 1 if hyst else None),
        (sol.low.austere_curve, 0 if hyst else None),
        (sol.low.low_saddle, 0 if hyst else None),
    ]
    for curve, s in entries:
        if curve is not None:
            write_curve_csv(out / f"curve_{curve.branch_id}.csv", curve, p, s)

    low_ss = _low_steady(sol)
    record = {
        "format": "tipharvest-solution",
        "version": 1,
        "hysteretic": hyst,
        "params": _params_record(p),
        "regime": sol.regime.value,
        "skiba": _opt(sol.skiba),
        "steady_state_high": (
            None
            if sol.regime is Regime.NO_HIGH_STEADY_STATE
            else list(sol.high.steady_state)
        ),
        "steady_state_low": None if low_ss is None else list(low_ss),
        "x_max": sol.x_max,
        "x_floor": sol.x_floor,
        "high": {
            "regime": sol.high.regime,
            "steady_state": list(sol.high.steady_state),
            "x_floor": sol.high.x_floor,
            "x_max": sol.high.x_max,
        },
        "low": {
            "target": sol.low.target,
            "v_high_at_target": sol.low.v_high_at_target,
            "recoverable": sol.low.recoverable,
            "h_terminal": _opt(sol.low.h_terminal),
            "x_prime": sol.low.x_prime,
            "skiba": _opt(sol.low.skiba),
            "x_floor": sol.low.x_floor,
        },
        "curves": _curve_inventory(entries),
    }
    if hyst:
        record["post_recovery"] = (
            None
            if sol.post_recovery is None
            else {
                "start": sol.post_recovery.start,
                "steady_state": list(sol.post_recovery.steady_state),
                "descends": sol.post_recovery.descends,
            }
        )
    with open(out / SOLUTION_RECORD, "w") as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")
    return record


def _low_steady(sol) -> tuple[float, float] | None:
    if isinstance(sol, FullSolution):
        return sol.steady_state_low
    if sol.low.low_saddle is None:
        return None
    settled = (
        sol.regime is Regime.NO_HIGH_STEADY_STATE
        or (sol.skiba is not None and sol.skiba > 0.0)
    )
    if not settled:
        return None
    return notional_steady_state(sol.params.pi, sol.params)


def load_solution(path) -> FullSolution | HystSolution:
    """Rebuild a solution object from a record directory (or record path).

    Curves are re-interpolated from their written samples; the 17-digit
    format makes every harvest evaluation bit-identical to the solver's.
    """
    path = Path(path)
    record_path = path / SOLUTION_RECORD if path.is_dir() else path
    base = record_path.parent
    try:
        with open(record_path) as fh:
            record = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise RecordError(f"cannot read solution record {record_path}: {exc}") from exc
    if record.get("format") != "tipharvest-solution":
        raise RecordError(f"{record_path}: not a solution record")

    try:
        p = ModelParams(**record["params"])
        regime = Regime(record["regime"])
        curves: dict[str, PolicyCurve] = {}
        for entry in record["curves"]:
            curve, _ = read_curve_csv(base / entry["file"])
            curves[curve.branch_id] = curve
        high_rec = record["high"]
        high_branch = f"high-{high_rec['regime']}"
        high = HighSolution(
            params=p,
            regime=high_rec["regime"],
            curve=curves[high_branch],
            steady_state=tuple(high_rec["steady_state"]),
            x_floor=high_rec["x_floor"],
            x_max=high_rec["x_max"],
        )
        low_rec = record["low"]
        low = LowSolution(
            params=p,
            target=low_rec["target"],
            v_high_at_target=low_rec["v_high_at_target"],
            recoverable=low_rec["recoverable"],
            h_terminal=low_rec["h_terminal"],
            austere_curve=curves.get("austere-recovery"),
            x_prime=low_rec["x_prime"],
            low_saddle=curves.get("low-saddle"),
            skiba=low_rec["skiba"],
            x_floor=low_rec["x_floor"],
        )
        if record["hysteretic"]:
            pr = record.get("post_recovery")
            post = (
                None
                if pr is None
                else PostRecovery(
                    start=pr["start"],
                    steady_state=tuple(pr["steady_state"]),
                    descends=pr["descends"],
                )
            )
            return HystSolution(
                params=p,
                regime=regime,
                high=high,
                low=low,
                post_recovery=post,
                x_max=record["x_max"],
                x_floor=record["x_floor"],
            )
        return FullSolution(
            params=p,
            regime=regime,
            high=high,
            low=low,
            x_max=record["x_max"],
            x_floor=record["x_floor"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, RecordError):
            raise
        raise RecordError(f"{record_path}: malformed solution record ({exc})") from exc


def write_trajectory_csv(path, traj: Trajectory) -> None:
    """Write `t,x,h,s,event`; the event column is empty except on the row
    recording that event (the first unclaimed row at the event's time)."""
    labels = [""] * traj.t.size
    cursor = 0
    for t_e, kind in traj.events:
        for i in range(cursor, traj.t.size):
            if traj.t[i] == t_e and not labels[i]:
                labels[i] = kind.value
                cursor = i + 1
                break
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "h", "s", "event"])
        for i in range(traj.t.size):
            w.writerow([_fmt(traj.t[i]), _fmt(traj.x[i]), _fmt(traj.h[i]),
                        str(int(traj.s[i])), labels[i]])


def write_dp_csv(path, result: DPResult, p: ModelParams) -> None:
    """Write the oracle grid as `x,s,V,h_greedy`.

    Hysteretic results emit one block per fecundity state; single-state
    results echo the recruitment state implied by the node (for smooth
    mode, the fixed factor: 1 only for the full-fecundity problem).
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "s", "V", "h_greedy"])
        if result.mode == "hysteretic":
            for s in (0, 1):
                for j in range(result.x.size):
                    w.writerow([_fmt(result.x[j]), str(s),
                                _fmt(result.values[s][j]),
                                _fmt(result.greedy[s][j])])
            return
        for j in range(result.x.size):
            if result.mode == "tipping":
                s = 1 if result.x[j] >= p.x_p else 0
            else:
                s = 1 if result.factor == 1.0 else 0
            w.writerow([_fmt(result.x[j]), str(s),
                        _fmt(result.values[j]), _fmt(result.greedy[j])])


def write_comparison_json(path, report: CompareReport) -> None:
    with open(path, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2)
        fh.write("\n")


def write_sweep_csv(path, rows) -> None:
    """Write sweep rows `x_p,pi,regime,skiba,x_hat`.

    Each row is (x_p, pi, regime-string, skiba-or-None, x_hat-or-None);
    None prints as an empty cell (no high steady state / no Skiba stock).
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for x_p, pi, regime, skiba, x_hat in rows:
            w.writerow([
                _fmt(x_p),
                _fmt(pi),
                regime,
                "" if skiba is None else _fmt(skiba),
                "" if x_hat is None else _fmt(x_hat),
            ])
