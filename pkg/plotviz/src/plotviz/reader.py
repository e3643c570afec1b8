"""Parsers for the solver's CSV artifacts.

Documented schemas:

- policy curve:  x,h,V,branch_id,factor   (optional trailing s column)
- trajectory:    t,x,h,s,event

A header that deviates raises SchemaError spelling out the column diff.
"""

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SchemaError",
    "Curve",
    "TrajectoryOverlay",
    "read_curve",
    "read_trajectory",
]

CURVE_COLUMNS = ("x", "h", "V", "branch_id", "factor")
TRAJECTORY_COLUMNS = ("t", "x", "h", "s", "event")


class SchemaError(ValueError):
    """A CSV file does not conform to its documented schema."""


@dataclass(frozen=True)
class Curve:
    branch_id: str
    factor: float
    s: int | None
    x: np.ndarray
    h: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class TrajectoryOverlay:
    t: np.ndarray
    x: np.ndarray
    h: np.ndarray
    s: np.ndarray


def _check_header(path, got, expected) -> None:
    if tuple(got) == tuple(expected):
        return
    missing = [c for c in expected if c not in got]
    unexpected = [c for c in got if c not in expected]
    parts = [f"expected columns [{', '.join(expected)}]"]
    if missing:
        parts.append(f"missing [{', '.join(missing)}]")
    if unexpected:
        parts.append(f"unexpected [{', '.join(unexpected)}]")
    if not missing and not unexpected:
        parts.append(f"wrong order [{', '.join(got)}]")
    raise SchemaError(f"schema mismatch in {path}: " + "; ".join(parts))


def _read_rows(path, expected, optional=()):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SchemaError(f"schema mismatch in {path}: file is empty")
        if optional and tuple(header) == tuple(expected) + tuple(optional):
            expected = tuple(expected) + tuple(optional)
        _check_header(path, header, expected)
        rows = list(reader)
    if not rows:
        raise SchemaError(f"schema mismatch in {path}: no data rows")
    return tuple(header), rows


def read_curve(path) -> Curve:
    """Parse a policy-branch CSV into arrays."""
    header, rows = _read_rows(path, CURVE_COLUMNS, optional=("s",))
    has_s = header[-1] == "s"
    try:
        x = np.array([float(r[0]) for r in rows])
        h = np.array([float(r[1]) for r in rows])
        v = np.array([float(r[2]) for r in rows])
        factor = float(rows[0][4])
        s = int(rows[0][5]) if has_s else None
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"schema mismatch in {path}: bad row ({exc})") from exc
    return Curve(branch_id=rows[0][3], factor=factor, s=s, x=x, h=h, v=v)


def read_trajectory(path) -> TrajectoryOverlay:
    """Parse a simulated stock-path CSV into arrays."""
    _, rows = _read_rows(path, TRAJECTORY_COLUMNS)
    try:
        t = np.array([float(r[0]) for r in rows])
        x = np.array([float(r[1]) for r in rows])
        h = np.array([float(r[2]) for r in rows])
        s = np.array([int(r[3]) for r in rows])
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"schema mismatch in {path}: bad row ({exc})") from exc
    return TrajectoryOverlay(t=t, x=x, h=h, s=s)
