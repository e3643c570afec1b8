"""Strict run-configuration parsing.

Runs are configured through a flat, sectioned key = value text file
(INI syntax, full-line comments with `#` or `;`).  Parsing is strict:
an unknown section or key, a value that does not parse, or a parameter
violating a model invariant all raise ConfigError naming the offender.
Silent misparameterization is worse than a refused run.

Schema (only [model] is required):

    [model]    sigma, rho, pi, x_p            required
               x_p_h, A, alpha                optional
    [solver]   x_max, x_floor, rtol, atol     optional
    [oracle]   n_x, n_h, dt, tol, max_iter,
               x_lo, x_hi, h_lo, h_hi,
               backend, threads               optional
    [output]   dir                            optional
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .model import ModelParams
from .oracle import DPConfig

__all__ = ["ConfigError", "OracleSettings", "RunConfig", "SolverSettings",
           "load_config"]


class ConfigError(ValueError):
    """A run configuration is unreadable, unknown, or invalid."""


@dataclass(frozen=True)
class SolverSettings:
    x_max: float | None = None
    x_floor: float | None = None
    rtol: float = 1e-10
    atol: float = 1e-12


@dataclass(frozen=True)
class OracleSettings:
    n_x: int = 1200
    n_h: int = 400
    dt: float | None = None
    tol: float | None = None
    max_iter: int | None = None
    x_lo: float | None = None
    x_hi: float | None = None
    h_lo: float | None = None
    h_hi: float | None = None
    backend: str | None = None
    threads: int = 1

    def dp_config(self, p: ModelParams) -> DPConfig:
        """Materialize a DPConfig, deriving any bound or step not pinned
        in the configuration from the model's own scales."""
        base = DPConfig.defaults(p, dt=self.dt, n_x=self.n_x, n_h=self.n_h)
        return DPConfig(
            x_lo=self.x_lo if self.x_lo is not None else base.x_lo,
            x_hi=self.x_hi if self.x_hi is not None else base.x_hi,
            n_x=self.n_x,
            h_lo=self.h_lo if self.h_lo is not None else base.h_lo,
            h_hi=self.h_hi if self.h_hi is not None else base.h_hi,
            n_h=self.n_h,
            dt=self.dt if self.dt is not None else base.dt,
            tol=self.tol if self.tol is not None else base.tol,
            max_iter=(self.max_iter if self.max_iter is not None
                      else base.max_iter),
        )


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    solver: SolverSettings
    oracle: OracleSettings
    output_dir: str | None


_SCHEMA = {
    "model": {
        "sigma": float, "rho": float, "pi": float, "x_p": float,
        "x_p_h": float, "A": float, "alpha": float,
    },
    "solver": {
        "x_max": float, "x_floor": float, "rtol": float, "atol": float,
    },
    "oracle": {
        "n_x": int, "n_h": int, "dt": float, "tol": float, "max_iter": int,
        "x_lo": float, "x_hi": float, "h_lo": float, "h_hi": float,
        "backend": str, "threads": int,
    },
    "output": {"dir": str},
}

_REQUIRED_MODEL = ("sigma", "rho", "pi", "x_p")
_BACKENDS = ("compiled", "python")


def _convert(section: str, key: str, raw: str, kind):
    if kind is str:
        return raw
    try:
        if kind is int:
            # Reject silent truncation of fractional grid sizes.
            as_float = float(raw)
            as_int = int(as_float)
            if as_int != as_float:
                raise ValueError
            return as_int
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"[{section}] {key} = {raw!r} is not a valid "
            f"{'integer' if kind is int else 'number'}"
        ) from None


def _parse_section(cp: configparser.ConfigParser, section: str) -> dict:
    out = {}
    if not cp.has_section(section):
        return out
    schema = _SCHEMA[section]
    for key, raw in cp.items(section):
        if key not in schema:
            raise ConfigError(
                f"unknown key {key!r} in section [{section}]; "
                f"known keys: {', '.join(sorted(schema))}"
            )
        out[key] = _convert(section, key, raw, schema[key])
    return out


def load_config(path) -> RunConfig:
    """Parse and validate a run configuration file."""
    path = Path(path)
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keys are case-sensitive (A vs alpha)
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc

    if cp.defaults():
        raise ConfigError(
            "a [DEFAULT] section is not allowed (keys would leak into "
            "every section and defeat strict checking)"
        )
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(
                f"unknown section [{section}]; known sections: "
                f"{', '.join(sorted(_SCHEMA))}"
            )

    model = _parse_section(cp, "model")
    missing = [k for k in _REQUIRED_MODEL if k not in model]
    if missing:
        raise ConfigError(
            f"section [model] is missing required keys: {', '.join(missing)}"
        )
    try:
        params = ModelParams(**model)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    solver = SolverSettings(**_parse_section(cp, "solver"))
    oracle = OracleSettings(**_parse_section(cp, "oracle"))
    if oracle.backend is not None and oracle.backend not in _BACKENDS:
        raise ConfigError(
            f"[oracle] backend must be one of {_BACKENDS}, got {oracle.backend!r}"
        )
    if oracle.threads < 1:
        raise ConfigError(f"[oracle] threads must be >= 1, got {oracle.threads}")

    out = _parse_section(cp, "output")
    return RunConfig(
        params=params,
        solver=solver,
        oracle=oracle,
        output_dir=out.get("dir"),
    )
