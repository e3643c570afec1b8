"""Figure-spec text files: what to draw, from which CSVs, to which image.

INI format, case-sensitive keys, unknown keys rejected:

    [figure]
    output = phase.png          ; .png or .svg
    title = ...                 ; optional
    x_min = 0                   ; optional axis ranges (give both of a pair)
    x_max = 140
    y_min = 0
    y_max = 14

    [curves]                    ; policy-branch CSVs, at least one
    high = out/curve_high-boundary.csv
    low = out/curve_low-saddle.csv

    [trajectories]              ; optional overlays
    run = out/trajectory.csv

    [loci]                      ; recruitment loci A x^alpha and pi A x^alpha
    A = 1.0                     ; optional, default 1
    alpha = 0.5                 ; optional, default 0.5
    pi = 0.5
    x_p = 110.0
    x_p_h = 120.0               ; optional second tipping vertical

    [markers]                   ; all optional
    skiba = 45.16
    steady_state_high = 100.0, 10.0
    steady_state_low = 4.0, 0.4
"""

import configparser
import os
from dataclasses import dataclass, field

__all__ = ["SpecError", "FigureSpec", "load_spec"]


class SpecError(ValueError):
    """Figure spec file is malformed or references missing inputs."""


@dataclass(frozen=True)
class FigureSpec:
    output: str
    curve_paths: tuple[str, ...]
    trajectory_paths: tuple[str, ...] = ()
    title: str | None = None
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None
    A: float = 1.0
    alpha: float = 0.5
    pi: float = 0.5
    x_p: float = 1.0
    x_p_h: float | None = None
    skiba: float | None = None
    steady_states: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self) -> None:
        ext = os.path.splitext(self.output)[1].lower()
        if ext not in (".png", ".svg"):
            raise SpecError(f"output must end in .png or .svg, got '{self.output}'")
        if not self.curve_paths:
            raise SpecError("at least one curve CSV is required")
        for path in (*self.curve_paths, *self.trajectory_paths):
            if not os.path.exists(path):
                raise SpecError(f"referenced file does not exist: {path}")
        if not 0.0 < self.pi < 1.0:
            raise SpecError(f"pi must lie strictly in (0, 1), got {self.pi}")
        if not self.x_p > 0.0:
            raise SpecError(f"x_p must be positive, got {self.x_p}")
        if self.x_p_h is not None and self.x_p_h < self.x_p:
            raise SpecError("x_p_h must not fall below x_p")


_FIGURE_KEYS = ("output", "title", "x_min", "x_max", "y_min", "y_max")
_LOCI_KEYS = ("A", "alpha", "pi", "x_p", "x_p_h")
_MARKER_KEYS = ("skiba", "steady_state_high", "steady_state_low")
_SECTIONS = ("figure", "curves", "trajectories", "loci", "markers")


def _float(section, key, raw):
    try:
        return float(raw)
    except ValueError as exc:
        raise SpecError(f"[{section}] {key} must be a number, got '{raw}'") from exc


def _pair(section, key, raw):
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise SpecError(f"[{section}] {key} must be 'x, h', got '{raw}'")
    return (_float(section, key, parts[0]), _float(section, key, parts[1]))


def _range(sec, lo_key, hi_key):
    lo, hi = sec.get(lo_key), sec.get(hi_key)
    if (lo is None) != (hi is None):
        raise SpecError(f"give both {lo_key} and {hi_key} or neither")
    if lo is None:
        return None
    return (_float("figure", lo_key, lo), _float("figure", hi_key, hi))


def load_spec(path) -> FigureSpec:
    """Parse and validate a figure-spec file; paths resolve relative to it."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh, source=str(path))
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}") from exc
    except configparser.Error as exc:
        raise SpecError(f"malformed spec file: {exc}") from exc

    if cp.defaults():
        raise SpecError("[DEFAULT] section is not supported")
    for name in cp.sections():
        if name not in _SECTIONS:
            raise SpecError(
                f"unknown section [{name}]; known sections: "
                + ", ".join(_SECTIONS)
            )
    for section, known in (
        ("figure", _FIGURE_KEYS), ("loci", _LOCI_KEYS), ("markers", _MARKER_KEYS)
    ):
        if cp.has_section(section):
            for key in cp[section]:
                if key not in known:
                    raise SpecError(
                        f"unknown key '{key}' in [{section}]; known keys: "
                        + ", ".join(known)
                    )

    if not cp.has_section("figure") or "output" not in cp["figure"]:
        raise SpecError("[figure] output is required")
    if not cp.has_section("curves") or not list(cp["curves"]):
        raise SpecError("[curves] must list at least one CSV")
    if not cp.has_section("loci"):
        raise SpecError("[loci] is required (pi and x_p at minimum)")
    for key in ("pi", "x_p"):
        if key not in cp["loci"]:
            raise SpecError(f"[loci] {key} is required")

    base = os.path.dirname(os.path.abspath(path))

    def resolve(rel):
        return rel if os.path.isabs(rel) else os.path.join(base, rel)

    fig = cp["figure"]
    loci = cp["loci"]
    markers = cp["markers"] if cp.has_section("markers") else {}
    steady = tuple(
        _pair("markers", key, markers[key])
        for key in ("steady_state_high", "steady_state_low")
        if key in markers
    )
    trajectories = (
        tuple(resolve(v) for v in cp["trajectories"].values())
        if cp.has_section("trajectories")
        else ()
    )
    return FigureSpec(
        output=resolve(fig["output"]),
        curve_paths=tuple(resolve(v) for v in cp["curves"].values()),
        trajectory_paths=trajectories,
        title=fig.get("title"),
        x_range=_range(fig, "x_min", "x_max"),
        y_range=_range(fig, "y_min", "y_max"),
        A=_float("loci", "A", loci.get("A", "1.0")),
        alpha=_float("loci", "alpha", loci.get("alpha", "0.5")),
        pi=_float("loci", "pi", loci["pi"]),
        x_p=_float("loci", "x_p", loci["x_p"]),
        x_p_h=(
            _float("loci", "x_p_h", loci["x_p_h"]) if "x_p_h" in loci else None
        ),
        skiba=(
            _float("markers", "skiba", markers["skiba"])
            if "skiba" in markers
            else None
        ),
        steady_states=steady,
    )
