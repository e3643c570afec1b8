"""Phase-portrait figures for harvest-policy CSV artifacts.

Read-only consumer of the solver's exported CSVs; all numerical truth stays
in the files, this package only draws them.
"""

from .figspec import FigureSpec, SpecError, load_spec
from .reader import SchemaError, read_curve, read_trajectory
from .render import build_figure, render_phase

__all__ = [
    "FigureSpec",
    "SpecError",
    "SchemaError",
    "load_spec",
    "read_curve",
    "read_trajectory",
    "build_figure",
    "render_phase",
]
