"""Phase-portrait renderer: stock on the horizontal axis, harvest vertical.

Output is deterministic: fixed rc settings, no timestamps or software tags
in the file, pinned svg hash salt. Identical inputs give byte-identical
images for a given matplotlib build.
"""

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .figspec import FigureSpec
from .reader import read_curve, read_trajectory

__all__ = ["build_figure", "render_phase"]

_RC = {
    "figure.figsize": (7.5, 5.0),
    "figure.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "svg.hashsalt": "plotviz",
    "path.simplify": False,
}

_LOCI_SAMPLES = 512


def _recruitment(spec: FigureSpec, x, factor):
    return factor * spec.A * np.asarray(x) ** spec.alpha


def _draw_loci(ax, spec: FigureSpec, lo: float, hi: float) -> None:
    # Each zero-drift locus is solid where its recruitment level is the
    # active one and faint dashed elsewhere; the solid pieces leave the
    # discontinuity gap at x_p open (no vertical connector). Under
    # hysteresis the depressed level stays active up to the recovery
    # threshold, so the solid pieces overlap on [x_p, x_p_h].
    lo = max(lo, 0.0)
    thresh = spec.x_p_h if spec.x_p_h is not None else spec.x_p

    seg = np.linspace(lo, thresh, _LOCI_SAMPLES)
    ax.plot(seg, _recruitment(spec, seg, spec.pi), color="0.35", lw=1.3,
            label="depressed recruitment", zorder=2)
    if thresh < hi:
        seg = np.linspace(thresh, hi, _LOCI_SAMPLES)
        ax.plot(seg, _recruitment(spec, seg, spec.pi), color="0.7", lw=0.9,
                ls="--", zorder=1)

    seg = np.linspace(spec.x_p, hi, _LOCI_SAMPLES)
    ax.plot(seg, _recruitment(spec, seg, 1.0), color="0.35", lw=1.3,
            label="full recruitment", zorder=2)
    if lo < spec.x_p:
        seg = np.linspace(lo, spec.x_p, _LOCI_SAMPLES)
        ax.plot(seg, _recruitment(spec, seg, 1.0), color="0.7", lw=0.9,
                ls="--", zorder=1)


def build_figure(spec: FigureSpec):
    """Compose the figure for a spec; the caller owns (and closes) it."""
    curves = [read_curve(p) for p in spec.curve_paths]
    overlays = [read_trajectory(p) for p in spec.trajectory_paths]

    with plt.rc_context(_RC):
        fig, ax = plt.subplots()

        lo = min(c.x.min() for c in curves)
        hi = max(c.x.max() for c in curves)
        if spec.x_range is not None:
            lo, hi = min(lo, spec.x_range[0]), max(hi, spec.x_range[1])
        _draw_loci(ax, spec, lo, hi)

        cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
        for i, curve in enumerate(curves):
            ax.plot(curve.x, curve.h, color=cycle[i % len(cycle)], lw=1.6,
                    label=curve.branch_id, zorder=3)

        ax.axvline(spec.x_p, color="0.45", ls="-.", lw=1.0, zorder=1,
                   label="tipping stock", gid="tipping-vertical")
        if spec.x_p_h is not None:
            ax.axvline(spec.x_p_h, color="0.45", ls="-.", lw=1.0, zorder=1,
                       label="recovery stock", gid="tipping-vertical")
        if spec.skiba is not None:
            ax.axvline(spec.skiba, color="k", ls=":", lw=1.2, zorder=1,
                       label="skiba stock", gid="skiba-vertical")

        for i, (xs, hs) in enumerate(spec.steady_states):
            ax.plot([xs], [hs], "o", color="k", ms=6, zorder=5,
                    label="steady state" if i == 0 else None)

        for i, tr in enumerate(overlays):
            ax.plot(tr.x, tr.h, color="tab:purple", lw=1.0, alpha=0.85,
                    zorder=4, label="trajectory" if i == 0 else None)

        ax.set_xlabel("stock x")
        ax.set_ylabel("harvest h")
        if spec.title:
            ax.set_title(spec.title)
        if spec.x_range is not None:
            ax.set_xlim(*spec.x_range)
        if spec.y_range is not None:
            ax.set_ylim(*spec.y_range)
        ax.legend(loc="upper left", fontsize=8.5, framealpha=0.9)
    return fig


def render_phase(spec: FigureSpec) -> str:
    """Render the spec to its output image and return the path."""
    fig = build_figure(spec)
    ext = os.path.splitext(spec.output)[1].lower()
    try:
        with plt.rc_context(_RC):
            if ext == ".png":
                # Suppress the software tag; Agg writes no timestamp, so
                # the byte stream depends only on inputs.
                fig.savefig(spec.output, dpi=144, metadata={"Software": None})
            else:
                fig.savefig(spec.output, metadata={"Date": None})
    finally:
        plt.close(fig)
    return spec.output
