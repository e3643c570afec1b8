"""Fixture artifacts: real solver output CSVs for the renderer to consume.

The solver package is only used here to *generate* inputs; the code under
test parses the files with its own readers.
"""

import json

import pytest

tipharvest = pytest.importorskip(
    "tipharvest", reason="solver package needed to generate fixture CSVs"
)

from tipharvest.composite import solve_full  # noqa: E402
from tipharvest.hysteresis import solve_hysteretic  # noqa: E402
from tipharvest.model import ModelParams  # noqa: E402
from tipharvest.serialize import write_solution, write_trajectory_csv  # noqa: E402
from tipharvest.trajectory import simulate  # noqa: E402


@pytest.fixture(scope="session")
def boundary_artifacts(tmp_path_factory):
    p = ModelParams(sigma=1.0, rho=0.05, pi=0.5, x_p=110.0)
    out = tmp_path_factory.mktemp("boundary")
    record = write_solution(solve_full(p), out)
    return out, record


@pytest.fixture(scope="session")
def hysteretic_artifacts(tmp_path_factory):
    p = ModelParams(sigma=1.0, rho=0.05, pi=0.2, x_p=60.0, x_p_h=70.0)
    out = tmp_path_factory.mktemp("hysteretic")
    sol = solve_hysteretic(p)
    record = write_solution(sol, out)
    traj = simulate(sol, p, x0=58.0, horizon=600.0)
    write_trajectory_csv(out / "trajectory.csv", traj)
    return out, record


def spec_text(out_image, art_dir, record, trajectories=(), markers=True):
    """Compose a figure-spec INI from a solution record, as a user would."""
    params = record["params"]
    lines = ["[figure]", f"output = {out_image}", "", "[curves]"]
    for i, entry in enumerate(record["curves"]):
        lines.append(f"c{i} = {art_dir / entry['file']}")
    if trajectories:
        lines.append("")
        lines.append("[trajectories]")
        for i, path in enumerate(trajectories):
            lines.append(f"t{i} = {path}")
    lines += [
        "",
        "[loci]",
        f"A = {params['A']}",
        f"alpha = {params['alpha']}",
        f"pi = {params['pi']}",
        f"x_p = {params['x_p']}",
    ]
    if params.get("x_p_h") is not None:
        lines.append(f"x_p_h = {params['x_p_h']}")
    if markers:
        lines.append("")
        lines.append("[markers]")
        if record.get("skiba") is not None:
            lines.append(f"skiba = {record['skiba']}")
        if record.get("steady_state_high") is not None:
            xs, hs = record["steady_state_high"]
            lines.append(f"steady_state_high = {xs}, {hs}")
        if record.get("steady_state_low") is not None:
            xs, hs = record["steady_state_low"]
            lines.append(f"steady_state_low = {xs}, {hs}")
    return "\n".join(lines) + "\n"


@pytest.fixture()
def make_spec(tmp_path):
    """Write a spec file and return its path."""

    def _make(art_dir, record, name="fig.png", **kwargs):
        spec_path = tmp_path / "spec.ini"
        spec_path.write_text(
            spec_text(tmp_path / name, art_dir, record, **kwargs)
        )
        return spec_path

    return _make


@pytest.fixture(scope="session")
def record_of():
    def _load(art_dir):
        return json.loads((art_dir / "solution.json").read_text())

    return _load
