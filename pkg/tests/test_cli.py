"""Command-line surface: artifacts, exit codes, output-dir resolution."""

import csv
import json

import pytest
from click.testing import CliRunner

from tipharvest.cli import main

BASE = """\
[model]
sigma = 1.0
rho = 0.05
pi = 0.2
x_p = 60.0
"""

HYST = BASE + "x_p_h = 70.0\n"

NOHIGH = """\
[model]
sigma = 1.0
rho = 0.5
pi = 0.9
x_p = 150.0
x_p_h = 160.0
"""

SMALL_ORACLE = "\n[oracle]\nn_x = 150\nn_h = 60\n"


@pytest.fixture()
def runner(monkeypatch):
    monkeypatch.delenv("TIPHARVEST_OUTPUT", raising=False)
    return CliRunner()


def _config(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_solve_writes_record_and_curves(runner, tmp_path):
    cfg = _config(tmp_path, BASE)
    out = tmp_path / "out"
    result = runner.invoke(main, ["solve", cfg, "-o", str(out)])
    assert result.exit_code == 0, result.output
    assert "regime: interior-high-with-skiba" in result.output
    assert "skiba: 45.16" in result.output
    record = json.loads((out / "solution.json").read_text())
    for entry in record["curves"]:
        assert (out / entry["file"]).exists()


def test_invalid_parameter_exits_2(runner, tmp_path):
    cfg = _config(tmp_path, BASE.replace("pi = 0.2", "pi = 1.2"))
    result = runner.invoke(main, ["solve", cfg])
    assert result.exit_code == 2
    assert "pi must lie strictly in (0, 1)" in result.output


def test_unknown_key_exits_2(runner, tmp_path):
    cfg = _config(tmp_path, BASE + "mystery = 1\n")
    result = runner.invoke(main, ["solve", cfg])
    assert result.exit_code == 2
    assert "unknown key 'mystery'" in result.output


def test_hysteresis_without_threshold_exits_2(runner, tmp_path):
    cfg = _config(tmp_path, BASE)
    result = runner.invoke(main, ["solve", cfg, "--hysteresis"])
    assert result.exit_code == 2
    assert "x_p_h" in result.output


def test_no_high_steady_state_with_hysteresis_exits_4(runner, tmp_path):
    cfg = _config(tmp_path, NOHIGH)
    out = tmp_path / "out"
    result = runner.invoke(main, ["solve", cfg, "--hysteresis", "-o", str(out)])
    assert result.exit_code == 4
    assert "no high steady state" in result.output
    # Artifacts for the depressed side are still written.
    assert (out / "solution.json").exists()


def test_simulate_round_trip_is_byte_identical(runner, tmp_path):
    # The written record re-ingested through --solution must reproduce the
    # fresh solve's trajectory file byte for byte.
    cfg = _config(tmp_path, BASE)
    sol_dir = tmp_path / "sol"
    assert runner.invoke(main, ["solve", cfg, "-o", str(sol_dir)]).exit_code == 0
    fresh = tmp_path / "fresh"
    loaded = tmp_path / "loaded"
    args = ["simulate", cfg, "--x0", "40", "--horizon", "800"]
    assert runner.invoke(main, args + ["-o", str(fresh)]).exit_code == 0
    assert runner.invoke(
        main, args + ["--solution", str(sol_dir), "-o", str(loaded)]
    ).exit_code == 0
    assert (fresh / "trajectory.csv").read_bytes() == (
        loaded / "trajectory.csv"
    ).read_bytes()


def test_simulate_rejects_mismatched_solution(runner, tmp_path):
    cfg = _config(tmp_path, BASE)
    sol_dir = tmp_path / "sol"
    runner.invoke(main, ["solve", cfg, "-o", str(sol_dir)])
    other = _config(tmp_path, BASE.replace("pi = 0.2", "pi = 0.3"), "other.ini")
    result = runner.invoke(
        main,
        ["simulate", other, "--x0", "40", "--solution", str(sol_dir),
         "-o", str(tmp_path / "x")],
    )
    assert result.exit_code == 2
    assert "disagree" in result.output


def test_skiba_command(runner, tmp_path):
    cfg = _config(tmp_path, BASE + SMALL_ORACLE)
    result = runner.invoke(main, ["skiba", cfg])
    assert result.exit_code == 0
    assert "skiba: 45.16" in result.output
    result = runner.invoke(main, ["skiba", cfg, "--oracle"])
    assert result.exit_code == 0, result.output
    assert "oracle skiba:" in result.output


def test_sweep_matrix(runner, tmp_path):
    cfg = _config(tmp_path, BASE)
    out = tmp_path / "sweep"
    result = runner.invoke(
        main,
        ["sweep", cfg, "--xp-list", "16,110", "--pi-list", "0.2,0.8",
         "-o", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = list(csv.reader(open(out / "sweep.csv")))
    assert rows[0] == ["x_p", "pi", "regime", "skiba", "x_hat"]
    assert len(rows) == 5
    regimes = {r[2] for r in rows[1:]}
    assert "interior-high-trivial-skiba" in regimes
    assert "boundary-high-with-skiba" in regimes
    # Per-entry artifacts avoid write contention between parallel entries.
    assert (out / "entry_xp16_pi0.2" / "solution.json").exists()


def test_sweep_rejects_bad_lists(runner, tmp_path):
    cfg = _config(tmp_path, BASE)
    result = runner.invoke(
        main, ["sweep", cfg, "--xp-list", "16,abc", "--pi-list", "0.2"]
    )
    assert result.exit_code == 2


def test_oracle_command(runner, tmp_path):
    cfg = _config(tmp_path, BASE + SMALL_ORACLE)
    out = tmp_path / "orc"
    result = runner.invoke(main, ["oracle", cfg, "-o", str(out)])
    assert result.exit_code == 0, result.output
    report = json.loads((out / "comparison.json").read_text())
    assert report["value_sup_rel"] < 0.05
    assert (out / "dp.csv").exists()


def test_output_dir_resolution(runner, tmp_path, monkeypatch):
    cfg = _config(tmp_path, BASE + f"\n[output]\ndir = {tmp_path / 'from_cfg'}\n")
    # Config [output] dir applies when nothing else is given.
    assert runner.invoke(main, ["solve", cfg]).exit_code == 0
    assert (tmp_path / "from_cfg" / "solution.json").exists()
    # Environment variable overrides the config...
    monkeypatch.setenv("TIPHARVEST_OUTPUT", str(tmp_path / "from_env"))
    assert runner.invoke(main, ["solve", cfg]).exit_code == 0
    assert (tmp_path / "from_env" / "solution.json").exists()
    # ...and the flag overrides both.
    assert runner.invoke(
        main, ["solve", cfg, "-o", str(tmp_path / "from_flag")]
    ).exit_code == 0
    assert (tmp_path / "from_flag" / "solution.json").exists()


def test_bench_command(runner, tmp_path):
    cfg = _config(tmp_path, BASE)
    result = runner.invoke(
        main,
        ["bench", cfg, "--n-x", "80", "--n-h", "30", "--iterations", "20",
         "--threads", "1,2"],
    )
    assert result.exit_code == 0, result.output
    assert "backend" in result.output
    assert "MISMATCH" not in result.output
