"""Shared fixtures plus a per-criterion summary for the acceptance suite."""

import numpy as np
import pytest

from tipharvest.composite import solve_full
from tipharvest.hysteresis import solve_hysteretic
from tipharvest.model import ModelParams


@pytest.fixture(scope="session")
def p_default() -> ModelParams:
    return ModelParams(sigma=1.0, rho=0.05, pi=0.5, x_p=16.0)


@pytest.fixture(scope="session")
def sol_default(p_default):
    return solve_full(p_default)


@pytest.fixture(scope="session")
def p_withskiba() -> ModelParams:
    return ModelParams(sigma=1.0, rho=0.05, pi=0.2, x_p=60.0)


@pytest.fixture(scope="session")
def sol_withskiba(p_withskiba):
    return solve_full(p_withskiba)


@pytest.fixture(scope="session")
def p_boundary() -> ModelParams:
    return ModelParams(sigma=1.0, rho=0.05, pi=0.5, x_p=110.0)


@pytest.fixture(scope="session")
def sol_boundary(p_boundary):
    return solve_full(p_boundary)


@pytest.fixture(scope="session")
def p_hyst() -> ModelParams:
    return ModelParams(sigma=1.0, rho=0.05, pi=0.2, x_p=60.0, x_p_h=70.0)


@pytest.fixture(scope="session")
def sol_hyst(p_hyst):
    return solve_hysteretic(p_hyst)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = []
    seen = set()
    for outcome, status in (("passed", "PASS"), ("failed", "FAIL"),
                            ("error", "FAIL")):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::" not in nodeid or nodeid in seen:
                continue
            seen.add(nodeid)
            name = nodeid.split("::")[-1]
            name = name.removeprefix("test_").replace("_", " ")
            rows.append(f"{name:<60s} {status}")
    if rows:
        terminalreporter.section("acceptance criteria")
        for row in sorted(rows):
            terminalreporter.write_line(row)
