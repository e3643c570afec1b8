"""Hysteretic variant: recovery requires climbing to x_p_h > x_p."""

import numpy as np
import pytest

from tipharvest.composite import Regime, global_value, solve_full
from tipharvest.hysteresis import (
    hysteretic_policy_at,
    hysteretic_value_at,
    solve_hysteretic,
)
from tipharvest.model import ModelParams, recruit_smooth


def test_requires_recovery_threshold(p_withskiba):
    with pytest.raises(ValueError, match="x_p_h"):
        solve_hysteretic(p_withskiba)


def test_austere_branch_targets_the_recovery_threshold(sol_hyst, p_hyst):
    sol = sol_hyst
    assert sol.low.target == p_hyst.x_p_h
    assert sol.low.austere_curve.x_hi == pytest.approx(p_hyst.x_p_h, rel=1e-12)


def test_hysteresis_raises_the_giveup_stock(sol_hyst, p_hyst):
    # Recovery is strictly harder (longer climb to regain full fecundity),
    # so giving up becomes optimal from higher stocks.
    plain = solve_full(
        ModelParams(sigma=p_hyst.sigma, rho=p_hyst.rho, pi=p_hyst.pi,
                    x_p=p_hyst.x_p)
    )
    assert sol_hyst.skiba > plain.skiba


def test_hysteresis_weakly_lowers_depressed_value(sol_hyst, p_hyst):
    plain = solve_full(
        ModelParams(sigma=p_hyst.sigma, rho=p_hyst.rho, pi=p_hyst.pi,
                    x_p=p_hyst.x_p)
    )
    xs = np.geomspace(sol_hyst.x_floor * 2.0, p_hyst.x_p * 0.999, 64)
    v_plain = np.array([global_value(plain, x) for x in xs])
    v_hyst = np.array([hysteretic_value_at(sol_hyst, x, 0) for x in xs])
    # Below both give-up stocks the two solves resample the same depressed
    # saddle on different grids; allow interpolation-level noise.
    assert np.all(v_plain >= v_hyst - 1e-9 * (1.0 + np.abs(v_plain)))
    # Strict where the plain plan would already have recovered fecundity.
    mid = xs[(xs > plain.skiba * 1.05)]
    v_p_mid = np.array([global_value(plain, x) for x in mid])
    v_h_mid = np.array([hysteretic_value_at(sol_hyst, x, 0) for x in mid])
    assert np.all(v_p_mid > v_h_mid)


def test_state_dispatch_between_thresholds(sol_hyst, p_hyst):
    # Between x_p and x_p_h the policy depends on the fecundity state alone.
    x = 0.5 * (p_hyst.x_p + p_hyst.x_p_h)
    h0 = hysteretic_policy_at(sol_hyst, x, 0)
    h1 = hysteretic_policy_at(sol_hyst, x, 1)
    assert h0 != h1
    # Depressed state keeps rebuilding: harvest below depressed recruitment.
    assert h0 < recruit_smooth(x, p_hyst.pi, p_hyst)


def test_state_consistency_enforced(sol_hyst, p_hyst):
    with pytest.raises(ValueError, match="s = 1"):
        hysteretic_policy_at(sol_hyst, 0.5 * p_hyst.x_p, 1)
    with pytest.raises(ValueError, match="s = 0"):
        hysteretic_policy_at(sol_hyst, p_hyst.x_p_h * 1.5, 0)
    with pytest.raises(ValueError, match="fecundity state"):
        hysteretic_policy_at(sol_hyst, p_hyst.x_p, 2)


def test_post_recovery_descends_when_steady_state_below_threshold(p_hyst):
    # x_hat = 100 > x_p_h = 70: after recovery the stock keeps climbing.
    sol = solve_hysteretic(p_hyst)
    assert sol.post_recovery is not None
    assert not sol.post_recovery.descends
    assert sol.post_recovery.steady_state == pytest.approx((100.0, 10.0))
    # Push the recovery threshold above the steady state: the optimal path
    # descends back toward it after recovering.
    p2 = ModelParams(sigma=1.0, rho=0.05, pi=0.2, x_p=60.0, x_p_h=120.0)
    sol2 = solve_hysteretic(p2)
    if sol2.post_recovery is not None:
        assert sol2.post_recovery.descends


def test_permanent_collapse_flag(sol_hyst):
    assert not sol_hyst.permanent_collapse
    p = ModelParams(sigma=1.0, rho=0.5, pi=0.9, x_p=150.0, x_p_h=151.0)
    sol = solve_hysteretic(p)
    assert sol.regime is Regime.NO_HIGH_STEADY_STATE
    assert sol.permanent_collapse
