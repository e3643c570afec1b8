"""Spliced global policy: regime taxonomy, dispatch, value dominance."""

import numpy as np
import pytest

from tipharvest.composite import (
    Regime,
    global_policy_at,
    global_value,
    is_austere,
    solve_full,
    standard_policy,
)
from tipharvest.model import ModelParams, recruit_smooth


def test_default_parameters_classify_interior_trivial(sol_default):
    assert sol_default.regime is Regime.INTERIOR_HIGH_TRIVIAL_SKIBA
    assert sol_default.skiba == 0.0
    assert sol_default.steady_state_high == pytest.approx((100.0, 10.0))
    assert sol_default.steady_state_low is None


def test_withskiba_classification(sol_withskiba):
    assert sol_withskiba.regime is Regime.INTERIOR_HIGH_WITH_SKIBA
    assert 0.0 < sol_withskiba.skiba < sol_withskiba.params.x_p
    assert sol_withskiba.steady_state_low is not None


def test_boundary_classification(sol_boundary):
    assert sol_boundary.regime is Regime.BOUNDARY_HIGH_WITH_SKIBA
    assert sol_boundary.high.regime == "boundary"


def test_no_high_steady_state_classification():
    p = ModelParams(sigma=1.0, rho=0.5, pi=0.9, x_p=150.0)
    sol = solve_full(p)
    assert sol.regime is Regime.NO_HIGH_STEADY_STATE
    assert sol.skiba is None
    assert sol.steady_state_high is None
    # Below x_p the depressed saddle still answers.
    assert global_policy_at(sol, 1.0) > 0.0
    with pytest.raises(ValueError):
        global_policy_at(sol, 200.0)


def test_policy_dispatch_across_skiba(sol_withskiba):
    sol = sol_withskiba
    p = sol.params
    sk = sol.skiba
    # Just below the Skiba stock: draw down (harvest above recruitment).
    x_dn = sk * 0.98
    assert global_policy_at(sol, x_dn) > recruit_smooth(x_dn, p.pi, p)
    # Just above: rebuild toward x_p (harvest below recruitment).
    x_up = sk * 1.02
    assert global_policy_at(sol, x_up) < recruit_smooth(x_up, p.pi, p)
    # The Skiba stock itself follows the austere plan.
    assert global_policy_at(sol, sk) < recruit_smooth(sk, p.pi, p)


def test_global_value_continuous_at_skiba(sol_withskiba):
    sol = sol_withskiba
    sk = sol.skiba
    below = global_value(sol, sk * (1.0 - 1e-7))
    above = global_value(sol, sk * (1.0 + 1e-7))
    assert below == pytest.approx(above, rel=1e-5)


def test_global_policy_jumps_at_skiba(sol_withskiba):
    # Values cross, policies do not: the harvest drops discontinuously when
    # the plan switches from drawdown to rebuilding.
    sol = sol_withskiba
    sk = sol.skiba
    below = global_policy_at(sol, sk * (1.0 - 1e-7))
    above = global_policy_at(sol, sk * (1.0 + 1e-7))
    assert below > above * 1.05


def test_global_value_dominates_standard_plan(sol_withskiba):
    # The spliced policy is optimal, so it weakly beats the regime-local
    # saddle plan everywhere both are defined, strictly above the Skiba stock.
    sol = sol_withskiba
    p = sol.params
    std = standard_policy(p)
    from tipharvest.saddle import policy_value

    xs = np.linspace(sol.skiba * 1.05, p.x_p * 0.99, 32)
    v_opt = np.array([global_value(sol, x) for x in xs])
    v_std = np.array([policy_value(std.low_saddle, x, p) for x in xs])
    assert np.all(v_opt > v_std)


def test_austere_branch_is_recognized_austere(sol_withskiba):
    from tipharvest.saddle import PolicyCurve

    sol = sol_withskiba
    std = standard_policy(sol.params)
    assert is_austere(sol.low.austere_curve, std)
    # A uniformly greedier curve harvests more somewhere: not austere.
    greedy = PolicyCurve(
        "greedy", std.low_saddle.factor,
        std.low_saddle.x, std.low_saddle.h * 1.01,
    )
    assert not is_austere(greedy, std)


def test_full_solution_covers_the_whole_domain(sol_default):
    sol = sol_default
    xs = np.geomspace(sol.x_floor * 1.5, sol.x_max * 0.999, 64)
    hs = np.array([global_policy_at(sol, x) for x in xs])
    assert np.all(hs > 0.0)
    assert np.all(np.isfinite(hs))
