"""Depressed-fecundity problem below the tipping stock: austere recovery
branch, terminal transversality, recoverability, Skiba stock."""

import numpy as np
import pytest

from tipharvest.high_fecundity import solve_constrained_high, v_star
from tipharvest.low_fecundity import (
    check_recoverability,
    solve_low,
    terminal_harvest_root,
)
from tipharvest.model import (
    ModelParams,
    hamiltonian,
    marginal_utility,
    recruit_smooth,
    utility,
)
from tipharvest.saddle import eval_policy, policy_value


def _v_at_target(p):
    high = solve_constrained_high(p)
    return float(v_star(high, p.x_p))


def test_terminal_harvest_solves_the_matching_condition(p_withskiba):
    p = p_withskiba
    v_p = _v_at_target(p)
    h_T = terminal_harvest_root(p, p.x_p, v_p)
    f_low = recruit_smooth(p.x_p, p.pi, p)
    assert 0.0 < h_T < f_low
    lam = marginal_utility(h_T, p.sigma)
    resid = hamiltonian(p.x_p, h_T, lam, p.pi, p) - p.rho * v_p
    assert abs(resid) < 1e-10 * (1.0 + abs(p.rho * v_p))


def test_terminal_harvest_rejects_value_below_parking_floor(p_withskiba):
    p = p_withskiba
    floor = utility(recruit_smooth(p.x_p, 1.0, p), p.sigma) / p.rho
    with pytest.raises(ValueError, match="below"):
        terminal_harvest_root(p, p.x_p, floor - 1.0)


def test_recoverability_flags(p_withskiba):
    # Recoverability is geometric: the depressed saddle's harvest at the
    # target must not exceed the full recruitment flow there.
    p = p_withskiba
    assert check_recoverability(p, p.x_p, _v_at_target(p))
    hopeless = ModelParams(sigma=1.0, rho=0.5, pi=0.9, x_p=150.0)
    assert not check_recoverability(hopeless, hopeless.x_p, _v_at_target(hopeless))


def test_austere_branch_terminates_at_target(p_withskiba):
    p = p_withskiba
    low = solve_low(p, target=p.x_p, v_high_at_target=_v_at_target(p))
    assert low.recoverable
    curve = low.austere_curve
    assert curve is not None
    assert curve.x_hi == pytest.approx(p.x_p, rel=1e-12)
    assert eval_policy(curve, p.x_p) == pytest.approx(low.h_terminal, rel=1e-9)
    # Rebuilding: harvest stays below depressed recruitment on the branch.
    xs = np.linspace(curve.x_lo * 1.01, p.x_p * 0.999, 128)
    assert np.all(eval_policy(curve, xs) < recruit_smooth(xs, p.pi, p))


def test_skiba_is_a_value_crossing(p_withskiba):
    p = p_withskiba
    low = solve_low(p, target=p.x_p, v_high_at_target=_v_at_target(p))
    sk = low.skiba
    assert sk is not None and 0.0 < sk < p.x_p
    va = policy_value(low.austere_curve, sk, p)
    vs = policy_value(low.low_saddle, sk, p)
    assert va == pytest.approx(vs, rel=1e-8)
    # Above the crossing the austere plan wins, below the saddle wins.
    up = sk * 1.05
    dn = sk * 0.95
    assert policy_value(low.austere_curve, up, p) > policy_value(
        low.low_saddle, up, p
    )
    assert policy_value(low.austere_curve, dn, p) < policy_value(
        low.low_saddle, dn, p
    )


def test_trivial_skiba_when_recovery_dominates_everywhere(p_default):
    p = p_default
    low = solve_low(p, target=p.x_p, v_high_at_target=_v_at_target(p))
    assert low.recoverable
    assert low.skiba == 0.0
    assert low.low_saddle is None


def test_unrecoverable_has_no_skiba():
    p = ModelParams(sigma=1.0, rho=0.5, pi=0.9, x_p=150.0)
    v_p = _v_at_target(p)
    low = solve_low(p, target=p.x_p, v_high_at_target=v_p)
    assert not low.recoverable
    assert low.skiba is None
    assert low.austere_curve is None
    assert low.low_saddle is not None  # depressed saddle still rules below


def test_skiba_moves_up_with_weaker_continuation(p_withskiba):
    # Lowering the value of arriving at the target makes giving up optimal
    # from higher stocks: the give-up threshold increases.
    p = p_withskiba
    v_p = _v_at_target(p)
    # Stay above the parking floor u(f(x_p))/rho, else no terminal harvest.
    floor = utility(recruit_smooth(p.x_p, 1.0, p), p.sigma) / p.rho
    v_weak = floor + 0.2 * (v_p - floor)
    sk_strong = solve_low(p, target=p.x_p, v_high_at_target=v_p).skiba
    sk_weak = solve_low(p, target=p.x_p, v_high_at_target=v_weak).skiba
    assert sk_weak > sk_strong
