"""Saddle-path computation at a fixed fecundity factor."""

import numpy as np
import pytest

from tipharvest.model import ModelParams, marginal_utility, utility
from tipharvest.saddle import (
    PolicyCurve,
    eval_policy,
    linearize_at_steady_state,
    policy_value,
    resample_monotone,
    solve_saddle,
)


def test_linearization_eigenstructure(p_default, rng):
    for factor in (1.0, 0.5, 0.2):
        lin = linearize_at_steady_state(factor, p_default)
        # Trace rho, determinant h * f'' / sigma; stable root negative.
        assert lin.stable_eigenvalue + lin.unstable_eigenvalue == pytest.approx(
            p_default.rho, rel=1e-12
        )
        assert lin.stable_eigenvalue * lin.unstable_eigenvalue == pytest.approx(
            lin.jacobian_det, rel=1e-12
        )
        assert lin.stable_eigenvalue < 0.0 < lin.unstable_eigenvalue
        assert lin.stable_slope == pytest.approx(
            p_default.rho - lin.stable_eigenvalue, rel=1e-12
        )


def test_saddle_passes_through_steady_state(p_default):
    curve = solve_saddle(1.0, p_default, x_lo=10.0, x_hi=300.0)
    assert eval_policy(curve, 100.0) == pytest.approx(10.0, rel=1e-9)
    # Policy is strictly increasing along the stable manifold.
    assert np.all(np.diff(curve.h) > 0.0)
    v_hat = policy_value(curve, 100.0, p_default)
    assert v_hat == pytest.approx(utility(10.0, 1.0) / p_default.rho, rel=1e-10)


def test_saddle_satisfies_hjb_envelope(p_default, rng):
    # Along the optimal branch V'(x) = u'(h(x)); check the Hamiltonian-based
    # value against a difference quotient at random interior stocks.
    curve = solve_saddle(1.0, p_default, x_lo=10.0, x_hi=300.0)
    xs = rng.uniform(15.0, 250.0, size=12)
    for x in xs:
        eps = 1e-5 * x
        dv = (
            policy_value(curve, x + eps, p_default)
            - policy_value(curve, x - eps, p_default)
        ) / (2 * eps)
        assert dv == pytest.approx(
            marginal_utility(eval_policy(curve, x), p_default.sigma), rel=1e-5
        )


def test_saddle_scales_across_parameters(rng):
    # Spot-check the steady-state anchor for a few random parameter draws.
    for _ in range(4):
        p = ModelParams(
            sigma=float(rng.uniform(0.5, 2.5)),
            rho=float(rng.uniform(0.02, 0.15)),
            pi=0.5,
            x_p=1.0,
            A=float(rng.uniform(0.5, 2.0)),
            alpha=float(rng.uniform(0.3, 0.7)),
        )
        factor = float(rng.uniform(0.3, 1.0))
        from tipharvest.model import notional_steady_state

        x_hat, h_hat = notional_steady_state(factor, p)
        curve = solve_saddle(factor, p, x_lo=0.2 * x_hat, x_hi=3.0 * x_hat)
        assert eval_policy(curve, x_hat) == pytest.approx(h_hat, rel=1e-8)


def test_saddle_one_sided_domains(p_default):
    # Either side may be clipped to the steady state; each arm alone works.
    up = solve_saddle(1.0, p_default, x_lo=100.0, x_hi=300.0)
    dn = solve_saddle(1.0, p_default, x_lo=10.0, x_hi=100.0)
    assert up.x_lo == pytest.approx(100.0, rel=1e-9)
    assert dn.x_hi == pytest.approx(100.0, rel=1e-9)
    assert eval_policy(up, 100.0) == pytest.approx(10.0, rel=1e-8)
    assert eval_policy(dn, 100.0) == pytest.approx(10.0, rel=1e-8)


def test_eval_policy_rejects_out_of_domain(p_default):
    curve = solve_saddle(1.0, p_default, x_lo=50.0, x_hi=200.0)
    with pytest.raises(ValueError, match="outside curve domain"):
        eval_policy(curve, 49.0)
    with pytest.raises(ValueError, match="outside curve domain"):
        eval_policy(curve, np.array([60.0, 201.0]))


def test_policy_curve_validation():
    x = np.array([1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="increase strictly"):
        PolicyCurve("b", 1.0, np.array([1.0, 1.0, 3.0]), np.ones(3))
    with pytest.raises(ValueError, match="positive"):
        PolicyCurve("b", 1.0, x, np.array([1.0, -1.0, 2.0]))
    with pytest.raises(ValueError, match="factor"):
        PolicyCurve("b", 0.0, x, np.ones(3))
    curve = PolicyCurve("b", 1.0, x, np.array([1.0, 2.0, 3.0]))
    assert not curve.x.flags.writeable


def test_resample_monotone_pins_exact_points():
    raw_x = np.array([1.0, 1.0, 1.5, 2.0, 3.0, 4.0])
    raw_h = np.array([1.0, 1.0, 1.2, 1.5, 2.2, 3.0])
    targets = np.array([1.0, 2.0, 3.0, 4.0])
    tx, th = resample_monotone(raw_x, raw_h, targets, exact=[(4.0, 3.25)])
    assert np.array_equal(tx, targets)
    assert th[-1] == 3.25
    assert np.all(np.isfinite(th))
