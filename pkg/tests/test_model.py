"""Model primitives: parameter validation, recruitment, utility, steady states."""

import numpy as np
import pytest

from tipharvest.model import (
    H_MIN,
    ModelParams,
    hamiltonian,
    hamiltonian_dh,
    marginal_utility,
    next_state,
    notional_steady_state,
    recruit_hysteretic,
    recruit_smooth,
    recruit_tipping,
    utility,
)


def test_params_validation_names_the_offender():
    with pytest.raises(ValueError, match="pi"):
        ModelParams(sigma=1.0, rho=0.05, pi=1.2, x_p=16.0)
    with pytest.raises(ValueError, match="sigma"):
        ModelParams(sigma=0.0, rho=0.05, pi=0.5, x_p=16.0)
    with pytest.raises(ValueError, match="rho"):
        ModelParams(sigma=1.0, rho=-0.01, pi=0.5, x_p=16.0)
    with pytest.raises(ValueError, match="alpha"):
        ModelParams(sigma=1.0, rho=0.05, pi=0.5, x_p=16.0, alpha=1.0)
    with pytest.raises(ValueError, match="x_p_h"):
        ModelParams(sigma=1.0, rho=0.05, pi=0.5, x_p=16.0, x_p_h=16.0)


def test_recruitment_depressed_below_tipping(p_default):
    p = p_default
    x = np.array([1.0, 15.999, 16.0, 17.0])
    f = recruit_tipping(x, p)
    full = p.A * x ** p.alpha
    assert np.allclose(f[:2], p.pi * full[:2], rtol=1e-15)
    assert np.allclose(f[2:], full[2:], rtol=1e-15)


def test_hysteretic_recruitment_depends_on_state_not_stock(p_hyst):
    p = p_hyst
    x = 65.0  # between x_p and x_p_h: either fecundity is consistent
    assert recruit_hysteretic(x, 0, p) == p.pi * p.A * x ** p.alpha
    assert recruit_hysteretic(x, 1, p) == p.A * x ** p.alpha


def test_state_transition_thresholds(p_hyst):
    p = p_hyst
    assert next_state(59.0, 1, p) == 0
    assert next_state(60.0, 1, p) == 1
    assert next_state(65.0, 0, p) == 0  # below recovery threshold: stays low
    assert next_state(70.0, 0, p) == 1
    assert next_state(65.0, 1, p) == 1


def test_log_utility_band():
    assert ModelParams(sigma=1.0, rho=0.05, pi=0.5, x_p=16.0).log_utility
    assert not ModelParams(sigma=1.5, rho=0.05, pi=0.5, x_p=16.0).log_utility
    h = np.array([0.5, 1.0, 2.0])
    assert np.allclose(utility(h, 1.0), np.log(h), rtol=1e-15)
    assert np.allclose(utility(h, 2.0), -1.0 / h, rtol=1e-15)
    assert np.allclose(utility(h, 0.5), 2.0 * np.sqrt(h), rtol=1e-15)


def test_marginal_utility_matches_difference_quotient(rng):
    hs = rng.uniform(0.1, 20.0, size=32)
    for sigma in (0.5, 1.0, 2.0):
        for h in hs:
            eps = 1e-6 * h
            fd = (utility(h + eps, sigma) - utility(h - eps, sigma)) / (2 * eps)
            assert marginal_utility(h, sigma) == pytest.approx(fd, rel=1e-8)


def test_utility_rejects_nonpositive_harvest():
    with pytest.raises(ValueError):
        utility(0.0, 1.0)
    with pytest.raises(ValueError):
        utility(-1.0, 2.0)
    utility(H_MIN, 1.0)  # the numerical floor itself is evaluable


def test_steady_state_closed_form(p_default):
    # (factor * A * alpha / rho)**(1/(1-alpha)) and the recruitment flow there
    x1, h1 = notional_steady_state(1.0, p_default)
    assert x1 == pytest.approx(100.0, rel=1e-12)
    assert h1 == pytest.approx(10.0, rel=1e-12)
    x5, h5 = notional_steady_state(0.5, p_default)
    assert x5 == pytest.approx(25.0, rel=1e-12)
    assert h5 == pytest.approx(2.5, rel=1e-12)


def test_steady_state_scales_with_parameters(rng):
    for _ in range(16):
        A = rng.uniform(0.5, 2.0)
        alpha = rng.uniform(0.2, 0.8)
        rho = rng.uniform(0.01, 0.2)
        factor = rng.uniform(0.1, 1.0)
        p = ModelParams(sigma=1.0, rho=rho, pi=0.5, x_p=1.0, A=A, alpha=alpha)
        x_hat, h_hat = notional_steady_state(factor, p)
        # Defining conditions: f'(x) = rho and h = f(x).
        slope = factor * A * alpha * x_hat ** (alpha - 1.0)
        assert slope == pytest.approx(rho, rel=1e-12)
        assert h_hat == pytest.approx(factor * A * x_hat ** alpha, rel=1e-12)


def test_hamiltonian_stationary_in_h_at_foc(p_default, rng):
    p = p_default
    for _ in range(8):
        x = rng.uniform(1.0, 100.0)
        h = rng.uniform(0.5, 5.0)
        lam = marginal_utility(h, p.sigma)  # FOC: u'(h) = lambda
        eps = 1e-7 * h
        up = hamiltonian(x, h + eps, lam, 1.0, p)
        dn = hamiltonian(x, h - eps, lam, 1.0, p)
        assert (up - dn) / (2 * eps) == pytest.approx(0.0, abs=1e-6)


def test_maximized_hamiltonian_slope_tracks_drift(p_default, rng):
    # hamiltonian_dh is d/dh of H(x, h, u'(h)): u''(h) * (f - h), so its
    # sign is opposite the stock drift and it vanishes where h = f(x).
    p = p_default
    for _ in range(8):
        x = rng.uniform(1.0, 100.0)
        f = recruit_smooth(x, 1.0, p)
        assert hamiltonian_dh(x, 0.5 * f, 1.0, p) < 0.0
        assert hamiltonian_dh(x, 2.0 * f, 1.0, p) > 0.0
        h = rng.uniform(0.5, 5.0)
        eps = 1e-6 * h
        up = hamiltonian(x, h + eps, marginal_utility(h + eps, p.sigma), 1.0, p)
        dn = hamiltonian(x, h - eps, marginal_utility(h - eps, p.sigma), 1.0, p)
        assert hamiltonian_dh(x, h, 1.0, p) == pytest.approx(
            (up - dn) / (2 * eps), rel=1e-4
        )


def test_recruit_smooth_factor_bounds(p_default):
    with pytest.raises(ValueError):
        recruit_smooth(4.0, 1.2, p_default)
    with pytest.raises(ValueError):
        recruit_smooth(-1.0, 0.5, p_default)
    assert recruit_smooth(4.0, 0.0, p_default) == 0.0
