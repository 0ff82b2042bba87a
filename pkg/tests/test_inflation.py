import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spirits import (
    BasinError,
    DomainError,
    MapParams,
    PhaseError,
    PolicyParams,
    ShockParams,
    SimConfig,
    crisis_inflation_correction,
    expected_gap_path,
    fixed_points,
    g_prime,
    inflation_now,
    inflation_path,
    simulate,
)
from spirits.inflation import _expected_gaps, default_truncation, inflation_residual, kappa_high

SYM = MapParams(0.5, 1.5, 1.0, 5.0)
PHASE_A = MapParams(0.5, 1.5, 0.8, 1.5)


def recursion_oracle(g, eta, delta, xi, horizon):
    """Iterate E[d_{t+1}] = g E[d_t] + E[xi_{t+1}], E[xi_{t+j}] = eta^j xi."""
    out, d, x = [], delta, xi
    for _ in range(horizon):
        x = eta * x
        d = g * d + x
        out.append(d)
    return np.array(out)


def closed_form_pi(g, eta, phi, delta, xi):
    """Geometric sums of the forward term with kappa = 0."""
    dpart = delta * (g - 1.0) / (phi - g)
    if xi == 0.0:
        return dpart
    return dpart + xi * eta / (eta - g) * ((eta - 1.0) / (phi - eta) - (g - 1.0) / (phi - g))


def test_kappa_matches_slope():
    fps = fixed_points(SYM)
    assert kappa_high(SYM) == pytest.approx(3.0 * g_prime(SYM, fps.c_high), rel=1e-15)
    assert PolicyParams.from_map(SYM).kappa_high == kappa_high(SYM)


def test_expected_gaps():
    s = ShockParams(0.1, 0.5, 0)
    assert np.all(expected_gap_path(PHASE_A, s, 0.0, 0.0, 10) == 0.0)
    g = g_prime(PHASE_A, fixed_points(PHASE_A).c_high)
    k = np.arange(1, 11)
    np.testing.assert_allclose(expected_gap_path(PHASE_A, ShockParams(0.1, 0.0), 0.02, 0.3, 10),
                               g**k * 0.02, rtol=1e-14)
    assert _expected_gaps(0.3, 0.5, 0.01, 0.02, 2)[1] == pytest.approx(
        recursion_oracle(0.3, 0.5, 0.01, 0.02, 2)[1], rel=1e-14)


@settings(max_examples=60)
@given(g=st.floats(-0.9, 0.95), eta=st.floats(0.0, 0.95), d=st.floats(-0.5, 0.5), xi=st.floats(-0.5, 0.5))
def test_expected_gaps_match_recursion(g, eta, d, xi):
    np.testing.assert_allclose(_expected_gaps(g, eta, d, xi, 25), recursion_oracle(g, eta, d, xi, 25),
                               rtol=1e-9, atol=1e-12)


def test_equal_rates_branch():
    np.testing.assert_allclose(_expected_gaps(0.5, 0.5, 0.1, 0.2, 12),
                               recursion_oracle(0.5, 0.5, 0.1, 0.2, 12), rtol=1e-13)


def test_steady_state_gives_zero_inflation():
    policy = PolicyParams(1.5, 0.99, 0.0)
    assert inflation_now(policy, PHASE_A, ShockParams(0.1, 0.5), 0.0, 0.0, 0.0, free_kappa=True) == 0.0


@pytest.mark.parametrize("delta", [0.01, -0.03, 0.2])
def test_zero_kappa_white_noise_closed_form(delta):
    g = g_prime(PHASE_A, fixed_points(PHASE_A).c_high)
    policy = PolicyParams(1.5, 0.99, 0.0)
    pi = inflation_now(policy, PHASE_A, ShockParams(0.1, 0.0), delta, 0.0, 0.0, free_kappa=True)
    assert pi == pytest.approx((g - 1.0) * delta / (1.5 - g), abs=1e-12)


def test_zero_kappa_colored_noise_closed_form():
    g = g_prime(PHASE_A, fixed_points(PHASE_A).c_high)
    policy = PolicyParams(1.7, 0.99, 0.0)
    pi = inflation_now(policy, PHASE_A, ShockParams(0.1, 0.6), 0.02, 0.0, 0.05, free_kappa=True)
    assert pi == pytest.approx(closed_form_pi(g, 0.6, 1.7, 0.02, 0.05), abs=1e-12)


def test_kappa_equal_phi_kills_forward_term():
    policy = PolicyParams(1.5, 0.99, 1.5)
    pi = inflation_now(policy, PHASE_A, ShockParams(0.1, 0.5), 0.03, 0.01, 0.2, free_kappa=True)
    assert pi == pytest.approx(-(0.03 - 0.01), abs=1e-15)


def test_kappa_must_be_derived():
    with pytest.raises(DomainError):
        inflation_now(PolicyParams(1.5, 0.99, 0.1), SYM, ShockParams(), 0.0, 0.0, 0.0)


def test_residual_and_truncation():
    policy = PolicyParams.from_map(SYM, 1.5)
    s = ShockParams(0.1, 0.5)
    pi = inflation_now(policy, SYM, s, 0.02, 0.01, 0.03)
    assert abs(inflation_residual(pi, policy, SYM, s, 0.02, 0.01, 0.03)) < 1e-12
    n = default_truncation(1.5)
    assert 1.5 ** (-n) < 1e-14
    longer = inflation_now(policy, SYM, s, 0.02, 0.01, 0.03, truncation=2 * n)
    assert abs(longer - pi) < 1.5 ** (-n) * 0.05
    with pytest.raises(DomainError):
        inflation_now(policy, SYM, s, 0.02, 0.01, 0.03, truncation=5)


def test_crisis_correction_examples():
    fps = fixed_points(SYM)
    assert crisis_inflation_correction(PolicyParams.from_map(SYM, 1.5), fps) == 0.0
    dp = crisis_inflation_correction(PolicyParams.from_map(SYM, 1.5, crisis_prob=0.01), fps)
    assert dp == pytest.approx(-0.03886, abs=1e-5)
    assert dp == -(0.01 / 0.5) * (fps.c_high - fps.c_low) / fps.c_low
    dp2 = crisis_inflation_correction(PolicyParams.from_map(SYM, 1.5, crisis_prob=0.02), fps)
    assert dp2 == pytest.approx(2 * dp, rel=1e-15)
    with pytest.raises(PhaseError):
        crisis_inflation_correction(PolicyParams.from_map(PHASE_A), fixed_points(PHASE_A))


@settings(max_examples=40, deadline=None)
@given(p=st.one_of(st.just(0.0), st.floats(1e-6, 0.5)), phi=st.floats(1.01, 4.0), c0=st.floats(0.85, 1.15))
def test_crisis_correction_non_positive(p, phi, c0):
    m = SYM.replace(c_0=c0)
    dp = crisis_inflation_correction(PolicyParams.from_map(m, phi, crisis_prob=p), fixed_points(m))
    assert dp <= 0.0
    if p > 0:
        assert dp < 0.0


def test_noiseless_path_is_pure_crisis_shift():
    cfg = SimConfig(SYM, ShockParams(0.0, 0.5), steps=200, burn_in=0)
    traj = simulate(cfg)
    policy = PolicyParams.from_map(SYM, 1.5, crisis_prob=0.01)
    path = inflation_path(traj, policy, SYM, cfg.shocks)
    np.testing.assert_allclose(path.pi, path.delta_pi_crisis, atol=1e-14)
    np.testing.assert_allclose(path.r, 1.5 * path.pi - math.log(0.99), atol=1e-14)


def test_path_matches_pointwise_solution_and_shift():
    cfg = SimConfig(SYM, ShockParams(0.02, 0.5, 8), steps=300, burn_in=0)
    traj = simulate(cfg)
    base = inflation_path(traj, PolicyParams.from_map(SYM, 1.5), SYM, cfg.shocks)
    shifted = inflation_path(traj, PolicyParams.from_map(SYM, 1.5, crisis_prob=0.01), SYM, cfg.shocks)
    d = traj.delta
    for t in (1, 100, 299):
        assert base.pi[t - 1] == pytest.approx(
            inflation_now(PolicyParams.from_map(SYM, 1.5), SYM, cfg.shocks, d[t], d[t - 1], traj.xi[t]),
            abs=1e-15)
    np.testing.assert_allclose(shifted.pi - base.pi, shifted.delta_pi_crisis, atol=1e-15)
    assert not base.forward_coefficient_negative


def test_path_outside_high_basin():
    cfg = SimConfig(SYM, ShockParams(0.0, 0.5), steps=20, burn_in=0, initial_c="low")
    with pytest.raises(BasinError):
        inflation_path(simulate(cfg), PolicyParams.from_map(SYM), SYM, cfg.shocks)


def test_negative_forward_coefficient_flag():
    m = SYM.replace(c_0=1.15)
    policy = PolicyParams.from_map(m, phi_taylor=1.2)
    assert policy.forward_coefficient < 0
    cfg = SimConfig(m, ShockParams(0.0, 0.0), steps=10, burn_in=0)
    assert inflation_path(simulate(cfg), policy, m, cfg.shocks).forward_coefficient_negative


@pytest.mark.parametrize("kwargs", [dict(phi_taylor=1.0), dict(beta=1.0), dict(kappa_high=-1.0),
                                    dict(crisis_prob=1.0)])
def test_policy_validation(kwargs):
    base = dict(phi_taylor=1.5, beta=0.99, kappa_high=0.1, crisis_prob=0.0)
    base.update(kwargs)
    with pytest.raises(DomainError):
        PolicyParams(**base)
