import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import kurtosis

from spirits import (
    DomainError,
    MapParams,
    PhaseError,
    ShockParams,
    SimConfig,
    Trajectory,
    classify_basins,
    fixed_points,
    gap_variance_prediction,
    g_prime,
    h_eval,
    histogram,
    histogram_modes,
    simulate,
)
from spirits.dynamics import _gap_variance, basin_triggers

BASELINE = MapParams(0.4, 1.4, 0.75, 5.0)
PHASE_A = MapParams(0.5, 1.5, 0.8, 1.5)


def test_noiseless_fixed_point_is_constant():
    traj = simulate(SimConfig(BASELINE, ShockParams(0.0, 0.5, 1), steps=500, burn_in=0))
    np.testing.assert_allclose(traj.x, math.log(fixed_points(BASELINE).c_high), rtol=0, atol=1e-14)
    assert set(traj.basin_labels()) == {"high"}


def test_map_iteration_is_bit_exact():
    cfg = SimConfig(BASELINE, ShockParams(0.6, 0.5, 3), steps=2000, burn_in=0)
    traj = simulate(cfg)
    x = [traj.x[0]]
    for t in range(1, cfg.steps):
        c = math.exp(x[-1])
        g = BASELINE.c_min + BASELINE.delta / (1.0 + math.exp(2.0 * BASELINE.theta * (BASELINE.c_0 - c)))
        x.append(math.log(g) + traj.xi[t])
    assert np.array_equal(traj.x, np.array(x))


def test_ema_update():
    cfg = SimConfig(BASELINE, ShockParams(0.2, 0.0, 3), steps=300, burn_in=0, ema_epsilon=0.1)
    traj = simulate(cfg)
    for t in (1, 50, 299):
        prev = traj.x[t - 1]
        assert traj.x[t] == pytest.approx(prev + 0.1 * (h_eval(BASELINE, prev) - prev + traj.xi[t]),
                                          rel=1e-14, abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32), c0=st.floats(0.0, 1.5), sigma=st.floats(0.0, 1.0))
def test_bounded_by_shock_range(seed, c0, sigma):
    m = BASELINE.replace(c_0=c0)
    traj = simulate(SimConfig(m, ShockParams(sigma, 0.5, seed), steps=400, burn_in=0,
                              initial_c=1.0), classify=False)
    x, xi = traj.x[1:], traj.xi[1:]
    assert np.all(x >= math.log(m.c_min) + xi.min() - 1e-12)
    assert np.all(x <= math.log(m.c_max) + xi.max() + 1e-12)


def test_stats_are_normalised():
    traj = simulate(SimConfig(BASELINE, ShockParams(0.6, 0.5, 9), steps=50_000))
    s = traj.stats
    assert np.sum(s["hist_density"] * np.diff(s["hist_edges"])) == pytest.approx(1.0, abs=1e-12)
    assert s["occupancy_high"] + s["occupancy_low"] + s["occupancy_transit"] == pytest.approx(1.0)
    assert len(s["hist_density"]) == 200


def test_histogram_padding():
    x = np.linspace(0.0, 1.0, 1001)
    edges, dens = histogram(x, bins=200)
    width = edges[1] - edges[0]
    assert edges[0] == pytest.approx(-3 * width) and edges[-1] == pytest.approx(1 + 3 * width)


def test_gap_variance_examples():
    assert _gap_variance(0.0, 0.3, 0.5) == pytest.approx(0.09, rel=1e-15)
    assert _gap_variance(0.5, 1.0, 0.0) == pytest.approx(1.0 / 0.75, rel=1e-15)
    with pytest.raises(DomainError):
        _gap_variance(1.0, 0.1, 0.0)


@settings(max_examples=100)
@given(g=st.floats(1e-6, 0.999), eta=st.floats(0.0, 0.99), sigma=st.floats(1e-3, 2.0))
def test_excess_volatility(g, eta, sigma):
    assert _gap_variance(g, sigma, eta) > sigma**2


def test_gap_variance_matches_simulation_in_phase_a():
    cfg = SimConfig(PHASE_A, ShockParams(0.05, 0.5, 2024), steps=1_010_000, burn_in=10_000)
    traj = simulate(cfg)
    assert fixed_points(PHASE_A).phase.value == "A"
    pred = gap_variance_prediction(PHASE_A, cfg.shocks)
    assert traj.stats["var_delta"] == pytest.approx(pred, rel=0.05)
    assert abs(kurtosis(traj.x[cfg.burn_in:])) < 0.2


def test_constant_high_path_labels():
    fps = fixed_points(BASELINE)
    traj = Trajectory(x=np.full(20, fps.x_high), xi=np.zeros(20))
    classify_basins(traj, fps)
    assert traj.basin_labels() == ["high"] * 20


def test_monotone_descent_switches_once():
    fps = fixed_points(BASELINE)
    x = np.linspace(fps.x_high, fps.x_low, 101)
    traj = classify_basins(Trajectory(x=x, xi=np.zeros_like(x)), fps)
    switches = np.count_nonzero(np.diff(traj.basin.astype(int)) != 0)
    assert switches == 1
    assert traj.basin[0] == 1 and traj.basin[-1] == -1


def test_chatter_at_saddle_does_not_add_transitions():
    fps = fixed_points(BASELINE)
    lo, hi = basin_triggers(fps)
    rng = np.random.default_rng(0)
    base = np.concatenate([np.full(10, fps.x_high), np.full(10, fps.x_low)])
    chatter = fps.x_star + rng.uniform(-1, 1, 50) * 0.9 * min(hi - fps.x_star, fps.x_star - lo)
    noisy = np.concatenate([base[:10], chatter, base[10:]])
    labels = classify_basins(Trajectory(x=noisy, xi=np.zeros_like(noisy)), fps).basin
    assert np.count_nonzero(np.diff(labels.astype(int)) != 0) == 1


def test_baseline_phase_a_histogram_unimodal():
    cfg = SimConfig(BASELINE.replace(c_0=0.1), ShockParams(0.6, 0.5, 1), steps=400_000)
    s = simulate(cfg).stats
    assert len(histogram_modes(s["hist_edges"], s["hist_density"])) == 1


def test_baseline_phase_c_occupancy_ordering():
    hi = simulate(SimConfig(BASELINE, ShockParams(0.6, 0.5, 1), steps=400_000)).stats
    lo = simulate(SimConfig(BASELINE.replace(c_0=1.05), ShockParams(0.6, 0.5, 1), steps=400_000)).stats
    assert hi["occupancy_high"] > hi["occupancy_low"]
    assert lo["occupancy_low"] > lo["occupancy_high"]


def test_bimodal_at_moderate_noise():
    # at sigma = 0.3 the two wells are resolved; modes sit near the stable roots
    fps = fixed_points(BASELINE)
    s = simulate(SimConfig(BASELINE, ShockParams(0.3, 0.5, 1), steps=4_000_000)).stats
    modes = histogram_modes(s["hist_edges"], s["hist_density"])
    assert len(modes) == 2
    assert modes[0] == pytest.approx(fps.x_low, abs=0.1)
    assert modes[1] == pytest.approx(fps.x_high, abs=0.1)
    assert s["occupancy_high"] > s["occupancy_low"]


def test_simulation_reproducible():
    cfg = SimConfig(BASELINE, ShockParams(0.6, 0.5, 77), steps=10_000, burn_in=100)
    assert np.array_equal(simulate(cfg).x, simulate(cfg).x)


def test_config_errors():
    with pytest.raises(DomainError):
        SimConfig(steps=10, burn_in=10)
    with pytest.raises(DomainError):
        SimConfig(initial_c=-1.0)
    with pytest.raises(PhaseError):
        simulate(SimConfig(BASELINE.replace(c_0=0.1), initial_c="low", steps=10, burn_in=0))


def test_delta_uses_noiseless_root():
    cfg = SimConfig(PHASE_A, ShockParams(0.05, 0.5, 1), steps=1000, burn_in=0)
    traj = simulate(cfg)
    c_high = fixed_points(PHASE_A).c_high
    np.testing.assert_allclose(traj.delta, np.exp(traj.x) / c_high - 1.0)
    assert g_prime(PHASE_A, c_high) > 0
