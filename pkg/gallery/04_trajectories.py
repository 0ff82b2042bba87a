"""
Trajectories, histograms and excess volatility
==============================================

Simulate the log-output map in each phase and summarise where the
economy spends its time.
"""

# %%
from spirits import MapParams, ShockParams, SimConfig, histogram_modes, simulate

for c0 in (0.1, 0.55, 0.75, 1.05):
    traj = simulate(SimConfig(MapParams(0.4, 1.4, c0, 5.0), ShockParams(0.6, 0.5, 1), steps=500_000))
    st = traj.stats
    modes = histogram_modes(st["hist_edges"], st["hist_density"])
    occ = ""
    if "occupancy_high" in st:
        occ = f" high/low occupancy {st['occupancy_high']:.2f}/{st['occupancy_low']:.2f}"
    print(f"c_0={c0}: phase {traj.fixed.phase.value}, mean x {st['mean_x']:.3f}, modes at {modes.round(2)}{occ}")

# %%
# Halving the noise separates the two wells in phase C.
traj = simulate(SimConfig(MapParams(0.4, 1.4, 0.75, 5.0), ShockParams(0.3, 0.5, 1), steps=2_000_000))
print("sigma=0.3 modes:", histogram_modes(traj.stats["hist_edges"], traj.stats["hist_density"]).round(2),
      "stable roots at", round(traj.fixed.x_low, 2), round(traj.fixed.x_high, 2))

# %%
# Feedback amplifies small shocks around the high state.
cfg = SimConfig(MapParams(0.5, 1.5, 0.8, 1.5), ShockParams(0.05, 0.5, 3), steps=1_000_000)
st = simulate(cfg).stats
print(f"Var(delta) simulated {st['var_delta']:.3e}, predicted {st['var_delta_predicted']:.3e}, "
      f"sigma^2 {0.05 ** 2:.3e}")
