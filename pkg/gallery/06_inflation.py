"""
Inflation near the high state
=============================

Inflation and the policy rate along a quiet trajectory, plus the constant
downward shift that anticipated crises impose.
"""

# %%
import numpy as np

from spirits import (
    MapParams,
    PolicyParams,
    ShockParams,
    SimConfig,
    crisis_inflation_correction,
    fixed_points,
    inflation_path,
    simulate,
)

m = MapParams(0.5, 1.5, 1.0, 5.0)
shocks = ShockParams(0.02, 0.5, 4)
traj = simulate(SimConfig(m, shocks, steps=5000, burn_in=0), classify=False)

for p in (0.0, 0.005, 0.01):
    policy = PolicyParams.from_map(m, phi_taylor=1.5, crisis_prob=p)
    path = inflation_path(traj, policy, m, shocks)
    print(f"p={p:.3f}: mean pi {path.mean_pi:+.5f}, std pi {np.std(path.pi):.5f}, "
          f"mean r {np.mean(path.r):+.5f}, shift {path.delta_pi_crisis:+.5f}")

# %%
fps = fixed_points(m)
for phi in (1.2, 1.5, 2.0, 3.0):
    dp = crisis_inflation_correction(PolicyParams.from_map(m, phi, crisis_prob=0.01), fps)
    print(f"phi={phi}: crisis shift {dp:+.5f}")
