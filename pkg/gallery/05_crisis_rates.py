"""
Crisis and recovery rates
=========================

Mean residence times in each basin grow exponentially with 1/sigma^2.
The slope of log T is the effective barrier, which we compare with the
continuous-time (Kramers) prediction.
"""

# %%
from spirits import Direction, MapParams, ShockParams, SimConfig, kramers_slope, measure_barrier, potential

m = MapParams(0.5, 1.5, 1.0, 20.0)
prof = potential(m)
print(f"barriers: high->low {prof.w_high_to_low:.5f}, low->high {prof.w_low_to_high:.5f}")

# %%
cfg = SimConfig(m, ShockParams(0.3, 0.0, 11))
for d in Direction:
    fit, ests = measure_barrier(cfg, d, n_sigma=6, t_range=(1e2, 1e5))
    for e in ests:
        print(f"  {d.value}  sigma={e.sigma:.4f}  T={e.mean_T(d):10.1f}  n={e.n_transitions(d)}")
    w_k = kramers_slope(m, d)
    print(f"{d.value}: fitted slope {fit.w_fit:.4f} (R2 {fit.r_squared:.4f}), "
          f"continuous prediction {w_k:.4f}, ratio {w_k / fit.w_fit:.2f}")
