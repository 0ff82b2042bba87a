"""
Fixed points and phases of the feedback map
===========================================

Sweep the confidence threshold at fixed steepness and watch the economy
move from a single robust high state, through bistability, to a single
low state.
"""

# %%
import numpy as np

from spirits import MapParams, boundary_hyperbola, boundary_tangency, fixed_points, phase_diagram_scan

base = MapParams(c_min=0.4, c_max=1.4, theta=5.0)
for c0 in (0.1, 0.55, 0.75, 1.05, 1.3):
    fps = fixed_points(base.replace(c_0=c0))
    roots = ", ".join(f"{r.value:.4f}{'' if r.stable else '(u)'}" for r in fps.roots)
    print(f"c_0={c0:4.2f}  phase {fps.phase.value:2s}  roots {roots}")

# %%
# Closed-form boundaries at theta = 5.
lo, hi = boundary_tangency(base, 5.0)
print(f"phase C for {lo:.4f} < c_0 < {hi:.4f}; A/B+ hyperbola at c_0 = {boundary_hyperbola(base, 5.0):.4f}")

# %%
# A coarse phase diagram printed as text, theta increasing downwards.
c0 = np.linspace(0.0, 1.6, 48)
theta = np.linspace(1.0, 10.0, 12)
diag = phase_diagram_scan(base, c0, theta)
glyph = {"A": ".", "B+": "+", "C": "#", "B-": "-", "boundary": "|"}
for th, row in zip(theta, diag.phase):
    print(f"theta={th:5.2f} " + "".join(glyph[p] for p in row))
