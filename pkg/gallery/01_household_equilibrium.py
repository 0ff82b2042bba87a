"""
Household equilibrium and the confidence map
=============================================

Consumption as a function of the confidence level ``f`` and productivity
``z``, and the inverse map used to read confidence off observed output.
"""

# %%
import numpy as np

from spirits import FirmParams, Preferences, closed_form_consumption, invert_confidence, solve_equilibrium

prefs, firm = Preferences(), FirmParams()

for f in (4 / 9, 1.0, 2.0):
    eq = solve_equilibrium(prefs, firm, f, z=1.0)
    print(f"f={f:.3f}  c={eq.c:.6f}  n={eq.n:.6f}  u={eq.u:.6f}  closed form {closed_form_consumption(f, 1.0, 1.0):.6f}")

# %%
# With non-unit curvatures there is no closed form; the solver still
# satisfies market clearing and the round trip through invert_confidence.
curvy = Preferences(gamma=1.0, varsigma=0.6, phi=2.0)
for f in np.logspace(-1, 1, 5):
    c = solve_equilibrium(curvy, firm, f, 1.0).c
    print(f"f={f:7.4f}  c={c:.6f}  recovered f={invert_confidence(firm, curvy, c):.6f}")
