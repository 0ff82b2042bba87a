"""
Reproducible runs from the command line
=======================================

Every ``spirits`` command writes its outputs together with a manifest that
can be replayed to check the artifact hashes.
"""

# %%
import json
import subprocess
import sys
import tempfile
from pathlib import Path

out = Path(tempfile.mkdtemp())


def spirits(*args):
    res = subprocess.run([sys.executable, "-m", "spirits", *args], capture_output=True, text=True)
    print("$ spirits", " ".join(args), "->", res.returncode)
    print(res.stdout + res.stderr)
    return res.returncode


spirits("fixed-points", "--theta=7", "--out", str(out / "fp"))
print((out / "fp" / "fixed_points.json").read_text())

# %%
spirits("simulate", "--map.c_0=1.05", "--sim.steps=50000", "--seed=3", "--out", str(out / "sim"))
print(json.loads((out / "sim" / "stats.json").read_text()))
spirits("replay", str(out / "sim" / "manifest.json"), "--out", str(out / "sim2"))

# %%
# Invalid settings are all reported at once, with exit code 2.
spirits("simulate", "--shocks.sigma=-1", "--map.theta=0", "--out", str(out / "bad"))
