"""Simulation of the consumption map with technology shocks.

In log output x = log c the map reads x_t = H(x_{t-1}) + xi_t. With
``ema_epsilon < 1`` the state is an exponential moving average updated as
x_t = x_{t-1} + eps (H(x_{t-1}) - x_{t-1} + xi_t), whose eps -> 0 limit is a
Langevin equation in the potential V'(x) = x - H(x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter1d
from scipy.signal import find_peaks

from . import _kernels
from .errors import DegenerateRootError, DomainError, NumericOverflow, PhaseError
from .feedback import FixedPointSet, MapParams, Phase, fixed_points, g_prime
from .shocks import ShockParams, ShockStream

__all__ = [
    "SimConfig",
    "Trajectory",
    "BASIN_NAMES",
    "simulate",
    "resolve_initial",
    "gap_variance_prediction",
    "classify_basins",
    "basin_triggers",
    "histogram",
    "histogram_modes",
]

DEFAULT_BURN_IN = 10_000
HIST_BINS = 200
BASIN_NAMES = {_kernels.TRANSIT: "transit", _kernels.HIGH: "high", _kernels.LOW: "low"}


@dataclass(frozen=True)
class SimConfig:
    map: MapParams = field(default_factory=MapParams)
    shocks: ShockParams = field(default_factory=ShockParams)
    steps: int = 100_000
    burn_in: int = DEFAULT_BURN_IN
    initial_c: object = "high"  # positive float, "high" or "low"
    ema_epsilon: float = 1.0

    def __post_init__(self):
        errs = []
        if not self.steps > 0:
            errs.append(f"steps must be > 0 (got {self.steps})")
        if not 0 <= self.burn_in < self.steps:
            errs.append(f"burn_in must lie in [0, steps) (got {self.burn_in})")
        if not 0 < self.ema_epsilon <= 1:
            errs.append(f"ema_epsilon must lie in (0, 1] (got {self.ema_epsilon})")
        if isinstance(self.initial_c, str):
            if self.initial_c not in ("high", "low"):
                errs.append(f"initial_c must be a positive number, 'high' or 'low' (got {self.initial_c!r})")
        elif not self.initial_c > 0:
            errs.append(f"initial_c must be > 0 (got {self.initial_c})")
        if errs:
            raise DomainError("; ".join(errs))


@dataclass
class Trajectory:
    x: np.ndarray
    xi: np.ndarray
    burn_in: int = 0
    fixed: FixedPointSet | None = None
    basin: np.ndarray | None = None  # int8 codes, see BASIN_NAMES
    stats: dict = field(default_factory=dict)

    @property
    def c(self) -> np.ndarray:
        return np.exp(self.x)

    @property
    def delta(self) -> np.ndarray | None:
        """Output gap (c_t - c_>) / c_> relative to the noiseless high root."""
        if self.fixed is None or self.fixed.c_high is None:
            return None
        return self.c / self.fixed.c_high - 1.0

    def basin_labels(self) -> list[str]:
        if self.basin is None:
            raise ValueError("basins have not been classified")
        return [BASIN_NAMES[int(b)] for b in self.basin]


def resolve_initial(cfg: SimConfig, fps: FixedPointSet | None = None) -> float:
    if not isinstance(cfg.initial_c, str):
        return float(cfg.initial_c)
    if fps is None:
        fps = fixed_points(cfg.map)
    value = fps.c_high if cfg.initial_c == "high" else fps.c_low
    if value is None:
        raise PhaseError(f"no {cfg.initial_c} fixed point in phase {fps.phase}")
    return value


def histogram(x: np.ndarray, bins: int = HIST_BINS):
    """Density histogram on ``bins`` uniform bins spanning the observed
    range padded by three bin widths on either side."""
    lo, hi = float(np.min(x)), float(np.max(x))
    scale = max(abs(lo), 1.0)
    if hi - lo < 1e-9 * scale:
        # (numerically) constant data: one occupied bin of width scale * 1e-6
        width = scale * 1e-6
    else:
        width = (hi - lo) / (bins - 6)
    edges = lo - 3 * width + width * np.arange(bins + 1)
    counts, edges = np.histogram(x, bins=edges)
    density = counts / (counts.sum() * np.diff(edges))
    return edges, density


def histogram_modes(edges: np.ndarray, density: np.ndarray, smooth_bins: float = 2.0,
                    rel_prominence: float = 0.05) -> np.ndarray:
    """Locations (bin centres) of the local maxima of a density histogram.

    The density is smoothed with a Gaussian kernel of ``smooth_bins`` bins so
    that sampling noise does not create spurious peaks; a peak counts only if
    its prominence exceeds ``rel_prominence`` times the highest density.
    """
    d = gaussian_filter1d(np.asarray(density, dtype=float), smooth_bins) if smooth_bins > 0 else density
    peaks, _ = find_peaks(np.concatenate([[0.0], d, [0.0]]), prominence=rel_prominence * d.max())
    centres = 0.5 * (edges[:-1] + edges[1:])
    return centres[peaks - 1]


def simulate(cfg: SimConfig, classify: bool = True) -> Trajectory:
    """Run one trajectory of ``cfg.steps`` points (x[0] is the initial state).

    Statistics exclude the first ``burn_in`` points. In phase C the
    trajectory is also labelled with :func:`classify_basins`.
    """
    try:
        fps = fixed_points(cfg.map)
    except DegenerateRootError:
        fps = None
    c_init = resolve_initial(cfg, fps)
    xi = ShockStream(cfg.shocks).next(cfg.steps)
    m = cfg.map
    x = _kernels.iterate_map(math.log(c_init), xi, m.c_min, m.delta, m.c_0, m.theta,
                             float(cfg.ema_epsilon))
    if not np.all(np.abs(x) <= 700.0):
        raise NumericOverflow("log output left [-700, 700]")
    traj = Trajectory(x=x, xi=xi, burn_in=cfg.burn_in, fixed=fps)
    if classify and fps is not None and fps.phase is Phase.C:
        classify_basins(traj, fps)
    _fill_stats(traj, cfg)
    return traj


def _fill_stats(traj: Trajectory, cfg: SimConfig):
    xs = traj.x[traj.burn_in:]
    edges, density = histogram(xs)
    stats = {"mean_x": float(np.mean(xs)), "hist_edges": edges, "hist_density": density}
    delta = traj.delta
    if delta is not None:
        stats["var_delta"] = float(np.var(delta[traj.burn_in:]))
        try:
            stats["var_delta_predicted"] = gap_variance_prediction(cfg.map, cfg.shocks, traj.fixed)
        except DomainError:
            stats["var_delta_predicted"] = None
    if traj.basin is not None:
        b = traj.basin[traj.burn_in:]
        n = b.size
        stats["occupancy_high"] = float(np.count_nonzero(b == _kernels.HIGH) / n)
        stats["occupancy_low"] = float(np.count_nonzero(b == _kernels.LOW) / n)
        stats["occupancy_transit"] = float(np.count_nonzero(b == _kernels.TRANSIT) / n)
    traj.stats = stats


def gap_variance_prediction(map: MapParams, shocks: ShockParams,
                            fps: FixedPointSet | None = None) -> float:
    """Linear-response variance of the output gap around c_>:

    sigma^2 / (1 - g^2) * (1 + eta g) / (1 - eta g),   g = G'(c_>).
    """
    if fps is None:
        fps = fixed_points(map)
    if fps.c_high is None:
        raise DomainError(f"no high fixed point in phase {fps.phase}")
    g = g_prime(map, fps.c_high)
    return _gap_variance(g, shocks.sigma, shocks.eta)


def _gap_variance(g: float, sigma: float, eta: float) -> float:
    if abs(g) >= 1.0:
        raise DomainError(f"|G'(c_>)| = {abs(g):.6g} >= 1: linearisation unstable")
    return sigma**2 / (1.0 - g**2) * (1.0 + eta * g) / (1.0 - eta * g)


def basin_triggers(fps: FixedPointSet) -> tuple[float, float]:
    """Hysteresis thresholds in x: ((x_< + x*)/2, (x* + x_>)/2)."""
    if fps.phase is not Phase.C:
        raise PhaseError(f"basin labelling needs phase C (got {fps.phase})")
    return 0.5 * (fps.x_low + fps.x_star), 0.5 * (fps.x_star + fps.x_high)


def classify_basins(traj: Trajectory, fps: FixedPointSet) -> Trajectory:
    """Hysteresis labelling: a point becomes ``high`` on entering
    x >= (x* + x_>)/2, ``low`` on entering x <= (x_< + x*)/2, and keeps its
    label otherwise (``transit`` before the first commitment)."""
    lo, hi = basin_triggers(fps)
    traj.basin = _kernels.hysteresis_labels(np.ascontiguousarray(traj.x, dtype=float), lo, hi)
    traj.fixed = fps
    return traj
