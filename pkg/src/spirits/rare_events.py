"""Crisis and recovery rates in the bistable phase.

Two routes to the same quantity:

* the continuous-time (Kramers) prediction built from the potential
  V'(x) = x - H(x), with rate ~ exp(-2 W / (eps sigma^2));
* Monte Carlo residence times of the discrete map, whose logarithm is
  regressed on 1/sigma^2 (Arrhenius law) to measure the barrier.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from . import _kernels
from .dynamics import SimConfig, basin_triggers, resolve_initial
from .errors import DegenerateRootError, FitError, InsufficientTransitions, NumericError, PhaseError
from .feedback import FixedPointSet, MapParams, Phase, fixed_points, h_eval, h_prime
from .shocks import ShockParams, ShockStream, make_generator, mix64

__all__ = [
    "Direction",
    "PotentialProfile",
    "RateEstimate",
    "BarrierFit",
    "BarrierRow",
    "potential",
    "kramers_rate",
    "kramers_slope",
    "residence_times",
    "arrhenius_fit",
    "auto_sigma_grid",
    "rate_scan",
    "measure_barrier",
    "barrier_vs_c0",
]

DEFAULT_N_MIN = 50
BOOTSTRAP_RESAMPLES = 200
DEFAULT_MEMBERS = 8
MAX_STEPS_PER_SIGMA = 10**9


class Direction(str, enum.Enum):
    HIGH_TO_LOW = "high_to_low"
    LOW_TO_HIGH = "low_to_high"

    def __str__(self):
        return self.value


def _require_c(map: MapParams) -> FixedPointSet:
    fps = fixed_points(map)
    if fps.phase is not Phase.C:
        raise PhaseError(f"phase C required (got {fps.phase} at c_0={map.c_0}, theta={map.theta})")
    return fps


def _drift(map: MapParams, x):
    return x - h_eval(map, x)


def _integrate(map: MapParams, a: float, b: float, n: int) -> float:
    """Simpson integral of x - H(x) from a to b on n (forced odd) points."""
    n = n + 1 if n % 2 == 0 else n
    xs = np.linspace(a, b, n)
    return float(simpson(_drift(map, xs), x=xs))


@dataclass
class PotentialProfile:
    x_grid: np.ndarray
    v: np.ndarray
    x_low: float
    x_star: float
    x_high: float
    w_high_to_low: float
    w_low_to_high: float
    map: MapParams

    def barrier(self, direction) -> float:
        direction = Direction(direction)
        return self.w_high_to_low if direction is Direction.HIGH_TO_LOW else self.w_low_to_high

    def value_at(self, x: float, n: int = 100_001) -> float:
        """V(x) with V(x_low) = 0, integrated directly rather than read off the grid."""
        return _integrate(self.map, self.x_low, x, n)


def potential(map: MapParams, x_range=None, n_grid: int = 100_001) -> PotentialProfile:
    """Potential V with V'(x) = x - H(x) and V(x_<) = 0.

    The barriers are integrated between the exact fixed points, so they do
    not depend on where the plotting grid falls.
    """
    fps = _require_c(map)
    xl, xs, xh = fps.x_low, fps.x_star, fps.x_high
    if x_range is None:
        pad = 0.25 * (xh - xl)
        x_range = (xl - pad, xh + pad)
    a, b = map_range = (float(x_range[0]), float(x_range[1]))
    if not (a < xl and b > xh):
        raise ValueError(f"x_range {map_range} must cover [x_<, x_>] = [{xl}, {xh}]")
    grid = np.linspace(a, b, n_grid)
    v = cumulative_simpson(_drift(map, grid), x=grid, initial=0.0)
    v -= _integrate(map, a, xl, n_grid)
    w_hl = _integrate(map, xh, xs, n_grid)
    w_lh = _integrate(map, xl, xs, n_grid)
    return PotentialProfile(x_grid=grid, v=v, x_low=xl, x_star=xs, x_high=xh,
                            w_high_to_low=w_hl, w_low_to_high=w_lh, map=map)


def kramers_rate(map: MapParams, sigma: float, epsilon: float = 1.0,
                 prefactor: str = "slopes", profile: PotentialProfile | None = None):
    """Escape rates (high -> low, low -> high) per step in the small-noise limit.

    rate = A / (2 pi) * exp(-2 W / (eps sigma^2)). With ``prefactor="slopes"``
    A = sqrt(|H'(x_well) H'(x*)|); ``"textbook"`` uses the curvatures of V,
    sqrt(|1 - H'(x_well)| |1 - H'(x*)|).
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0 (got {sigma})")
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1] (got {epsilon})")
    prof = profile if profile is not None else potential(map)
    hp_star = h_prime(map, prof.x_star)
    rates = []
    for x_well, w in ((prof.x_high, prof.w_high_to_low), (prof.x_low, prof.w_low_to_high)):
        hp = h_prime(map, x_well)
        if prefactor == "slopes":
            amp = math.sqrt(abs(hp * hp_star))
        elif prefactor == "textbook":
            amp = math.sqrt(abs(1.0 - hp) * abs(1.0 - hp_star))
        else:
            raise ValueError(f"unknown prefactor {prefactor!r}")
        rates.append(amp / (2.0 * math.pi) * math.exp(-2.0 * w / (epsilon * sigma**2)))
    return tuple(rates)


def kramers_slope(map: MapParams, direction, epsilon: float = 1.0,
                  profile: PotentialProfile | None = None) -> float:
    """Predicted slope of log T against 1/sigma^2, i.e. 2 W / eps."""
    prof = profile if profile is not None else potential(map)
    return 2.0 * prof.barrier(direction) / epsilon


@dataclass
class RateEstimate:
    sigma: float
    mean_T_high_to_low: float
    mean_T_low_to_high: float
    n_high_to_low: int
    n_low_to_high: int
    std_err_logT_high_to_low: float
    std_err_logT_low_to_high: float
    steps: int = 0
    n_min: int = DEFAULT_N_MIN
    target: Direction | None = None
    durations_high: np.ndarray = field(default=None, repr=False)
    durations_low: np.ndarray = field(default=None, repr=False)

    @property
    def admissible(self) -> bool:
        if self.target is not None:
            return self.admissible_for(self.target)
        return min(self.n_high_to_low, self.n_low_to_high) >= self.n_min

    @property
    def directions(self):
        return list(Direction) if self.target is None else [self.target]

    def mean_T(self, direction) -> float:
        d = Direction(direction)
        return self.mean_T_high_to_low if d is Direction.HIGH_TO_LOW else self.mean_T_low_to_high

    def std_err_logT(self, direction) -> float:
        d = Direction(direction)
        return (self.std_err_logT_high_to_low if d is Direction.HIGH_TO_LOW
                else self.std_err_logT_low_to_high)

    def n_transitions(self, direction) -> int:
        d = Direction(direction)
        return self.n_high_to_low if d is Direction.HIGH_TO_LOW else self.n_low_to_high

    def admissible_for(self, direction) -> bool:
        return self.n_transitions(direction) >= self.n_min


class _Member:
    """One ensemble member: its shock stream and hysteresis state."""

    def __init__(self, cfg: SimConfig, index: int, x0: float, triggers, restart=0, x_restart=0.0):
        self.stream = ShockStream(cfg.shocks.child(index))
        self.x = x0
        self.state = _kernels.TRANSIT
        self.entered = 0
        self.seen = 0
        self.t = 0
        self.cfg = cfg
        self.triggers = triggers
        self.restart = restart
        self.x_restart = x_restart
        self.high = []
        self.low = []

    def advance(self, n: int):
        xi = self.stream.next(n)
        m = self.cfg.map
        dh = np.empty(n, dtype=np.int64)
        dl = np.empty(n, dtype=np.int64)
        self.x, self.state, self.entered, self.seen, nh, nl = _kernels.residence_chunk(
            self.x, self.state, self.t, self.entered, self.seen, xi, m.c_min, m.delta,
            m.c_0, m.theta, float(self.cfg.ema_epsilon), self.triggers[0], self.triggers[1],
            dh, dl, self.restart, self.x_restart)
        self.t += n
        if not math.isfinite(self.x):
            raise NumericError("non-finite state in residence-time run")
        self.high.append(dh[:nh].copy())
        self.low.append(dl[:nl].copy())
        return nh, nl


def _bootstrap_se_log_mean(durations: np.ndarray, rng: np.random.Generator) -> float:
    n = durations.size
    if n < 2:
        return math.inf
    d = durations.astype(float)
    means = np.empty(BOOTSTRAP_RESAMPLES)
    for b in range(BOOTSTRAP_RESAMPLES):
        means[b] = d[rng.integers(0, n, n)].mean()
    return float(np.std(np.log(means), ddof=1))


def residence_times(cfg: SimConfig, n_min_transitions: int = DEFAULT_N_MIN,
                    max_steps: int = MAX_STEPS_PER_SIGMA, members: int = DEFAULT_MEMBERS,
                    threads: int = 1, target=None, first_round: int = 1 << 14,
                    max_round: int = 1 << 22, strict: bool = False) -> RateEstimate:
    """Mean residence times in the high and low basins from an ensemble of
    independent trajectories labelled with the hysteresis rule.

    Members advance in rounds of equal length (doubling up to ``max_round``
    steps each) until ``n_min_transitions`` completed residences are
    collected or ``max_steps`` total steps are spent. The round schedule is
    fixed, so ``threads`` only changes wall-clock time, never the result.
    The first and the last (incomplete) residence of each member are dropped.

    ``target`` restricts sampling to one direction: members start in the
    source well and are put back there after every escape. This is how
    strongly asymmetric wells are measured, where round trips would be
    dominated by the slow direction.

    With ``strict=True`` an InsufficientTransitions error carrying the
    estimate is raised when the budget runs out first.
    """
    fps = _require_c(cfg.map)
    triggers = basin_triggers(fps)
    target = None if target is None else Direction(target)
    if target is None:
        x0 = math.log(resolve_initial(cfg, fps))
        restart, x_restart = 0, 0.0
    elif target is Direction.HIGH_TO_LOW:
        x0 = x_restart = fps.x_high
        restart = _kernels.HIGH
    else:
        x0 = x_restart = fps.x_low
        restart = _kernels.LOW
    ens = [_Member(cfg, i, x0, triggers, restart, x_restart) for i in range(members)]

    def collected(n_h, n_l):
        if target is Direction.HIGH_TO_LOW:
            return n_h
        if target is Direction.LOW_TO_HIGH:
            return n_l
        return min(n_h, n_l)

    n_h = n_l = 0
    spent = 0
    step = first_round
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while (collected(n_h, n_l) < n_min_transitions and spent < max_steps
               and cfg.shocks.sigma > 0):
            step = min(step, max(1, (max_steps - spent) // members))
            if pool is None:
                counts = [m.advance(step) for m in ens]
            else:
                counts = list(pool.map(lambda m: m.advance(step), ens))
            n_h += sum(c[0] for c in counts)
            n_l += sum(c[1] for c in counts)
            spent += step * members
            step = min(2 * step, max_round)
    finally:
        if pool is not None:
            pool.shutdown()

    empty = np.empty(0, dtype=np.int64)
    dur_h = np.concatenate([d for m in ens for d in m.high] or [empty])
    dur_l = np.concatenate([d for m in ens for d in m.low] or [empty])
    rng = make_generator(mix64(cfg.shocks.seed, 0xB00757))
    est = RateEstimate(
        sigma=cfg.shocks.sigma,
        mean_T_high_to_low=float(dur_h.mean()) if dur_h.size else math.nan,
        mean_T_low_to_high=float(dur_l.mean()) if dur_l.size else math.nan,
        n_high_to_low=int(dur_h.size),
        n_low_to_high=int(dur_l.size),
        std_err_logT_high_to_low=_bootstrap_se_log_mean(dur_h, rng),
        std_err_logT_low_to_high=_bootstrap_se_log_mean(dur_l, rng),
        steps=spent,
        n_min=n_min_transitions,
        target=target,
        durations_high=dur_h,
        durations_low=dur_l,
    )
    if strict and not est.admissible:
        raise InsufficientTransitions(
            f"only {est.n_high_to_low} high->low and {est.n_low_to_high} low->high "
            f"transitions within {spent} steps (need {n_min_transitions})", est)
    return est


@dataclass(frozen=True)
class BarrierFit:
    direction: Direction
    w_fit: float
    intercept: float
    r_squared: float
    n_points: int


def arrhenius_fit(estimates, direction, min_points: int = 4) -> BarrierFit:
    """Weighted least squares of log mean T on 1/sigma^2 (weights 1/se^2).

    Only admissible estimates enter; they must number at least ``min_points``
    and span a factor 2 in 1/sigma^2. The slope is the measured barrier.
    """
    direction = Direction(direction)
    pts = [e for e in estimates if e.admissible_for(direction) and e.sigma > 0
           and e.mean_T(direction) > 0]
    if len(pts) < min_points:
        raise FitError(f"{len(pts)} admissible points for {direction}; need {min_points}")
    u = np.array([1.0 / e.sigma**2 for e in pts])
    y = np.log([e.mean_T(direction) for e in pts])
    if u.max() < 2.0 * u.min():
        raise FitError("admissible points span less than a factor 2 in 1/sigma^2")
    se = np.array([e.std_err_logT(direction) for e in pts], dtype=float)
    if np.all(np.isfinite(se)) and np.all(se > 0):
        w = 1.0 / se**2
    else:
        w = np.ones_like(u)
    sw = np.sqrt(w)
    A = np.column_stack([np.ones_like(u), u]) * sw[:, None]
    (intercept, slope), *_ = np.linalg.lstsq(A, y * sw, rcond=None)
    ybar = np.sum(w * y) / np.sum(w)
    ss_tot = float(np.sum(w * (y - ybar) ** 2))
    ss_res = float(np.sum(w * (y - intercept - slope * u) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return BarrierFit(direction=direction, w_fit=float(slope), intercept=float(intercept),
                      r_squared=r2, n_points=len(pts))


def _pilot(cfg, u, target, n, members, threads):
    shocks = cfg.shocks.with_sigma(1.0 / math.sqrt(u))
    return residence_times(replace(cfg, shocks=shocks), n_min_transitions=n, members=members,
                           threads=threads, target=target, max_steps=10**8)


def _line(u, ests, d):
    y = np.log([e.mean_T(d) for e in ests])
    slope = (y[1] - y[0]) / (u[1] - u[0])
    if not slope > 0:
        raise FitError(f"pilot runs show no Arrhenius growth for {d}")
    return y[0] - slope * u[0], slope


def auto_sigma_grid(cfg: SimConfig, n_sigma: int = 6, t_range=(1e2, 1e6), target=None,
                    pilot_transitions: int = 200, members: int = DEFAULT_MEMBERS,
                    threads: int = 1) -> np.ndarray:
    """Noise levels (descending) whose mean residence times cover ``t_range``.

    Two pilot runs at large noise, placed with the Kramers barrier, give a
    provisional Arrhenius line; a third pilot where that line predicts the
    geometric middle of ``t_range`` sharpens it. The grid is uniform in
    1/sigma^2 between the crossings of the line with the ends of
    ``t_range``. Without ``target`` the grid is shared: it runs from where
    the faster direction reaches ``t_range[0]`` to where the slower one
    reaches ``t_range[1]``.
    """
    target = None if target is None else Direction(target)
    dirs = list(Direction) if target is None else [target]
    prof = potential(cfg.map)
    w_small = min(prof.barrier(d) for d in dirs)
    u = [math.log(t) / (2.0 * w_small) for t in (10.0, 100.0)]
    for _ in range(6):
        ests = [_pilot(cfg, ui, target, pilot_transitions, members, threads) for ui in u]
        ts = [e.mean_T(d) for e in ests for d in dirs]
        if all(e.admissible for e in ests) and min(ts) >= 5.0:
            break
        u = [2.0 * ui for ui in u] if min(ts) < 5.0 else [0.5 * ui for ui in u]
    else:
        raise FitError("could not place pilot runs for the sigma grid")

    log_mid = 0.5 * (math.log(t_range[0]) + math.log(t_range[1]))
    lines = [_line(u, ests, d) for d in dirs]
    # sharpen with the slowest direction at the middle of the range
    u_mid = min((log_mid - a) / b for a, b in lines)
    if u_mid > u[1]:
        mid = _pilot(cfg, u_mid, target, max(pilot_transitions // 4, 20), members, threads)
        if mid.admissible:
            u, ests = [u[0], u_mid], [ests[0], mid]
            lines = [_line(u, ests, d) for d in dirs]
    lo = max((math.log(t_range[0]) - a) / b for a, b in lines)
    hi = min((math.log(t_range[1]) - a) / b for a, b in lines)
    if hi <= lo:
        lo = min((math.log(t_range[0]) - a) / b for a, b in lines)
    grid = np.linspace(max(lo, 1e-12), hi, n_sigma)
    return 1.0 / np.sqrt(grid)


def rate_scan(cfg: SimConfig, sigmas, n_min_transitions: int = DEFAULT_N_MIN,
              max_steps: int = MAX_STEPS_PER_SIGMA, members: int = DEFAULT_MEMBERS,
              threads: int = 1, target=None) -> list[RateEstimate]:
    """Residence-time estimates for every sigma, each from its own seed."""
    out = []
    for i, s in enumerate(sigmas):
        shocks = ShockParams(float(s), cfg.shocks.eta, mix64(cfg.shocks.seed, 1000 + i))
        out.append(residence_times(replace(cfg, shocks=shocks), n_min_transitions,
                                   max_steps, members, threads, target=target))
    return out


def measure_barrier(cfg: SimConfig, direction, sigmas=None, n_sigma: int = 6,
                    t_range=(1e2, 1e6), n_min_transitions: int = DEFAULT_N_MIN,
                    max_steps: int = MAX_STEPS_PER_SIGMA, members: int = DEFAULT_MEMBERS,
                    threads: int = 1):
    """Full pipeline for one direction: sigma grid, targeted residence-time
    runs and the Arrhenius fit. Returns (fit, estimates)."""
    direction = Direction(direction)
    if sigmas is None:
        sigmas = auto_sigma_grid(cfg, n_sigma=n_sigma, t_range=t_range, target=direction,
                                 members=members, threads=threads)
    ests = rate_scan(cfg, sigmas, n_min_transitions, max_steps, members, threads,
                     target=direction)
    return arrhenius_fit(ests, direction), ests


@dataclass
class BarrierRow:
    c_0: float
    phase: str
    w_fit_high_to_low: float = math.nan
    w_fit_low_to_high: float = math.nan
    w_kramers_high_to_low: float = math.nan
    w_kramers_low_to_high: float = math.nan
    skipped: bool = False


def barrier_vs_c0(cfg: SimConfig, c0_values, n_sigma: int = 6, t_range=(1e2, 1e6),
                  n_min_transitions: int = DEFAULT_N_MIN, max_steps: int = MAX_STEPS_PER_SIGMA,
                  members: int = DEFAULT_MEMBERS, threads: int = 1) -> list[BarrierRow]:
    """Measured and Kramers barriers as a function of the confidence threshold.

    Nodes outside phase C are flagged ``skipped``. The Kramers columns hold
    the predicted slope 2 W / eps; a direction whose fit fails is left NaN.
    """
    rows = []
    for c0 in c0_values:
        m = cfg.map.replace(c_0=float(c0))
        try:
            phase = fixed_points(m).phase.value
        except DegenerateRootError:
            phase = "boundary"
        if phase != Phase.C.value:
            rows.append(BarrierRow(c_0=float(c0), phase=phase, skipped=True))
            continue
        sub = replace(cfg, map=m)
        prof = potential(m)
        row = BarrierRow(c_0=float(c0), phase=phase,
                         w_kramers_high_to_low=kramers_slope(m, "high_to_low", sub.ema_epsilon, prof),
                         w_kramers_low_to_high=kramers_slope(m, "low_to_high", sub.ema_epsilon, prof))
        for d in Direction:
            try:
                fit, _ = measure_barrier(sub, d, n_sigma=n_sigma, t_range=t_range,
                                         n_min_transitions=n_min_transitions,
                                         max_steps=max_steps, members=members, threads=threads)
            except FitError:
                continue
            setattr(row, f"w_fit_{d.value}", fit.w_fit)
        rows.append(row)
    return rows
