"""Confidence feedback map G (shifted logistic), its log-space form H,
fixed points, stability and phase classification.

The consumption dynamics at zero shock are c_t = G(c_{t-1}); in log output
x = log c they read x_t = H(x_{t-1}) with H(x) = log G(e^x).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.special import expit

from .errors import DegenerateRootError, DomainError

__all__ = [
    "MapParams",
    "Phase",
    "Root",
    "FixedPointSet",
    "PhaseDiagram",
    "g_eval",
    "g_prime",
    "h_eval",
    "h_prime",
    "max_h_prime",
    "fixed_points",
    "boundary_hyperbola",
    "boundary_tangency",
    "boundary_exact_a",
    "phase_diagram_scan",
    "BOUNDARY_LABEL",
]

SCAN_POINTS = 10_000
ROOT_XTOL = 1e-14
TANGENCY_TOL = 1e-12
BOUNDARY_LABEL = "boundary"


@dataclass(frozen=True)
class MapParams:
    """Shifted-logistic feedback G(c) = c_min + delta / (1 + exp(2 theta (c_0 - c))).

    ``c_0`` may be any finite real; negative values reach the no-feedback
    limit theta * c_0 -> -inf.
    """

    c_min: float = 0.4
    c_max: float = 1.4
    c_0: float = 0.75
    theta: float = 5.0

    def __post_init__(self):
        errs = []
        if not self.c_min > 0:
            errs.append(f"c_min must be > 0 (got {self.c_min})")
        if not self.c_max > self.c_min:
            errs.append(f"c_max must exceed c_min (got c_min={self.c_min}, c_max={self.c_max})")
        if not self.theta > 0:
            errs.append(f"theta must be > 0 (got {self.theta})")
        if not math.isfinite(self.c_0):
            errs.append(f"c_0 must be finite (got {self.c_0})")
        if errs:
            raise DomainError("; ".join(errs))

    @property
    def delta(self) -> float:
        return self.c_max - self.c_min

    def replace(self, **changes) -> "MapParams":
        values = {k: getattr(self, k) for k in ("c_min", "c_max", "c_0", "theta")}
        values.update(changes)
        return MapParams(**values)


class Phase(str, enum.Enum):
    A = "A"
    B_PLUS = "B+"
    C = "C"
    B_MINUS = "B-"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Root:
    value: float
    slope: float
    stable: bool


@dataclass(frozen=True)
class FixedPointSet:
    roots: tuple
    phase: Phase
    max_h_prime: float = math.nan
    c_low: float | None = None
    c_star: float | None = None
    c_high: float | None = None

    @property
    def distance_ratio(self) -> float | None:
        """(c_high - c_star) / (c_star - c_low), defined in phase C only."""
        if self.phase is not Phase.C:
            return None
        return (self.c_high - self.c_star) / (self.c_star - self.c_low)

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.roots])

    @property
    def x_low(self):
        return None if self.c_low is None else math.log(self.c_low)

    @property
    def x_star(self):
        return None if self.c_star is None else math.log(self.c_star)

    @property
    def x_high(self):
        return None if self.c_high is None else math.log(self.c_high)


def _expit(a: float) -> float:
    if a >= 0:
        return 1.0 / (1.0 + math.exp(-a))
    e = math.exp(a)
    return e / (1.0 + e)


def _logistic_parts(p: MapParams, c):
    if isinstance(c, (float, int)):
        arg = 2.0 * p.theta * (c - p.c_0)
        return _expit(arg), _expit(-arg)
    arg = 2.0 * p.theta * (np.asarray(c, dtype=float) - p.c_0)
    return expit(arg), expit(-arg)


def g_eval(p: MapParams, c):
    """G(c); saturates cleanly to c_min / c_max for extreme arguments."""
    s, _ = _logistic_parts(p, c)
    out = p.c_min + p.delta * s
    return float(out) if np.ndim(out) == 0 else out


def g_prime(p: MapParams, c):
    """G'(c) = 2 theta (G - c_min)(c_max - G) / delta."""
    s, s_bar = _logistic_parts(p, c)
    out = 2.0 * p.theta * p.delta * s * s_bar
    return float(out) if np.ndim(out) == 0 else out


def h_eval(p: MapParams, x):
    """H(x) = log G(e^x)."""
    out = np.log(g_eval(p, np.exp(x)))
    return float(out) if np.ndim(out) == 0 else out


def h_prime(p: MapParams, x):
    """H'(x) = e^x G'(e^x) / G(e^x); always positive."""
    c = np.exp(x)
    out = c * g_prime(p, c) / g_eval(p, c)
    return float(out) if np.ndim(out) == 0 else out


def max_h_prime(p: MapParams) -> float:
    """Supremum of H' over the real line.

    Phase A requires this to be < 1: then e^xi G(c) = c has a single
    solution for every shock xi.
    """
    c_hi = max(p.c_0, p.c_max) + 40.0 / p.theta
    cs = np.linspace(0.0, c_hi, 1001)[1:]
    vals = cs * g_prime(p, cs) / g_eval(p, cs)
    i = int(np.argmax(vals))
    a = cs[max(i - 1, 0)] if i > 0 else cs[0] * 1e-6
    b = cs[min(i + 1, len(cs) - 1)]
    res = minimize_scalar(lambda c: -c * g_prime(p, c) / g_eval(p, c), bounds=(a, b),
                          method="bounded", options={"xatol": 1e-12})
    return float(max(vals[i], -res.fun))


def _critical_points(p: MapParams):
    """Points where G'(c) = 1 (local extrema of G(c) - c); empty if theta*delta <= 2."""
    td = p.theta * p.delta
    if td <= 2.0:
        return []
    s = math.sqrt(p.delta**2 / 4.0 - p.delta / (2.0 * p.theta))
    m = 0.5 * (p.c_min + p.c_max)
    out = []
    for g in (m - s, m + s):
        out.append(p.c_0 - math.log((p.c_max - g) / (g - p.c_min)) / (2.0 * p.theta))
    return out


def fixed_points(p: MapParams, scan_points: int = SCAN_POINTS) -> FixedPointSet:
    """All solutions of G(c) = c, their stability and the phase.

    Roots are bracketed by a sign-change scan of G(c) - c on a uniform grid
    over [c_min, c_max] (augmented with the analytic extrema of G(c) - c so
    that nearby root pairs are never lost inside one cell) and polished
    with Brent's method.

    Raises DegenerateRootError when G(c) - c touches zero tangentially.
    """
    lo = p.c_min * (1.0 - 1e-9)
    hi = p.c_max * (1.0 + 1e-9)
    crit = [c for c in _critical_points(p) if lo < c < hi]
    grid = np.linspace(lo, hi, scan_points)
    if crit:
        grid = np.insert(grid, np.searchsorted(grid, crit), crit)
    d = g_eval(p, grid) - grid

    def resid(c):
        return g_eval(p, c) - c

    for c in crit:
        if abs(resid(c)) <= TANGENCY_TOL * max(1.0, c):
            roots = _collect_roots(p, grid, d, resid)
            merged = sorted([r for r in roots if abs(r - c) > 1e-6] + [c])
            raise DegenerateRootError(
                f"tangent fixed point at c={c:.12g} (theta={p.theta}, c_0={p.c_0})", merged
            )

    values = _collect_roots(p, grid, d, resid)
    roots = tuple(
        Root(value=v, slope=g_prime(p, v), stable=abs(g_prime(p, v)) < 1.0) for v in values
    )
    if len(roots) == 3:
        if not (roots[0].stable and not roots[1].stable and roots[2].stable):
            raise DegenerateRootError("three roots with unexpected stability pattern", values)
        return FixedPointSet(roots=roots, phase=Phase.C, c_low=values[0],
                             c_star=values[1], c_high=values[2])
    if len(roots) != 1:
        raise DegenerateRootError(f"found {len(roots)} roots; expected 1 or 3", values)
    c = values[0]
    if c > p.c_0:
        mh = max_h_prime(p)
        phase = Phase.A if mh < 1.0 else Phase.B_PLUS
        return FixedPointSet(roots=roots, phase=phase, max_h_prime=mh, c_high=c)
    return FixedPointSet(roots=roots, phase=Phase.B_MINUS, c_low=c)


def _collect_roots(p, grid, d, resid):
    values = [float(c) for c in grid[d == 0.0]]
    idx = np.nonzero(d[:-1] * d[1:] < 0.0)[0]
    for i in idx:
        values.append(brentq(resid, grid[i], grid[i + 1], xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps))
    return sorted(values)


def boundary_hyperbola(p: MapParams, theta: float) -> float:
    """Approximate A/B+ boundary: theta * c_0 = 1 + 2 c_min / delta."""
    if not theta > 0:
        raise DomainError(f"theta must be > 0 (got {theta})")
    return (1.0 + 2.0 * p.c_min / p.delta) / theta


def boundary_tangency(p: MapParams, theta: float):
    """Closed-form saddle-node boundaries (c0_low, c0_high) of phase C at
    the given theta, or None when theta * delta <= 2.

    Phase C holds for c_0 strictly between the two values.
    """
    if not theta > 0:
        raise DomainError(f"theta must be > 0 (got {theta})")
    if theta * p.delta <= 2.0:
        return None
    m = 0.5 * (p.c_min + p.c_max)
    s = math.sqrt(max(p.delta**2 / 4.0 - p.delta / (2.0 * theta), 0.0))
    g_lo, g_hi = m - s, m + s
    c0_low = g_lo + math.log((p.c_max - g_lo) / (g_lo - p.c_min)) / (2.0 * theta)
    c0_high = g_hi + math.log((p.c_max - g_hi) / (g_hi - p.c_min)) / (2.0 * theta)
    return (min(c0_low, c0_high), max(c0_low, c0_high))


def boundary_exact_a(p: MapParams, theta: float) -> float:
    """c_0 at which max H' = 1 for the given theta: the exact edge of phase A."""
    q = p.replace(theta=theta)

    def f(c0):
        return max_h_prime(q.replace(c_0=c0)) - 1.0

    guess = boundary_hyperbola(p, theta)
    a, b = 0.25 * guess, 2.0 * guess
    while f(a) > 0:
        a -= guess
    while f(b) < 0:
        b += guess
    return brentq(f, a, b, xtol=1e-12)


@dataclass
class PhaseDiagram:
    c0: np.ndarray
    theta: np.ndarray
    phase: np.ndarray  # (n_theta, n_c0) labels
    distance_ratio: np.ndarray  # nan outside phase C
    base: MapParams = field(default_factory=MapParams)

    def rows(self):
        for j, th in enumerate(self.theta):
            for i, c0 in enumerate(self.c0):
                r = self.distance_ratio[j, i]
                yield float(c0), float(th), str(self.phase[j, i]), (None if np.isnan(r) else float(r))


def _classify_node(base: MapParams, c0: float, theta: float):
    try:
        fps = fixed_points(base.replace(c_0=c0, theta=theta))
    except DegenerateRootError:
        return BOUNDARY_LABEL, math.nan
    ratio = fps.distance_ratio
    return fps.phase.value, (math.nan if ratio is None else ratio)


def phase_diagram_scan(base: MapParams, c0_values, theta_values, threads: int = 1) -> PhaseDiagram:
    """Classify every (c_0, theta) node; other map parameters come from ``base``.

    Output ordering is by grid index for any ``threads``.
    """
    c0_values = np.asarray(c0_values, dtype=float)
    theta_values = np.asarray(theta_values, dtype=float)
    if c0_values.size < 2 or theta_values.size < 2:
        raise DomainError("phase diagram grid must be at least 2 x 2")
    if np.any(theta_values <= 0):
        raise DomainError("theta values must be positive")

    def row(theta):
        return [_classify_node(base, c0, theta) for c0 in c0_values]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, theta_values))
    else:
        rows = [row(th) for th in theta_values]
    labels = np.array([[lab for lab, _ in r] for r in rows], dtype=object)
    ratios = np.array([[rat for _, rat in r] for r in rows], dtype=float)
    return PhaseDiagram(c0=c0_values, theta=theta_values, phase=labels,
                        distance_ratio=ratios, base=base)
