"""Inflation under a Taylor rule, linearised around the high-output state,
with the shift coming from anticipated crises.

With kappa = 3 G'(c_>) and Taylor coefficient phi > 1,

    pi_t + (kappa/phi) (d_t - d_{t-1})
        = (1 - kappa/phi) sum_k phi^(-k-1) E_t[d_{t+k+1} - d_{t+k}],

where d is the output gap. A crash probability p per period adds
-p/(phi - 1) * (c_> - c_<)/c_<.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .errors import BasinError, DomainError, PhaseError
from .feedback import FixedPointSet, MapParams, Phase, fixed_points, g_prime
from .micro import taylor_rate
from .shocks import ShockParams

__all__ = [
    "PolicyParams",
    "InflationPath",
    "kappa_high",
    "expected_gap_path",
    "default_truncation",
    "inflation_now",
    "inflation_residual",
    "crisis_inflation_correction",
    "inflation_path",
]


def kappa_high(map: MapParams, fps: FixedPointSet | None = None) -> float:
    """kappa_> = 3 G'(c_>)."""
    fps = fps if fps is not None else fixed_points(map)
    if fps.c_high is None:
        raise PhaseError(f"no high fixed point in phase {fps.phase}")
    return 3.0 * g_prime(map, fps.c_high)


@dataclass(frozen=True)
class PolicyParams:
    """Monetary policy block. Build with :meth:`from_map` so that
    ``kappa_high`` is always derived from the feedback map."""

    phi_taylor: float
    beta: float
    kappa_high: float
    crisis_prob: float = 0.0

    def __post_init__(self):
        errs = []
        if not self.phi_taylor > 1:
            errs.append(f"phi_taylor must be > 1 (got {self.phi_taylor})")
        if not 0 < self.beta < 1:
            errs.append(f"beta must lie in (0, 1) (got {self.beta})")
        if not self.kappa_high >= 0:
            errs.append(f"kappa_high must be >= 0 (got {self.kappa_high})")
        if not 0 <= self.crisis_prob < 1:
            errs.append(f"crisis_prob must lie in [0, 1) (got {self.crisis_prob})")
        if errs:
            raise DomainError("; ".join(errs))

    @classmethod
    def from_map(cls, map: MapParams, phi_taylor: float = 1.5, beta: float = 0.99,
                 crisis_prob: float = 0.0) -> "PolicyParams":
        return cls(phi_taylor=phi_taylor, beta=beta, kappa_high=kappa_high(map),
                   crisis_prob=crisis_prob)

    @property
    def forward_coefficient(self) -> float:
        """1 - kappa/phi; may be negative for strong feedback."""
        return 1.0 - self.kappa_high / self.phi_taylor

    def check_against(self, map: MapParams, fps: FixedPointSet | None = None):
        k = kappa_high(map, fps)
        if not math.isclose(k, self.kappa_high, rel_tol=1e-12, abs_tol=1e-15):
            raise DomainError(
                f"kappa_high={self.kappa_high} does not match 3 G'(c_>)={k}; use PolicyParams.from_map")


@dataclass
class InflationPath:
    pi: np.ndarray
    r: np.ndarray
    delta_pi_crisis: float
    kappa_high: float
    forward_coefficient_negative: bool

    @property
    def mean_pi(self) -> float:
        return float(np.mean(self.pi))


def _slope(map: MapParams, fps: FixedPointSet | None = None) -> float:
    fps = fps if fps is not None else fixed_points(map)
    if fps.c_high is None:
        raise DomainError(f"no high fixed point in phase {fps.phase}")
    g = g_prime(map, fps.c_high)
    if abs(g) >= 1.0:
        raise DomainError(f"|G'(c_>)| = {abs(g):.6g} >= 1")
    return g


def _expected_gaps(g: float, eta: float, delta_t: float, xi_t: float, horizon: int) -> np.ndarray:
    k = np.arange(1, horizon + 1, dtype=float)
    gk = g**k
    if math.isclose(eta, g, rel_tol=0.0, abs_tol=1e-12):
        shock = xi_t * eta * k * g ** (k - 1)
    else:
        shock = xi_t * eta * (eta**k - gk) / (eta - g)
    return gk * delta_t + shock


def expected_gap_path(map: MapParams, shocks: ShockParams, delta_t: float, xi_t: float,
                      horizon: int, fps: FixedPointSet | None = None) -> np.ndarray:
    """E_t[d_{t+k}] for k = 1..horizon under d_{t+1} = g d_t + xi_{t+1},
    E_t[xi_{t+j}] = eta^j xi_t, with g = G'(c_>)."""
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1 (got {horizon})")
    return _expected_gaps(_slope(map, fps), shocks.eta, delta_t, xi_t, horizon)


def default_truncation(phi_taylor: float, tol: float = 1e-14) -> int:
    """Smallest N with phi^(-N) < tol."""
    return int(math.ceil(-math.log(tol) / math.log(phi_taylor))) + 1


def _forward_sum(phi: float, g: float, eta: float, delta_t: float, xi_t: float, n: int) -> float:
    e = np.concatenate([[delta_t], _expected_gaps(g, eta, delta_t, xi_t, n + 1)])
    weights = phi ** -(np.arange(n + 1, dtype=float) + 1.0)
    return float(np.sum(weights * np.diff(e)))


def inflation_now(policy: PolicyParams, map: MapParams, shocks: ShockParams, delta_t: float,
                  delta_prev: float, xi_t: float, truncation: int | None = None,
                  fps: FixedPointSet | None = None, free_kappa: bool = False) -> float:
    """Solve the linearised inflation equation for pi_t (without crisis term).

    The infinite forward sum is cut after ``truncation`` + 1 terms; the
    default makes phi^(-truncation) < 1e-14. ``policy.kappa_high`` must equal
    3 G'(c_>) unless ``free_kappa`` is set (used to study the kappa -> 0 limit).
    """
    fps = fps if fps is not None else fixed_points(map)
    if not free_kappa:
        policy.check_against(map, fps)
    g = _slope(map, fps)
    phi = policy.phi_taylor
    n = truncation if truncation is not None else default_truncation(phi)
    if phi ** (-n) >= 1e-14:
        raise DomainError(f"truncation {n} too short: phi^-N = {phi ** -n:.3g}")
    kap = policy.kappa_high
    fwd = _forward_sum(phi, g, shocks.eta, delta_t, xi_t, n)
    return -(kap / phi) * (delta_t - delta_prev) + (1.0 - kap / phi) * fwd


def inflation_residual(pi_t: float, policy: PolicyParams, map: MapParams, shocks: ShockParams,
                  delta_t: float, delta_prev: float, xi_t: float,
                  truncation: int | None = None) -> float:
    """LHS minus RHS of the inflation equation for a candidate pi_t."""
    fps = fixed_points(map)
    g = _slope(map, fps)
    phi = policy.phi_taylor
    n = truncation if truncation is not None else default_truncation(phi)
    kap = policy.kappa_high
    lhs = pi_t + (kap / phi) * (delta_t - delta_prev)
    rhs = (1.0 - kap / phi) * _forward_sum(phi, g, shocks.eta, delta_t, xi_t, n)
    return lhs - rhs


def crisis_inflation_correction(policy: PolicyParams, fps: FixedPointSet) -> float:
    """Inflation shift from anticipated crashes: -p/(phi - 1) * (c_> - c_<)/c_<."""
    if fps.phase is not Phase.C:
        raise PhaseError(f"crisis correction needs phase C (got {fps.phase})")
    return -(policy.crisis_prob / (policy.phi_taylor - 1.0)) * (fps.c_high - fps.c_low) / fps.c_low


def inflation_path(traj: Trajectory, policy: PolicyParams, map: MapParams,
                   shocks: ShockParams, truncation: int | None = None) -> InflationPath:
    """Inflation and the policy rate along a trajectory that stays near c_>.

    Step t uses the realised gap d_t, d_{t-1} and shock xi_t; the first point
    has no predecessor and is skipped. The crisis shift is added when
    ``policy.crisis_prob > 0``.
    """
    fps = fixed_points(map)
    policy.check_against(map, fps)
    g = _slope(map, fps)
    if fps.phase is Phase.C and np.any(traj.x <= fps.x_star):
        raise BasinError("trajectory leaves the high basin; linearisation invalid")
    if fps.phase is Phase.B_MINUS:
        raise BasinError("no high basin in phase B-")
    d = np.exp(traj.x) / fps.c_high - 1.0
    xi = traj.xi
    phi, kap = policy.phi_taylor, policy.kappa_high
    n = truncation if truncation is not None else default_truncation(phi)
    shift = 0.0
    if policy.crisis_prob > 0:
        shift = crisis_inflation_correction(policy, fps)
    # the forward sum is linear in (d_t, xi_t)
    a = _forward_sum(phi, g, shocks.eta, 1.0, 0.0, n)
    b = _forward_sum(phi, g, shocks.eta, 0.0, 1.0, n)
    fwd = a * d[1:] + b * xi[1:]
    pi = -(kap / phi) * np.diff(d) + (1.0 - kap / phi) * fwd + shift
    r = taylor_rate(pi, policy.beta, phi)
    return InflationPath(pi=pi, r=r, delta_pi_crisis=shift, kappa_high=kap,
                         forward_coefficient_negative=policy.forward_coefficient < 0)
