"""Household and firm block: per-period equilibrium as a function of
confidence ``f`` and productivity ``z``.

Everything is per capita (c = C/M, n = N/M), so the population size never
appears. Only the product of the Lagrange multiplier and the price level,
``lambda_p``, is identified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import DomainError, NonConvergence

__all__ = [
    "Preferences",
    "FirmParams",
    "Equilibrium",
    "solve_equilibrium",
    "closed_form_consumption",
    "invert_confidence",
    "taylor_rate",
]

_LOG_N_BRACKET = (math.log(1e-12), math.log(1e12))
_LOG_N_XTOL = 1e-12


@dataclass(frozen=True)
class Preferences:
    """Household preferences.

    gamma: labour disutility factor; varsigma: consumption curvature in (0, 1];
    phi: labour curvature; beta: discount factor.
    """

    gamma: float = 1.0
    varsigma: float = 1.0
    phi: float = 1.0
    beta: float = 0.99

    def __post_init__(self):
        errs = []
        if not self.gamma > 0:
            errs.append(f"gamma must be > 0 (got {self.gamma})")
        if not 0 < self.varsigma <= 1:
            errs.append(f"varsigma must lie in (0, 1] (got {self.varsigma})")
        if not self.phi > 0:
            errs.append(f"phi must be > 0 (got {self.phi})")
        if not 0 < self.beta < 1:
            errs.append(f"beta must lie in (0, 1) (got {self.beta})")
        if errs:
            raise DomainError("; ".join(errs))

    @property
    def is_standard(self) -> bool:
        return self.varsigma == 1.0 and self.phi == 1.0


@dataclass(frozen=True)
class FirmParams:
    alpha: float = 1.0 / 3.0
    zbar: float = 1.0

    def __post_init__(self):
        errs = []
        if not 0 < self.alpha < 1:
            errs.append(f"alpha must lie in (0, 1) (got {self.alpha})")
        if not self.zbar > 0:
            errs.append(f"zbar must be > 0 (got {self.zbar})")
        if errs:
            raise DomainError("; ".join(errs))


@dataclass(frozen=True)
class Equilibrium:
    c: float
    n: float
    u: float
    lambda_p: float


def _check_positive(**values):
    bad = [f"{k} must be > 0 (got {v})" for k, v in values.items() if not v > 0]
    if bad:
        raise DomainError("; ".join(bad))


def closed_form_consumption(f: float, z: float, gamma: float) -> float:
    """c = z (9 f / (4 gamma))^(1/3), valid for varsigma = phi = 1, alpha = 1/3."""
    return z * (9.0 * f / (4.0 * gamma)) ** (1.0 / 3.0)


def _quantities(log_n, prefs, alpha, f, z):
    n = math.exp(log_n)
    c = z * n ** (1.0 - alpha) / (1.0 - alpha)
    u = z * n ** (-alpha)
    lambda_p = f / c**prefs.varsigma
    return c, n, u, lambda_p


def solve_equilibrium(prefs: Preferences, firm: FirmParams, f: float, z: float) -> Equilibrium:
    """Solve the household state equations with market clearing and the
    firm's first-order condition for (c, n, u, lambda_p).

    The system is reduced to a scalar equation in ``log n``: the labour
    supply condition n^phi = u * lambda_p / gamma, with u, c and lambda_p
    expressed through n.
    """
    _check_positive(f=f, z=z)
    alpha = firm.alpha

    def labour_residual(log_n):
        c, n, u, lambda_p = _quantities(log_n, prefs, alpha, f, z)
        return prefs.phi * log_n - (math.log(u) + math.log(lambda_p) - math.log(prefs.gamma))

    lo, hi = _LOG_N_BRACKET
    if prefs.is_standard and math.isclose(alpha, 1.0 / 3.0):
        # closed form n = sqrt(2 f / (3 gamma)) gives a tight bracket
        guess = 0.5 * math.log(2.0 * f / (3.0 * prefs.gamma))
        if lo < guess < hi:
            lo, hi = max(lo, guess - 1.0), min(hi, guess + 1.0)
    try:
        r_lo, r_hi = labour_residual(lo), labour_residual(hi)
        if r_lo * r_hi > 0:
            lo, hi = _LOG_N_BRACKET
            if labour_residual(lo) * labour_residual(hi) > 0:
                raise NonConvergence(
                    f"labour supply root not bracketed in n in [1e-12, 1e12] (f={f}, z={z})"
                )
        log_n, info = brentq(labour_residual, lo, hi, xtol=_LOG_N_XTOL, rtol=1e-15,
                             maxiter=200, full_output=True, disp=False)
    except (OverflowError, ZeroDivisionError) as exc:
        raise NonConvergence(f"labour supply residual overflowed: {exc}") from exc
    if not info.converged:
        raise NonConvergence(f"brentq did not converge: {info.flag}")
    c, n, u, lambda_p = _quantities(log_n, prefs, alpha, f, z)
    return Equilibrium(c=c, n=n, u=u, lambda_p=lambda_p)


def invert_confidence(firm: FirmParams, prefs: Preferences, g_value: float) -> float:
    """Confidence level ``F`` that yields consumption ``g_value`` at z = zbar.

    Inverse of ``solve_equilibrium(...).c`` in ``f``; for the standard
    exponents this is 4 gamma (g / zbar)^3 / 9.
    """
    _check_positive(g_value=g_value)
    alpha, z = firm.alpha, firm.zbar
    if prefs.is_standard and alpha == 1.0 / 3.0:
        return 4.0 * prefs.gamma * (g_value / z) ** 3 / 9.0
    n = ((1.0 - alpha) * g_value / z) ** (1.0 / (1.0 - alpha))
    expo = prefs.phi + alpha + prefs.varsigma * (1.0 - alpha)
    return n**expo * prefs.gamma / (z ** (1.0 - prefs.varsigma) * (1.0 - alpha) ** prefs.varsigma)


def taylor_rate(pi, prefs, phi_taylor: float):
    """Nominal rate set by the central bank: r = phi_taylor * pi - log(beta).

    ``prefs`` is a :class:`Preferences` or a bare discount factor in (0, 1]
    (beta = 1 is accepted here to allow the zero-intercept case). ``pi`` may
    be an array.
    """
    if not phi_taylor > 1:
        raise DomainError(f"phi_taylor must be > 1 (got {phi_taylor})")
    beta = getattr(prefs, "beta", prefs)
    if not 0 < beta <= 1:
        raise DomainError(f"beta must lie in (0, 1] (got {beta})")
    return phi_taylor * pi - math.log(beta)
