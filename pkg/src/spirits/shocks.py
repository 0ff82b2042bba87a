"""AR(1) log-productivity shocks with stationary standard deviation sigma.

xi_t = eta * xi_{t-1} + sqrt(1 - eta^2) * N(0, sigma^2)

Random streams are derived from a master seed with :func:`mix64` so that
ensemble member ``i`` always sees the same numbers, however the work is
scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import DomainError

__all__ = [
    "ShockParams",
    "ShockPath",
    "ShockStream",
    "mix64",
    "make_generator",
    "sample_path",
    "correlation_time",
]

_MASK64 = (1 << 64) - 1


def mix64(seed: int, index: int = 0) -> int:
    """SplitMix64 finaliser applied to ``seed + (index + 1) * golden_gamma``.

    Child seeds for distinct indices are decorrelated 64-bit integers.
    """
    z = (int(seed) + (int(index) + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def make_generator(seed: int) -> np.random.Generator:
    # numpy's ziggurat normal sampler is exact in the tails
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


@dataclass(frozen=True)
class ShockParams:
    sigma: float = 0.6
    eta: float = 0.5
    seed: int = 0

    def __post_init__(self):
        errs = []
        if not self.sigma >= 0:
            errs.append(f"sigma must be >= 0 (got {self.sigma})")
        if not 0 <= self.eta < 1:
            errs.append(f"eta must lie in [0, 1) (got {self.eta})")
        if not 0 <= int(self.seed) <= _MASK64:
            errs.append(f"seed must be a 64-bit unsigned integer (got {self.seed})")
        if errs:
            raise DomainError("; ".join(errs))

    @property
    def innovation_scale(self) -> float:
        return self.sigma * math.sqrt(1.0 - self.eta**2)

    def child(self, index: int) -> "ShockParams":
        """Parameters for ensemble member ``index`` with its own stream."""
        return ShockParams(self.sigma, self.eta, mix64(self.seed, index))

    def with_sigma(self, sigma: float) -> "ShockParams":
        return ShockParams(sigma, self.eta, self.seed)


@dataclass
class ShockPath:
    values: np.ndarray
    params: ShockParams


@dataclass
class ShockStream:
    """Stateful AR(1) generator producing consecutive chunks of one path.

    ``initial`` is either a float or ``"stationary"`` (draw from N(0, sigma^2)).
    Concatenated chunks are identical to one long :func:`sample_path`.
    """

    params: ShockParams
    initial: object = "stationary"
    rng: np.random.Generator = field(init=False)
    last: float = field(init=False, default=math.nan)
    _started: bool = field(init=False, default=False)

    def __post_init__(self):
        self.rng = make_generator(self.params.seed)

    def _first(self) -> float:
        if isinstance(self.initial, str):
            if self.initial != "stationary":
                raise DomainError(f"unknown initial shock choice {self.initial!r}")
            return float(self.rng.standard_normal()) * self.params.sigma
        return float(self.initial)

    def next(self, n: int) -> np.ndarray:
        if n <= 0:
            return np.empty(0)
        if not self._started:
            self._started = True
            xi0 = self._first()
            rest = self._advance(xi0, n - 1)
            out = np.concatenate([[xi0], rest])
        else:
            out = self._advance(self.last, n)
        self.last = float(out[-1])
        return out

    def _advance(self, prev: float, n: int) -> np.ndarray:
        if n <= 0:
            return np.empty(0)
        p = self.params
        g = self.rng.standard_normal(n) * p.innovation_scale
        if p.eta == 0.0:
            return g
        out, _ = lfilter([1.0], [1.0, -p.eta], g, zi=[p.eta * prev])
        return out


def sample_path(p: ShockParams, length: int, initial="stationary") -> ShockPath:
    """Generate ``length`` consecutive shocks, deterministic in ``p.seed``."""
    if length < 1:
        raise DomainError(f"length must be >= 1 (got {length})")
    return ShockPath(values=ShockStream(p, initial).next(length), params=p)


def correlation_time(p: ShockParams) -> float:
    """T_eta = 1 / |ln eta|, with 0 for white noise."""
    if p.eta == 0.0:
        return 0.0
    return 1.0 / abs(math.log(p.eta))
