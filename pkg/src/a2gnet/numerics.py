"""Special functions, quadrature nodes, and reproducible random sampling.

Everything here is deterministic given an :class:`RngStream`, so Monte Carlo
callers can parallelize per work unit and still merge bit-exact results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import optimize, special

from .errors import DomainError

_TWO64 = 1 << 64


# ---------------------------------------------------------------------------
# dB / power helpers
# ---------------------------------------------------------------------------

def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(x)


def dbm_to_watt(p_dbm):
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_w):
    return 10.0 * np.log10(p_w) + 30.0


# ---------------------------------------------------------------------------
# Reproducible random streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RngStream:
    """Named random stream: (master_seed, stream_index) fully determines draws.

    Distinct stream indices are statistically independent; the same pair
    always reproduces the same sample sequence regardless of execution order.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < _TWO64):
            raise DomainError("master_seed must fit in 64 bits")
        if int(self.stream_index) < 0:
            raise DomainError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(ss))

    def child_generator(self, *key: int) -> np.random.Generator:
        """Independent generator for a work unit, e.g. (trial index,)."""
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index, *key))
        return np.random.Generator(np.random.PCG64(ss))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return rng.generator()


# ---------------------------------------------------------------------------
# Marcum Q
# ---------------------------------------------------------------------------

def marcum_q(a: float, b: float) -> float:
    """First-order Marcum Q-function Q1(a, b).

    Evaluated as the Poisson mixture
        Q1(a,b) = sum_k  P[N_x = k] * P[N_y <= k],   x = a^2/2, y = b^2/2,
    summed over a window covering the mass of both Poisson laws, with a
    Chernoff clip once (b-a)^2/2 is far beyond double precision relevance.
    Absolute error is well below 1e-9 for a, b <= 30.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("marcum_q arguments must be finite")
    if a < 0.0 or b < 0.0:
        raise DomainError("marcum_q arguments must be non-negative")
    if b == 0.0:
        return 1.0
    if a == 0.0:
        return math.exp(-0.5 * b * b)
    # Q1(a,b) <= exp(-(b-a)^2/2) for b > a, and symmetrically for the lower
    # tail, so past exp(-60) the result saturates.
    if b > a and 0.5 * (b - a) ** 2 > 60.0:
        return 0.0
    if a > b and 0.5 * (a - b) ** 2 > 60.0:
        return 1.0

    x = 0.5 * a * a
    y = 0.5 * b * b
    lo = min(x, y)
    hi = max(x, y)
    klo = max(0, int(lo - 12.0 * math.sqrt(lo + 1.0) - 30.0))
    khi = int(hi + 12.0 * math.sqrt(hi + 1.0) + 30.0)

    lgx = math.log(x)
    lgy = math.log(y)
    lpx = klo * lgx - x - math.lgamma(klo + 1)
    lpy = klo * lgy - y - math.lgamma(klo + 1)
    cy = float(special.gammaincc(klo + 1, y))  # P[N_y <= klo]
    total = math.exp(lpx) * cy
    for k in range(klo + 1, khi + 1):
        lgk = math.log(k)
        lpx += lgx - lgk
        lpy += lgy - lgk
        cy = min(1.0, cy + math.exp(lpy))
        total += math.exp(lpx) * cy
    return min(1.0, max(0.0, total))


def inv_marcum_q(a: float, p: float) -> float:
    """Solve Q1(a, b) = p for b (the function is decreasing in b)."""
    a = float(a)
    p = float(p)
    if not (math.isfinite(a) and math.isfinite(p)):
        raise DomainError("inv_marcum_q arguments must be finite")
    if a < 0.0:
        raise DomainError("inv_marcum_q requires a >= 0")
    if not 0.0 < p <= 1.0:
        raise DomainError("inv_marcum_q requires 0 < p <= 1")
    if p == 1.0:
        return 0.0
    if a == 0.0:
        return math.sqrt(-2.0 * math.log(p))

    hi = a + 2.0
    for _ in range(200):
        if marcum_q(a, hi) <= p:
            break
        hi = hi * 1.5 + 2.0
    else:  # pragma: no cover - unreachable for valid p
        raise DomainError("failed to bracket inverse Marcum Q")
    return float(optimize.brentq(lambda b: marcum_q(a, b) - p, 0.0, hi,
                                 xtol=1e-12, rtol=8.9e-16))


# ---------------------------------------------------------------------------
# Capacity quadrature nodes
# ---------------------------------------------------------------------------

def chebyshev_capacity_nodes(k: int):
    """Nodes/weights turning int_0^inf f(t) dt into sum_n w_n f(t_n).

    t_n = tan[(pi/4) cos((2n-1)pi/2K) + pi/4]
    w_n = pi^2 sin((2n-1)pi/2K) / (4K cos^2[(pi/4) cos((2n-1)pi/2K) + pi/4])

    Returns (t, w) as float arrays of length K, in ascending node order.
    """
    if int(k) != k or k < 1:
        raise DomainError("node count K must be a positive integer")
    k = int(k)
    n = np.arange(1, k + 1)
    theta = (2 * n - 1) * np.pi / (2 * k)
    u = 0.25 * np.pi * np.cos(theta) + 0.25 * np.pi
    t = np.tan(u)
    w = np.pi ** 2 * np.sin(theta) / (4 * k * np.cos(u) ** 2)
    order = np.argsort(t)
    return t[order], w[order]


# ---------------------------------------------------------------------------
# Small-scale fading and shadowing samplers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rayleigh:
    """Rayleigh envelope; power gain ~ Exp(1) (unit mean)."""


@dataclass(frozen=True)
class Rician:
    """Rician envelope with linear K-factor, normalized to unit mean power."""

    k_factor: float

    def __post_init__(self):
        if not (math.isfinite(self.k_factor) and self.k_factor >= 0.0):
            raise DomainError("Rician K-factor must be >= 0")

    @classmethod
    def from_db(cls, k_db: float) -> "Rician":
        return cls(10.0 ** (k_db / 10.0))


@dataclass(frozen=True)
class Nakagami:
    """Nakagami-m envelope; power gain ~ Gamma(m, 1/m) (unit mean)."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError("Nakagami m must be a positive integer")


FadingModel = Union[Rayleigh, Rician, Nakagami]


def sample_fading(model: FadingModel, rng: RngLike, size=None):
    """Draw unit-mean linear power gains from the given fading law."""
    g = as_generator(rng)
    if isinstance(model, Rayleigh):
        return g.exponential(1.0, size)
    if isinstance(model, Nakagami):
        return g.gamma(model.m, 1.0 / model.m, size)
    if isinstance(model, Rician):
        k = model.k_factor
        mean = math.sqrt(k / (k + 1.0))
        sigma = math.sqrt(0.5 / (k + 1.0))
        re = g.normal(mean, sigma, size)
        im = g.normal(0.0, sigma, size)
        return re * re + im * im
    raise DomainError(f"unknown fading model {model!r}")


def nakagami_power_cdf(omega, m: int):
    """P[power < omega] for Nakagami-m unit-mean power (Erlang tail sum)."""
    omega = np.asarray(omega, dtype=float)
    acc = np.zeros_like(omega)
    for k in range(int(m)):
        acc += (m * omega) ** k / math.factorial(k)
    return 1.0 - acc * np.exp(-m * omega)


def sample_shadowing_db(sigma_db: float, rng: RngLike, size=None):
    """Zero-mean normal large-scale fading in dB."""
    if not (math.isfinite(sigma_db) and sigma_db >= 0.0):
        raise DomainError("shadowing sigma must be >= 0 dB")
    g = as_generator(rng)
    return g.normal(0.0, sigma_db, size)
