"""Aerial-base-station design: outage, power, coverage, and altitude optima.

The link between an aerial base station at altitude h and a ground user at
horizontal range r is Rician with elevation-dependent K-factor and path-loss
exponent; outage follows from the first-order Marcum Q-function. All angles
are radians, powers are watts, and K-factors are linear ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError
from .numerics import inv_marcum_q, marcum_q


@dataclass(frozen=True)
class PiecewiseLinear:
    """Monotone piecewise-linear table over elevation angle [0, pi/2]."""

    theta_rad: tuple
    values: tuple

    def __post_init__(self):
        th = np.asarray(self.theta_rad, dtype=float)
        if th.ndim != 1 or th.size < 2 or np.any(np.diff(th) <= 0):
            raise DomainError("theta grid must be strictly increasing")
        if th[0] < 0 or th[-1] > math.pi / 2 + 1e-12:
            raise DomainError("theta grid must lie within [0, pi/2]")
        if len(self.values) != th.size:
            raise DomainError("values must match the theta grid")

    def __call__(self, theta):
        out = np.interp(theta, self.theta_rad, self.values)
        return float(out) if np.ndim(theta) == 0 else out


def linear_profile(v_at_0: float, v_at_90: float) -> PiecewiseLinear:
    return PiecewiseLinear((0.0, math.pi / 2), (v_at_0, v_at_90))


@dataclass(frozen=True)
class AbsProfile:
    """Elevation-dependent channel profile plus link budget constants.

    k_of_theta returns the linear Rician K (nondecreasing in theta);
    eta_of_theta the path-loss exponent (nonincreasing, >= 2 at zenith).
    noise_w is the total noise power over the signal bandwidth.
    """

    k_of_theta: PiecewiseLinear
    eta_of_theta: PiecewiseLinear
    antenna_gain: float = 1.0
    noise_w: float = 6.31e-13          # -92 dBm
    threshold_t: float = 1.0           # 0 dB SNR target

    def __post_init__(self):
        th = np.linspace(0.0, math.pi / 2, 64)
        k = self.k_of_theta(th)
        eta = self.eta_of_theta(th)
        if np.any(np.diff(k) < -1e-12) or np.any(k < 0):
            raise DomainError("K(theta) must be nonnegative and nondecreasing")
        if np.any(np.diff(eta) > 1e-12) or eta[-1] < 2.0:
            raise DomainError("eta(theta) must be nonincreasing with eta(pi/2) >= 2")
        if self.antenna_gain <= 0 or self.noise_w <= 0 or self.threshold_t <= 0:
            raise DomainError("gain, noise, and threshold must be positive")


def urban_abs_profile(k0_db: float = 0.0, k90_db: float = 15.0,
                      eta0: float = 3.5, eta90: float = 2.0,
                      **kwargs) -> AbsProfile:
    """Documented urban default: eta 3.5 -> 2 and K 0 dB -> 15 dB over
    elevation, interpolated linearly in the linear K ratio."""
    return AbsProfile(
        k_of_theta=linear_profile(10.0 ** (k0_db / 10.0), 10.0 ** (k90_db / 10.0)),
        eta_of_theta=linear_profile(eta0, eta90),
        **kwargs,
    )


@dataclass(frozen=True)
class AbsDesign:
    """Target coverage disc: radius r_c served from altitude h_abs with at
    most `epsilon` outage at the boundary."""

    h_abs_m: float
    r_c_m: float
    epsilon: float

    def __post_init__(self):
        if self.h_abs_m < 0 or self.r_c_m <= 0:
            raise DomainError("need h_abs >= 0 and r_c > 0")
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError("epsilon must be in (0, 1)")

    @property
    def theta_c(self) -> float:
        return math.atan2(self.h_abs_m, self.r_c_m)


# ---------------------------------------------------------------------------
# Outage and required power
# ---------------------------------------------------------------------------

def outage(r_m, h_abs_m: float, p_tx_w: float, prof: AbsProfile):
    """P_out(r, h, P) = 1 - Q1(sqrt(2K), sqrt(2T(1+K) d^eta N0 / (G P)))."""
    if p_tx_w <= 0:
        raise DomainError("transmit power must be positive")
    if h_abs_m < 0:
        raise DomainError("altitude must be >= 0")
    r = np.asarray(r_m, dtype=float)
    if np.any(r < 0):
        raise DomainError("range must be >= 0")
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    theta = np.arctan2(h_abs_m, r)
    k = np.atleast_1d(prof.k_of_theta(theta))
    eta = np.atleast_1d(prof.eta_of_theta(theta))
    d = np.hypot(h_abs_m, r)
    arg = (2.0 * prof.threshold_t * (1.0 + k) * d ** eta * prof.noise_w
           / (prof.antenna_gain * p_tx_w))
    out = np.array([1.0 - marcum_q(math.sqrt(2.0 * kk), math.sqrt(aa))
                    for kk, aa in zip(k, arg)])
    return float(out[0]) if scalar else out


def required_power(design: AbsDesign, prof: AbsProfile) -> float:
    """Transmit power achieving outage epsilon at the coverage boundary."""
    theta_c = design.theta_c
    k = prof.k_of_theta(theta_c)
    eta = prof.eta_of_theta(theta_c)
    b = inv_marcum_q(math.sqrt(2.0 * k), 1.0 - design.epsilon)
    slant = design.r_c_m / math.cos(theta_c)  # = boundary link length
    return (prof.noise_w * prof.threshold_t / prof.antenna_gain
            * (2.0 * k + 2.0) / b ** 2 * slant ** eta)


def power_gain(h_abs_m: float, r_c_m: float, epsilon: float,
               prof: AbsProfile) -> float:
    """Required-power ratio ground/aerial for the same disc, closed form:
    x_0 x_theta^-1 r^(eta(0)-eta(theta_c)) cos(theta_c)^eta(theta_c)."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must be in (0, 1)")
    theta_c = math.atan2(h_abs_m, r_c_m)

    def x(theta):
        k = prof.k_of_theta(theta)
        b = inv_marcum_q(math.sqrt(2.0 * k), 1.0 - epsilon)
        return (2.0 * k + 2.0) / b ** 2

    eta0 = prof.eta_of_theta(0.0)
    eta_c = prof.eta_of_theta(theta_c)
    return (x(0.0) / x(theta_c) * r_c_m ** (eta0 - eta_c)
            * math.cos(theta_c) ** eta_c)


# ---------------------------------------------------------------------------
# Sum rate over the coverage disc
# ---------------------------------------------------------------------------

def mean_disc_outage(h_abs_m: float, p_tx_w: float, r_c_m: float,
                     prof: AbsProfile) -> float:
    """Outage averaged over the disc with area-uniform density 2r/r_c^2."""
    val, err = integrate.quad(
        lambda r: outage(r, h_abs_m, p_tx_w, prof) * 2.0 * r / r_c_m ** 2,
        0.0, r_c_m, limit=100)
    if err > 1e-6:
        val = integrate.quad(
            lambda r: outage(r, h_abs_m, p_tx_w, prof) * 2.0 * r / r_c_m ** 2,
            0.0, r_c_m, limit=500)[0]
    return min(1.0, max(0.0, val))


def sum_rate(h_abs_m: float, p_tx_w: float, n_bar: float, w_hz: float,
             r_c_m: float, prof: AbsProfile, threshold_t: float = None) -> float:
    """Average sum rate N_bar W log2(1+T) (1 - mean disc outage), bit/s."""
    if n_bar < 0:
        raise DomainError("average user count must be >= 0")
    t = prof.threshold_t if threshold_t is None else threshold_t
    if threshold_t is not None and threshold_t != prof.threshold_t:
        prof = AbsProfile(prof.k_of_theta, prof.eta_of_theta, prof.antenna_gain,
                          prof.noise_w, threshold_t)
    p_out = mean_disc_outage(h_abs_m, p_tx_w, r_c_m, prof)
    return n_bar * w_hz * math.log2(1.0 + t) * (1.0 - p_out)


def sum_rate_gain(h_abs_m: float, prof: AbsProfile, design: AbsDesign) -> float:
    """(1 - mean outage @ ABS power) / (1 - mean outage @ ground-BS power),
    each side transmitting its own required power for the disc."""
    aerial = AbsDesign(h_abs_m, design.r_c_m, design.epsilon)
    ground = AbsDesign(0.0, design.r_c_m, design.epsilon)
    p_abs = required_power(aerial, prof)
    p_tbs = required_power(ground, prof)
    num = 1.0 - mean_disc_outage(h_abs_m, p_abs, design.r_c_m, prof)
    den = 1.0 - mean_disc_outage(0.0, p_tbs, design.r_c_m, prof)
    return num / den


# ---------------------------------------------------------------------------
# Coverage radius and altitude optimization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverageRadius:
    radius_m: float
    no_coverage: bool = False
    capped: bool = False


def coverage_radius(h_abs_m: float, p_tx_w: float, epsilon: float,
                    prof: AbsProfile, r_max_m: float = 1e6) -> CoverageRadius:
    """Largest r with outage(r) <= epsilon, bisected to 0.1 m."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must be in (0, 1)")
    if outage(0.0, h_abs_m, p_tx_w, prof) > epsilon:
        return CoverageRadius(0.0, no_coverage=True)
    if outage(r_max_m, h_abs_m, p_tx_w, prof) <= epsilon:
        return CoverageRadius(r_max_m, capped=True)
    r = optimize.brentq(lambda rr: outage(rr, h_abs_m, p_tx_w, prof) - epsilon,
                        0.0, r_max_m, xtol=0.01)
    return CoverageRadius(float(r))


_ALTITUDE_METRICS = {"power_gain", "sum_rate_gain", "coverage_radius"}


def optimize_altitude(metric: str, prof: AbsProfile, grid: Sequence[float],
                      design: AbsDesign = None, p_tx_w: float = None,
                      epsilon: float = None):
    """Grid argmax of a design metric over altitude; lowest-h tie-break.

    power_gain and sum_rate_gain need `design`; coverage_radius needs
    p_tx_w and epsilon. Returns (h_best, metric_value).
    """
    if metric not in _ALTITUDE_METRICS:
        raise DomainError(f"unknown metric {metric!r}")
    grid = sorted(float(h) for h in grid)
    if not grid:
        raise DomainError("altitude grid must be nonempty")

    def evaluate(h):
        if metric == "power_gain":
            return power_gain(h, design.r_c_m, design.epsilon, prof)
        if metric == "sum_rate_gain":
            return sum_rate_gain(h, prof, design)
        return coverage_radius(h, p_tx_w, epsilon, prof).radius_m

    values = [evaluate(h) for h in grid]
    best = int(np.argmax(values))  # first occurrence = lowest altitude
    return grid[best], values[best]
