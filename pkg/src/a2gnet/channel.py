"""Path loss, LOS probability, shadowing, and slice selection.

The catalog composes into a single link-loss sampler: distance-dependent
path loss, plus dB-normal shadowing, plus small-scale fading expressed as a
dB penalty, with the LOS/NLOS state drawn from the configured probability
model.

Unit conventions worth calling out:
  * In the building-statistics LOS probability the horizontal distance
    enters in kilometres, so that sqrt(varsigma * xi) (xi in buildings per
    km^2) is dimensionally consistent.
  * `log` in every 3GPP-style expression is base 10 and the carrier enters
    in GHz (the 40*pi*f/3 idiom presumes both).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .antenna_geometry import LinkGeometry
from .errors import ApplicabilityError, DomainError, ModelGapError, OutOfEnvelopeError
from .numerics import FadingModel, RngLike, as_generator, sample_fading

SPEED_OF_LIGHT = 299_792_458.0
# the 3GPP 40*pi*f/3 idiom embeds c = 3e8; the breakpoint uses the same
_C_3GPP = 3.0e8
MAX_MODELED_ALTITUDE_M = 300.0


# ---------------------------------------------------------------------------
# Environment and propagation slices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Environment:
    """Built-environment statistics driving LOS probability and slices.

    varsigma: fraction of land covered by buildings; xi: buildings per km^2;
    omega: Rayleigh scale of building heights (m).
    """

    kind: str = "urban"
    varsigma: float = 0.3
    xi: float = 500.0
    omega: float = 15.0
    mean_building_height_m: float = 15.0 * math.sqrt(math.pi / 2.0)
    street_width_m: float = 20.0

    def __post_init__(self):
        if self.kind not in _GROUND_CEILING_M:
            raise DomainError(f"unknown environment kind {self.kind!r}")
        if not 0.0 <= self.varsigma <= 1.0:
            raise DomainError("varsigma must be in [0, 1]")
        if self.xi <= 0 or self.omega <= 0:
            raise DomainError("xi and omega must be positive")


_GROUND_CEILING_M = {
    "suburban": 10.0, "rural": 10.0, "open": 10.0,
    "urban": 22.5, "dense_urban": 22.5, "highrise": 22.5,
}
_OBSTRUCTED_CEILING_M = {
    "suburban": 40.0, "rural": 40.0, "open": 40.0,
    "urban": 100.0, "dense_urban": 100.0, "highrise": 100.0,
}


def _env(kind, varsigma, xi, omega, street=20.0):
    return Environment(kind=kind, varsigma=varsigma, xi=xi, omega=omega,
                       mean_building_height_m=omega * math.sqrt(math.pi / 2.0),
                       street_width_m=street)


def suburban() -> Environment:
    return _env("suburban", 0.1, 750.0, 8.0)


def urban() -> Environment:
    return _env("urban", 0.3, 500.0, 15.0)


def dense_urban() -> Environment:
    return _env("dense_urban", 0.5, 300.0, 20.0)


def highrise() -> Environment:
    return _env("highrise", 0.5, 300.0, 50.0)


class PropagationSlice(Enum):
    GROUND = "ground"
    OBSTRUCTED = "obstructed"
    HIGH_ALTITUDE = "high_altitude"
    AIR_TO_AIR = "air_to_air"


def slice_of(h_uav_m: float, env: Environment) -> PropagationSlice:
    """Altitude band for the aerial node; boundaries go to the higher slice."""
    if not math.isfinite(h_uav_m) or h_uav_m < 0.0:
        raise OutOfEnvelopeError("altitude must be in [0, 300] m")
    if h_uav_m > MAX_MODELED_ALTITUDE_M:
        raise OutOfEnvelopeError(
            f"altitude {h_uav_m} m above the modeled 300 m envelope")
    if h_uav_m < _GROUND_CEILING_M[env.kind]:
        return PropagationSlice.GROUND
    if h_uav_m < _OBSTRUCTED_CEILING_M[env.kind]:
        return PropagationSlice.OBSTRUCTED
    return PropagationSlice.HIGH_ALTITUDE


# ---------------------------------------------------------------------------
# Path-loss specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Carrier:
    frequency_hz: float

    def __post_init__(self):
        if self.frequency_hz <= 0:
            raise DomainError("carrier frequency must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.frequency_hz

    @property
    def ghz(self) -> float:
        return self.frequency_hz / 1e9


@dataclass(frozen=True)
class FreeSpace:
    """Generalized free-space loss (4 pi d / lambda)^eta, optional fixed
    additive dB term (e.g. mmWave absorption/rain margins)."""

    carrier: Carrier
    eta: float = 2.0
    extra_db: float = 0.0

    def __post_init__(self):
        if self.eta <= 0:
            raise DomainError("path-loss exponent must be positive")


@dataclass(frozen=True)
class LogDistance:
    """Log-distance model; lambda0_db=None means free-space loss at d0."""

    carrier: Carrier
    eta: float
    lambda0_db: Optional[float] = None
    d0_m: float = 1.0
    sigma_db: float = 0.0

    def __post_init__(self):
        if self.eta <= 0:
            raise DomainError("path-loss exponent must be positive")
        if self.d0_m <= 0:
            raise DomainError("reference distance must be positive")
        if self.sigma_db < 0:
            raise DomainError("shadowing sigma must be >= 0")

    @property
    def reference_loss_db(self) -> float:
        if self.lambda0_db is not None:
            return self.lambda0_db
        return 20.0 * math.log10(4.0 * math.pi * self.d0_m / self.carrier.wavelength_m)


@dataclass(frozen=True)
class ThreeGppRural:
    """Slice-aware 3GPP-style rural-macro family (ground/obstructed/high)."""

    carrier: Carrier
    environment: Environment


@dataclass(frozen=True)
class BuildingPlos:
    environment: Environment


@dataclass(frozen=True)
class ThreeGppPlos:
    environment: Environment


@dataclass(frozen=True)
class FixedPlos:
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError("LOS probability must be in [0, 1]")


PlosModel = Union[BuildingPlos, ThreeGppPlos, FixedPlos]


@dataclass(frozen=True)
class LosNlosAveraged:
    los: Union[FreeSpace, LogDistance, ThreeGppRural]
    nlos: Union[FreeSpace, LogDistance, ThreeGppRural]
    plos: PlosModel


PathLossSpec = Union[FreeSpace, LogDistance, ThreeGppRural, LosNlosAveraged]


def _d3d(g):
    return g.d_3d if isinstance(g, LinkGeometry) else g


# ---------------------------------------------------------------------------
# Elementary path-loss laws
# ---------------------------------------------------------------------------

def free_space_pl_db(g, spec: FreeSpace):
    """10 eta log10(4 pi d / lambda); eta=2 reproduces Friis."""
    d = np.asarray(_d3d(g), dtype=float)
    if np.any(d <= 0.0):
        raise DomainError("free-space loss needs d_3d > 0")
    out = 10.0 * spec.eta * np.log10(4.0 * np.pi * d / spec.carrier.wavelength_m)
    out = out + spec.extra_db
    return float(out) if out.ndim == 0 else out


def log_distance_pl_db(g, spec: LogDistance):
    """Lambda_0 + 10 eta log10(d/d0); rejects d below the reference."""
    d = np.asarray(_d3d(g), dtype=float)
    if np.any(d < spec.d0_m):
        raise DomainError(f"log-distance model needs d >= d0 ({spec.d0_m} m)")
    out = spec.reference_loss_db + 10.0 * spec.eta * np.log10(d / spec.d0_m)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# LOS probability models
# ---------------------------------------------------------------------------

def _p_los_building_heights(d_h_m, h_hi, h_lo, env: Environment):
    """Building-statistics LOS probability with ray heights interpolated
    between the two endpoint heights; symmetric in the endpoints.

    d_h enters in km so sqrt(varsigma * xi) is dimensionless per km.
    """
    d_h = np.asarray(d_h_m, dtype=float)
    scalar = d_h.ndim == 0
    d_h = np.atleast_1d(d_h)
    m = np.floor(d_h / 1000.0 * math.sqrt(env.varsigma * env.xi) - 1.0).astype(int)
    out = np.ones_like(d_h)
    mmax = int(m.max()) if m.size else -1
    if mmax >= 0:
        n = np.arange(mmax + 1)[None, :]
        frac = (n + 0.5) / np.maximum(m[:, None] + 1.0, 1.0)
        ray_h = h_hi - frac * (h_hi - h_lo)
        factors = 1.0 - np.exp(-ray_h ** 2 / (2.0 * env.omega ** 2))
        factors = np.where(n <= m[:, None], factors, 1.0)
        out = np.prod(factors, axis=1)
    return float(out[0]) if scalar else out


def p_los_building(g: LinkGeometry, env: Environment):
    """LOS probability from building statistics for a descending ray."""
    if g.h_uav <= g.h_g:
        raise DomainError("building-statistics LOS model needs h_uav > h_g")
    return _p_los_building_heights(g.d_h, g.h_uav, g.h_g, env)


def obstructed_plos_auxiliaries(h_uav_m: float):
    """(d_1, p_1) auxiliaries of the obstructed-slice LOS probability."""
    if h_uav_m <= 0:
        raise DomainError("altitude must be positive")
    lg = math.log10(h_uav_m)
    d1 = max(1350.8 * lg - 1602.0, 18.0)
    p1 = max(15021.0 * lg - 16053.0, 1000.0)
    return d1, p1


def p_los_3gpp(d_h_m, h_uav_m: float, slice_: PropagationSlice):
    """Slice-specific LOS probability of the 3GPP-style model family."""
    d_h = np.asarray(d_h_m, dtype=float)
    if slice_ is PropagationSlice.GROUND:
        out = np.where(d_h <= 10.0, 1.0, np.exp(-(d_h - 10.0) / 1000.0))
    elif slice_ is PropagationSlice.OBSTRUCTED:
        d1, p1 = obstructed_plos_auxiliaries(h_uav_m)
        with np.errstate(divide="ignore", invalid="ignore"):
            far = d1 / d_h + np.exp(-d_h / p1) * (1.0 - d1 / d_h)
        out = np.where(d_h <= d1, 1.0, far)
    elif slice_ is PropagationSlice.HIGH_ALTITUDE:
        out = np.ones_like(d_h)
    else:
        raise DomainError(f"LOS probability undefined for slice {slice_}")
    return float(out) if out.ndim == 0 else out


def p_los_of(g: LinkGeometry, model: PlosModel):
    if isinstance(model, FixedPlos):
        return model.p
    if isinstance(model, BuildingPlos):
        return p_los_building(g, model.environment)
    if isinstance(model, ThreeGppPlos):
        slice_ = slice_of(g.h_uav, model.environment)
        return p_los_3gpp(g.d_h, g.h_uav, slice_)
    raise DomainError(f"unknown LOS probability model {model!r}")


# ---------------------------------------------------------------------------
# 3GPP-style rural-macro path loss
# ---------------------------------------------------------------------------

def rma_breakpoint_m(h_uav_m, h_g_m, f_c_ghz):
    """Breakpoint distance d2 = 2 pi h_uav h_g f_c / c."""
    return 2.0 * math.pi * h_uav_m * h_g_m * (f_c_ghz * 1e9) / _C_3GPP


def rma_ground_los_db(d_3d_m, h_uav_m, h_g_m, f_c_ghz):
    """Ground-slice LOS loss, continuous across the breakpoint.

    Below d2 this is Lambda_1; above, Lambda_2 = Lambda_1(d2) + 40 log10(d/d2).
    """
    d = np.asarray(d_3d_m, dtype=float)
    d2 = rma_breakpoint_m(h_uav_m, h_g_m, f_c_ghz)

    def lam1(dd):
        return (20.0 * np.log10(40.0 * np.pi * dd * f_c_ghz / 3.0)
                + min(0.03 * h_uav_m ** 1.72, 10.0) * np.log10(dd)
                - min(0.044 * h_uav_m ** 1.72, 14.77)
                + 0.002 * dd * math.log10(h_uav_m))

    out = np.where(d <= d2, lam1(d), lam1(d2) + 40.0 * np.log10(d / d2))
    return float(out) if out.ndim == 0 else out


def rma_ground_nlos_db(d_3d_m, h_uav_m, h_g_m, f_c_ghz, env: Environment):
    """Ground-slice NLOS loss: max of the LOS loss and the NLOS fit."""
    d = np.asarray(d_3d_m, dtype=float)
    w = env.street_width_m
    h_b = env.mean_building_height_m
    nlos = (161.04 - 7.1 * math.log10(w) + 7.5 * math.log10(h_b)
            - (24.37 - 3.7 * (h_b / h_g_m) ** 2) * math.log10(h_g_m)
            + (43.42 - 3.1 * math.log10(h_g_m)) * (np.log10(d) - 3.0)
            + 20.0 * math.log10(f_c_ghz)
            - (3.2 * math.log10(11.75 * h_uav_m) ** 2 - 4.97))
    out = np.maximum(rma_ground_los_db(d, h_uav_m, h_g_m, f_c_ghz), nlos)
    return float(out) if out.ndim == 0 else out


def aerial_los_db(d_3d_m, h_uav_m, f_c_ghz):
    """Obstructed/high-altitude slice LOS loss."""
    d = np.asarray(d_3d_m, dtype=float)
    slope = max(23.9 - 1.8 * math.log10(h_uav_m), 20.0)
    out = slope * np.log10(d) + 20.0 * math.log10(40.0 * np.pi * f_c_ghz / 3.0)
    return float(out) if out.ndim == 0 else out


def aerial_nlos_db(d_3d_m, h_uav_m, f_c_ghz):
    """Obstructed/high-altitude slice NLOS loss (never below the LOS loss)."""
    d = np.asarray(d_3d_m, dtype=float)
    nlos = (-12.0 + (35.0 - 5.3 * math.log10(h_uav_m)) * np.log10(d)
            + 20.0 * math.log10(40.0 * np.pi * f_c_ghz / 3.0))
    out = np.maximum(aerial_los_db(d, h_uav_m, f_c_ghz), nlos)
    return float(out) if out.ndim == 0 else out


# stated validity windows for the ground-slice fits
RMA_GROUND_LOS_RANGE_M = (10.0, 10_000.0)
RMA_GROUND_NLOS_RANGE_M = (10.0, 5_000.0)


def _check_range(d_h, lo, hi, what):
    bad_lo = np.any(np.asarray(d_h) < lo)
    bad_hi = np.any(np.asarray(d_h) > hi)
    if bad_lo or bad_hi:
        raise ApplicabilityError(
            f"{what} valid for {lo} m <= d_h <= {hi} m",
            quantity="d_h", value=float(np.min(d_h) if bad_lo else np.max(d_h)),
            bound=lo if bad_lo else hi)


def pl_3gpp_rural_db(g: LinkGeometry, f_c_ghz: float, env: Environment,
                     los: bool, slice_: PropagationSlice):
    """Slice-appropriate 3GPP-style path loss for one link."""
    if slice_ is PropagationSlice.GROUND:
        if los:
            _check_range(g.d_h, *RMA_GROUND_LOS_RANGE_M, what="ground-slice LOS")
            return rma_ground_los_db(g.d_3d, g.h_uav, g.h_g, f_c_ghz)
        _check_range(g.d_h, *RMA_GROUND_NLOS_RANGE_M, what="ground-slice NLOS")
        return rma_ground_nlos_db(g.d_3d, g.h_uav, g.h_g, f_c_ghz, env)
    if slice_ in (PropagationSlice.OBSTRUCTED, PropagationSlice.HIGH_ALTITUDE):
        if los:
            return aerial_los_db(g.d_3d, g.h_uav, f_c_ghz)
        return aerial_nlos_db(g.d_3d, g.h_uav, f_c_ghz)
    raise DomainError("air-to-air links use the free-space model")


# ---------------------------------------------------------------------------
# Shadowing table
# ---------------------------------------------------------------------------

def shadowing_sigma_db(slice_: PropagationSlice, los: bool, d_h_m: float,
                       h_uav_m: float, h_g_m: float = None, f_c_ghz: float = None):
    """Large-scale fading standard deviation per the model table."""
    if slice_ is PropagationSlice.GROUND:
        if not los:
            return 8.0
        if h_g_m is None or f_c_ghz is None:
            raise DomainError("ground-slice LOS sigma needs h_g and f_c for the breakpoint")
        d2 = rma_breakpoint_m(h_uav_m, h_g_m, f_c_ghz)
        return 4.0 if d_h_m <= d2 else 6.0
    if slice_ is PropagationSlice.OBSTRUCTED:
        if los:
            return 4.2 * math.exp(-0.00046 * h_uav_m)
        return 6.0
    if slice_ is PropagationSlice.HIGH_ALTITUDE:
        if los:
            return 4.2 * math.exp(-0.00046 * h_uav_m)
        raise ModelGapError("no NLOS shadowing model at high altitude")
    raise ModelGapError(f"no shadowing table entry for slice {slice_}")


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def path_loss_db(g: LinkGeometry, spec: PathLossSpec, los: bool = None):
    """Evaluate any path-loss spec for one link.

    For ThreeGppRural the LOS flag is mandatory; for LosNlosAveraged a flag
    selects the branch while None returns the probability-averaged loss.
    """
    if isinstance(spec, FreeSpace):
        return free_space_pl_db(g, spec)
    if isinstance(spec, LogDistance):
        return log_distance_pl_db(g, spec)
    if isinstance(spec, ThreeGppRural):
        if los is None:
            raise DomainError("ThreeGppRural path loss needs a LOS flag")
        slice_ = slice_of(g.h_uav, spec.environment)
        return pl_3gpp_rural_db(g, spec.carrier.ghz, spec.environment, los, slice_)
    if isinstance(spec, LosNlosAveraged):
        if los is True:
            return path_loss_db(g, spec.los, los=True)
        if los is False:
            return path_loss_db(g, spec.nlos, los=False)
        p = p_los_of(g, spec.plos)
        return averaged_pl_db(path_loss_db(g, spec.los, los=True),
                              path_loss_db(g, spec.nlos, los=False), p)
    raise DomainError(f"unknown path-loss spec {spec!r}")


def averaged_pl_db(pl_los_db, pl_nlos_db, p_los, linear_domain: bool = False):
    """P_LOS-weighted loss, on dB values as the model is written.

    linear_domain=True instead averages the linear power gains and converts
    back to dB.
    """
    p = np.asarray(p_los, dtype=float)
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise DomainError("LOS probability must be in [0, 1]")
    if linear_domain:
        g = (p * 10.0 ** (-np.asarray(pl_los_db) / 10.0)
             + (1.0 - p) * 10.0 ** (-np.asarray(pl_nlos_db) / 10.0))
        out = -10.0 * np.log10(g)
    else:
        out = p * np.asarray(pl_los_db) + (1.0 - p) * np.asarray(pl_nlos_db)
    return float(out) if np.ndim(out) == 0 else out


def shadowing_sigma_for(g: LinkGeometry, spec, los: bool):
    """Shadowing std attached to a spec (explicit sigma, table, or zero)."""
    if isinstance(spec, LogDistance):
        return spec.sigma_db
    if isinstance(spec, FreeSpace):
        return 0.0
    if isinstance(spec, ThreeGppRural):
        slice_ = slice_of(g.h_uav, spec.environment)
        return shadowing_sigma_db(slice_, los, g.d_h, g.h_uav,
                                  h_g_m=g.h_g, f_c_ghz=spec.carrier.ghz)
    raise DomainError(f"no shadowing rule for spec {spec!r}")


# Measured log-distance parameterizations, one entry per source row.
# Ranges are (lo, hi); a preset with a range never picks a value silently:
# the constructor below requires an explicit choice inside the range.
MEASURED_LOG_DISTANCE_ROWS = {
    "suburban_open_wideband": {"eta": (2.54, 3.037), "lambda0_db": (21.9, 34.9),
                               "sigma_db": (2.79, 5.3)},
    "suburban_open_narrowband": {"eta": (2.2, 2.6)},
    "open_field_2ghz": {"eta": 2.01},
    "urban_high_sigma": {"eta": 4.1, "sigma_db": 5.24},
    "suburban_low_eta": {"eta": (2.0, 2.25)},
    "l_band_968mhz": {"f_ghz": 0.968, "eta": 1.6, "lambda0_db": 102.3},
    "c_band_5060mhz": {"f_ghz": 5.06, "eta": 1.9, "lambda0_db": 113.9},
    "l_band_968mhz_alt": {"f_ghz": 0.968, "eta": 1.7, "lambda0_db": (98.2, 99.4),
                          "sigma_db": (2.6, 3.1)},
    "c_band_5060mhz_alt": {"f_ghz": 5.06, "eta": (1.5, 2.0),
                           "lambda0_db": (110.4, 116.7), "sigma_db": (2.9, 3.2)},
    "over_sea": {"eta": (1.4, 2.46), "lambda0_db": (19.0, 129.0)},
    "mountains": {"eta": (1.0, 1.8), "lambda0_db": (96.1, 123.9), "sigma_db": (2.2, 3.9)},
    "urban_los_28ghz": {"f_ghz": 28.0, "eta": 2.1, "sigma_db": 3.6},
    "urban_nlos_28ghz": {"f_ghz": 28.0, "eta": 3.4, "sigma_db": 9.7},
    "urban_los_38ghz": {"f_ghz": 38.0, "eta": (1.9, 2.0), "sigma_db": (1.8, 4.4)},
    "urban_nlos_38ghz": {"f_ghz": 38.0, "eta": (2.2, 2.8), "sigma_db": (4.1, 10.8)},
    "urban_los_73ghz": {"f_ghz": 73.0, "eta": 2.0, "sigma_db": (4.2, 5.2)},
    "urban_nlos_73ghz": {"f_ghz": 73.0, "eta": (3.3, 3.5), "sigma_db": (7.6, 7.9)},
}


def _resolve_preset_field(row, name, field, explicit):
    spec = row.get(field)
    if spec is None:
        return explicit
    if isinstance(spec, tuple):
        if explicit is None:
            raise DomainError(
                f"preset {name!r} gives a range {spec} for {field}; pick a value")
        if not spec[0] <= explicit <= spec[1]:
            raise DomainError(
                f"{field}={explicit} outside the measured range {spec} of {name!r}")
        return explicit
    if explicit is not None and explicit != spec:
        raise DomainError(f"preset {name!r} fixes {field}={spec}")
    return spec


def log_distance_from_preset(name: str, frequency_hz: float = None, *,
                             eta: float = None, lambda0_db: float = None,
                             sigma_db: float = None, d0_m: float = 1.0) -> LogDistance:
    """Build a LogDistance from a measured row, requiring explicit picks
    wherever the source reports a range."""
    row = MEASURED_LOG_DISTANCE_ROWS.get(name)
    if row is None:
        raise DomainError(f"unknown measured preset {name!r}")
    if frequency_hz is None:
        if "f_ghz" not in row:
            raise DomainError(f"preset {name!r} needs an explicit carrier frequency")
        frequency_hz = row["f_ghz"] * 1e9
    eta = _resolve_preset_field(row, name, "eta", eta)
    lambda0_db = _resolve_preset_field(row, name, "lambda0_db", lambda0_db)
    sigma_db = _resolve_preset_field(row, name, "sigma_db", sigma_db)
    return LogDistance(carrier=Carrier(frequency_hz), eta=eta,
                       lambda0_db=lambda0_db, d0_m=d0_m,
                       sigma_db=0.0 if sigma_db is None else sigma_db)


def sample_link_loss_db(g: LinkGeometry, spec: LosNlosAveraged, rng: RngLike,
                        fading: FadingModel = None, fading_nlos: FadingModel = None,
                        n: int = None):
    """Draw total link loss H = PL + X_LS - 10 log10(X_SS) and the LOS flag.

    `fading` applies to LOS links (and NLOS too unless `fading_nlos` is
    given); None drops the small-scale term. Returns (loss_db, los_flag),
    arrays when n is given.
    """
    gen = as_generator(rng)
    size = n if n is not None else 1
    p = p_los_of(g, spec.plos)
    flags = gen.random(size) < p
    loss = np.empty(size, dtype=float)
    for state in (True, False):
        idx = np.nonzero(flags == state)[0]
        if idx.size == 0:
            continue
        branch = spec.los if state else spec.nlos
        pl = path_loss_db(g, branch, los=state)
        sigma = shadowing_sigma_for(g, branch, state)
        shad = gen.normal(0.0, sigma, idx.size) if sigma > 0 else 0.0
        model = fading if state else (fading_nlos or fading)
        if model is not None:
            gains = sample_fading(model, gen, idx.size)
            fade_db = -10.0 * np.log10(gains)
        else:
            fade_db = 0.0
        loss[idx] = pl + shad + fade_db
    if n is None:
        return float(loss[0]), bool(flags[0])
    return loss, flags
