"""Aerial-UE performance under a Poisson field of sector base stations.

Monte Carlo trials are independent work units keyed by (seed, trial index),
so estimates are bit-exact for any thread count or evaluation order. Each
trial deploys a fresh HPPP snapshot, draws one LOS state and one fading gain
per base station (shared by its three co-sited sectors), associates the UE
with the strongest mean received power, and forms the SINR against the sum
of all remaining sectors plus noise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence

import numpy as np

from .antenna_geometry import ConeUav, OmniUav, SectorAntenna, UavAntenna
from .channel import Environment, _p_los_building_heights, urban
from .errors import DomainError
from .numerics import (
    FadingModel,
    Nakagami,
    RngLike,
    RngStream,
    as_generator,
    chebyshev_capacity_nodes,
    sample_fading,
)

SPEED_OF_LIGHT = 299_792_458.0


def _default_sector() -> SectorAntenna:
    # downtilted macro sector; three of these at 120 degree spacing per site.
    # The 6 degree elevation beamwidth with 8 degree downtilt keeps the whole
    # sky in the sidelobe region, so links to an elevated UE ride G_m.
    return SectorAntenna(azimuth=0.0, electrical_tilt=math.radians(8.0),
                         max_gain_dbi=16.0, beamwidth_3db=math.radians(65.0),
                         sidelobe_floor_db=20.0,
                         elevation_beamwidth_3db=math.radians(6.0))


@dataclass(frozen=True)
class AueNetworkConfig:
    """Scenario knobs for the aerial-UE coverage/capacity analysis.

    Exactly one of threshold_t (linear SINR) and target_rate_bps should be
    set; the rate converts through T = 2^(R/BW) - 1. `user_density` exists
    only for bookkeeping in scenario files; `aue_ratio_rho` is the fraction
    of users that are aerial in the area-spectral-efficiency mix.
    """

    frequency_hz: float = 1.8e9
    bs_density_per_km2: float = 5.0
    bs_height_m: float = 30.0
    p_tx_w: float = 20.0
    bw_hz: float = 20e6
    noise_density_w_per_hz: float = 3.98107170553497e-21   # -174 dBm/Hz
    noise_figure_db: float = 9.0
    noise_override_w: Optional[float] = None
    threshold_t: Optional[float] = 1.0
    target_rate_bps: Optional[float] = None
    uav: UavAntenna = field(default_factory=OmniUav)
    sector: SectorAntenna = field(default_factory=_default_sector)
    env: Environment = field(default_factory=urban)
    eta_los: float = 2.0
    eta_nlos: float = 3.5
    lambda0_los_db: Optional[float] = None    # None -> free-space at d0
    lambda0_nlos_db: Optional[float] = None   # None -> free-space + excess
    nlos_excess_db: float = 20.0              # urban extra blockage loss
    d0_m: float = 1.0
    fading_los: FadingModel = field(default_factory=lambda: Nakagami(3))
    fading_nlos: FadingModel = field(default_factory=lambda: Nakagami(1))
    aue_ratio_rho: float = 0.5
    user_density_per_km2: float = 20.0
    region_radius_m: float = 3000.0
    # 'two_level': G_M inside the downtilted main lobe, flat G_m above it
    # (links to an elevated UE ride the sidelobes); 'itu' keeps the full
    # quadratic elevation roll-off everywhere.
    bs_pattern: str = "two_level"

    def __post_init__(self):
        if self.bs_density_per_km2 <= 0:
            raise DomainError("BS density must be positive")
        if not 0.0 <= self.aue_ratio_rho <= 1.0:
            raise DomainError("aue_ratio_rho must be in [0, 1]")
        if self.region_radius_m <= 0:
            raise DomainError("region radius must be positive")

    @property
    def threshold(self) -> float:
        if self.threshold_t is not None:
            return self.threshold_t
        if self.target_rate_bps is not None:
            return 2.0 ** (self.target_rate_bps / self.bw_hz) - 1.0
        raise DomainError("set threshold_t or target_rate_bps")

    @property
    def noise_w(self) -> float:
        if self.noise_override_w is not None:
            return self.noise_override_w
        return (self.noise_density_w_per_hz
                * 10.0 ** (self.noise_figure_db / 10.0) * self.bw_hz)

    def reference_loss_db(self, los: bool) -> float:
        explicit = self.lambda0_los_db if los else self.lambda0_nlos_db
        if explicit is not None:
            return explicit
        wavelength = SPEED_OF_LIGHT / self.frequency_hz
        ref = 20.0 * math.log10(4.0 * math.pi * self.d0_m / wavelength)
        return ref if los else ref + self.nlos_excess_db


@dataclass
class NetworkSnapshot:
    """One HPPP realization: site coordinates plus per-site sector bearings.

    `realization` records the stream that produced the snapshot when one
    was given, purely for provenance.
    """

    xy: np.ndarray               # (n, 2) site positions, m
    height_m: float
    sector_azimuth: np.ndarray   # (n, 3) bearings, rad
    realization: Optional[RngStream] = None

    @property
    def n_sites(self) -> int:
        return int(self.xy.shape[0])


def deploy_hppp(cfg: AueNetworkConfig, rng: RngLike) -> NetworkSnapshot:
    """Draw a Poisson number of sites uniformly in the simulation disc."""
    gen = as_generator(rng)
    area_km2 = math.pi * cfg.region_radius_m ** 2 / 1e6
    n = int(gen.poisson(cfg.bs_density_per_km2 * area_km2))
    radius = cfg.region_radius_m * np.sqrt(gen.random(n))
    angle = gen.uniform(0.0, 2.0 * math.pi, n)
    xy = np.column_stack([radius * np.sin(angle), radius * np.cos(angle)])
    rotation = gen.uniform(0.0, 2.0 * math.pi, n)
    sector_azimuth = rotation[:, None] + np.array([0.0, 2.0, 4.0]) * math.pi / 3.0
    return NetworkSnapshot(xy=xy, height_m=cfg.bs_height_m,
                           sector_azimuth=sector_azimuth,
                           realization=rng if isinstance(rng, RngStream) else None)


@dataclass(frozen=True)
class SnapshotSinr:
    sinr: float
    serving_site: int     # -1 when nothing is received
    serving_sector: int
    los_serving: bool


def _sector_gains_db(cfg, snap, d_h, elevation, az_to_uav):
    daz = az_to_uav[:, None] - snap.sector_azimuth  # (n, 3)
    ant = cfg.sector
    daz = (daz + math.pi) % (2.0 * math.pi) - math.pi
    a_az = np.minimum(12.0 * (daz / ant.beamwidth_3db) ** 2, ant.sidelobe_floor_db)
    dele = elevation[:, None] + ant.downtilt
    a_el = np.minimum(12.0 * (dele / ant.elevation_beamwidth) ** 2,
                      ant.sidelobe_floor_db)
    att = np.minimum(a_az + a_el, ant.sidelobe_floor_db)
    gain = ant.max_gain_dbi - att
    if cfg.bs_pattern == "two_level":
        # outside the main lobe in elevation the upward sidelobes are taken
        # as direction-independent: every air link rides G_m
        lobe_edge = ant.elevation_beamwidth * math.sqrt(ant.sidelobe_floor_db / 12.0)
        sidelobe = np.abs(dele) > lobe_edge
        gain = np.where(sidelobe, ant.max_gain_dbi - ant.sidelobe_floor_db, gain)
    elif cfg.bs_pattern != "itu":
        raise DomainError(f"unknown BS pattern {cfg.bs_pattern!r}")
    return gain


def snapshot_sinr(uav_xyh, snap: NetworkSnapshot, cfg: AueNetworkConfig,
                  rng: RngLike, aim_cone_at_serving: bool = False) -> SnapshotSinr:
    """SINR of a UE at (x, y, h) against one snapshot.

    Draws an independent LOS state and fading gain per site, associates by
    the largest fade-free mean power, and returns SINR with the drawn
    fading applied. With `aim_cone_at_serving` a conical UE antenna is
    re-pointed at the site that serves under an omni antenna before gains
    are applied.
    """
    gen = as_generator(rng)
    x, y, h = uav_xyh
    if snap.n_sites == 0:
        return SnapshotSinr(0.0, -1, -1, False)

    dx = snap.xy[:, 0] - x
    dy = snap.xy[:, 1] - y
    d_h = np.hypot(dx, dy)
    dz = snap.height_m - h
    d_3d = np.hypot(d_h, dz)
    elevation_from_bs = np.arctan2(-dz, d_h)          # toward the UE
    az_from_bs = np.arctan2(-dx, -dy)
    az_from_uav = np.arctan2(dx, dy)
    el_from_uav = np.arctan2(dz, d_h)

    p_los = _p_los_building_heights(d_h, max(h, snap.height_m),
                                    min(h, snap.height_m), cfg.env)
    los = gen.random(snap.n_sites) < p_los

    eta = np.where(los, cfg.eta_los, cfg.eta_nlos)
    lam0 = np.where(los, cfg.reference_loss_db(True), cfg.reference_loss_db(False))
    d = np.maximum(d_3d, cfg.d0_m)
    pl_db = lam0 + 10.0 * eta * np.log10(d / cfg.d0_m)

    bs_gain = 10.0 ** (_sector_gains_db(cfg, snap, d_h, elevation_from_bs,
                                        az_from_bs) / 10.0)  # (n, 3) linear
    fading = np.where(
        los,
        sample_fading(cfg.fading_los, gen, snap.n_sites),
        sample_fading(cfg.fading_nlos, gen, snap.n_sites),
    )

    path_gain = 10.0 ** (-pl_db / 10.0)

    uav_ant = cfg.uav
    if aim_cone_at_serving and isinstance(uav_ant, ConeUav):
        mean_omni = cfg.p_tx_w * np.max(bs_gain, axis=1) * path_gain
        site0 = int(np.argmax(mean_omni))
        phi_t = 0.5 * math.pi + el_from_uav[site0]  # tilt from nadir
        uav_ant = replace(uav_ant, phi_t=float(phi_t),
                          tilt_azimuth=float(az_from_uav[site0]))

    if isinstance(uav_ant, OmniUav):
        g_uav = np.full(snap.n_sites, uav_ant.gain_linear)
    else:
        el_axis = uav_ant.axis_elevation
        cos_sep = (np.sin(el_from_uav) * math.sin(el_axis)
                   + np.cos(el_from_uav) * math.cos(el_axis)
                   * np.cos(az_from_uav - uav_ant.tilt_azimuth))
        sep = np.arccos(np.clip(cos_sep, -1.0, 1.0))
        inside = sep <= math.radians(uav_ant.phi_b_deg) / 2.0
        g_uav = np.where(inside, uav_ant.gain_linear, 0.0)

    # one effective transmitter per site: its strongest sector toward the UE
    # (the theory SINR carries a single P_Tx G Lambda X term per BS)
    sector = np.argmax(bs_gain, axis=1)
    site_gain = bs_gain[np.arange(snap.n_sites), sector]
    mean_rx = cfg.p_tx_w * site_gain * g_uav * path_gain   # (n,)
    if not np.any(mean_rx > 0.0):
        return SnapshotSinr(0.0, -1, -1, False)
    site = int(np.argmax(mean_rx))
    rx = mean_rx * fading
    signal = rx[site]
    interference = float(np.sum(rx)) - signal
    sinr = signal / (interference + cfg.noise_w)
    return SnapshotSinr(float(sinr), site, int(sector[site]), bool(los[site]))


# ---------------------------------------------------------------------------
# Monte Carlo estimators
# ---------------------------------------------------------------------------

def sinr_samples(uav_h: float, cfg: AueNetworkConfig, n_trials: int,
                 rng: RngStream, threads: int = 1,
                 aim_cone_at_serving: bool = False) -> np.ndarray:
    """n_trials independent SINR draws for a UE at the region center."""
    if n_trials < 1:
        raise DomainError("need at least one trial")

    def run(i: int) -> float:
        gen = rng.child_generator(i)
        snap = deploy_hppp(cfg, gen)
        return snapshot_sinr((0.0, 0.0, uav_h), snap, cfg, gen,
                             aim_cone_at_serving=aim_cone_at_serving).sinr

    if threads <= 1:
        return np.array([run(i) for i in range(n_trials)])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(run, range(n_trials))))


@dataclass(frozen=True)
class CoverageEstimate:
    estimate: float
    ci95: float
    n_trials: int


def coverage_probability_mc(uav_h: float, cfg: AueNetworkConfig, n_trials: int,
                            rng: RngStream, threshold: float = None,
                            threads: int = 1) -> CoverageEstimate:
    """Fraction of trials with SINR above the target, with a normal CI."""
    if n_trials < 100:
        raise DomainError("coverage estimation needs n_trials >= 100")
    t = cfg.threshold if threshold is None else threshold
    sinr = sinr_samples(uav_h, cfg, n_trials, rng, threads=threads)
    p = float(np.mean(sinr > t))
    ci = 1.96 * math.sqrt(max(p * (1.0 - p), 1e-12) / n_trials)
    return CoverageEstimate(p, ci, n_trials)


@dataclass(frozen=True)
class CapacityEstimate:
    bps_hz: float
    ci95: float
    n_trials: int


def capacity_from_pcov(pcov: Callable[[float], float], k_nodes: int,
                       t_max: float = None) -> float:
    """Quadrature (1/ln 2) sum w_n P_cov(t_n) / (1 + t_n) over the nodes.

    With t_max set, nodes above it are dropped, bounding the integral at
    ln(1 + t_max)/ln 2 when P_cov is identically one.
    """
    if k_nodes < 50:
        raise DomainError("capacity quadrature needs K >= 50 nodes")
    t, w = chebyshev_capacity_nodes(k_nodes)
    if t_max is not None:
        keep = t <= t_max
        t, w = t[keep], w[keep]
    vals = np.array([pcov(tn) for tn in t])
    return float(np.sum(w * vals / (1.0 + t)) / math.log(2.0))


def capacity(uav_h: float, cfg: AueNetworkConfig, n_trials: int,
             rng: RngStream, k_nodes: int = 200, t_max: float = None,
             threads: int = 1,
             aim_cone_at_serving: bool = False) -> CapacityEstimate:
    """Monte Carlo capacity via the coverage quadrature.

    The same SINR draws feed the empirical coverage at every node (common
    random numbers), which is exactly the quadrature applied per sample, so
    a per-sample spread gives the confidence interval.
    """
    if k_nodes < 50:
        raise DomainError("capacity quadrature needs K >= 50 nodes")
    sinr = sinr_samples(uav_h, cfg, n_trials, rng, threads=threads,
                        aim_cone_at_serving=aim_cone_at_serving)
    t, w = chebyshev_capacity_nodes(k_nodes)
    if t_max is not None:
        keep = t <= t_max
        t, w = t[keep], w[keep]
    coeff = w / (1.0 + t) / math.log(2.0)
    per_sample = (sinr[:, None] > t[None, :]) @ coeff
    mean = float(np.mean(per_sample))
    ci = 1.96 * float(np.std(per_sample)) / math.sqrt(n_trials)
    return CapacityEstimate(mean, ci, n_trials)


def ase(cfg: AueNetworkConfig, uav_h: float, n_trials: int, rng: RngStream,
        k_nodes: int = 200, threads: int = 1) -> float:
    """Area spectral efficiency lambda[(1-rho) R(1.5) + rho R(h)].

    Ground users always carry the 2.15 dBi omni antenna.
    """
    ground_cfg = replace(cfg, uav=OmniUav())
    r_ground = capacity(1.5, ground_cfg, n_trials, RngStream(rng.master_seed, rng.stream_index),
                        k_nodes=k_nodes, threads=threads).bps_hz
    r_aerial = capacity(uav_h, cfg, n_trials, RngStream(rng.master_seed, rng.stream_index),
                        k_nodes=k_nodes, threads=threads).bps_hz
    rho = cfg.aue_ratio_rho
    return cfg.bs_density_per_km2 * ((1.0 - rho) * r_ground + rho * r_aerial)


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    x: float
    value: float
    ci95: float


_SWEEP_AXES = ("altitude", "density", "phi_b", "phi_t")


def _cfg_for(cfg: AueNetworkConfig, axis: str, x: float) -> AueNetworkConfig:
    if axis == "altitude":
        return cfg
    if axis == "density":
        return replace(cfg, bs_density_per_km2=float(x))
    if axis == "phi_b":
        base = cfg.uav if isinstance(cfg.uav, ConeUav) else ConeUav(phi_b_deg=60.0)
        return replace(cfg, uav=replace(base, phi_b_deg=float(x)))
    if axis == "phi_t":
        if not isinstance(cfg.uav, ConeUav):
            raise DomainError("tilt sweep needs a conical UE antenna")
        return replace(cfg, uav=replace(cfg.uav, phi_t=float(x)))
    raise DomainError(f"unknown sweep axis {axis!r}")


def sweep(cfg: AueNetworkConfig, axis: str, grid: Sequence[float], uav_h: float,
          n_trials: int, rng: RngStream, metric: str = "capacity",
          k_nodes: int = 200, t_max: float = None,
          threads: int = 1) -> List[SweepPoint]:
    """Evaluate capacity or coverage across one swept parameter.

    Every grid point reuses the same per-trial streams (common random
    numbers), so a single-point sweep equals the direct metric call and
    cross-point orderings are paired comparisons.
    """
    if axis not in _SWEEP_AXES:
        raise DomainError(f"unknown sweep axis {axis!r}")
    if len(grid) == 0:
        raise DomainError("sweep grid must be nonempty")
    if metric not in ("capacity", "coverage"):
        raise DomainError(f"unknown sweep metric {metric!r}")

    points = []
    for x in grid:
        point_cfg = _cfg_for(cfg, axis, x)
        h = float(x) if axis == "altitude" else uav_h
        if metric == "coverage":
            est = coverage_probability_mc(h, point_cfg, n_trials, rng,
                                          threads=threads)
            points.append(SweepPoint(float(x), est.estimate, est.ci95))
        else:
            est = capacity(h, point_cfg, n_trials, rng, k_nodes=k_nodes,
                           t_max=t_max, threads=threads)
            points.append(SweepPoint(float(x), est.bps_hz, est.ci95))
    return points
