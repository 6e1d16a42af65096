"""Semi-deterministic map-based downlink simulator.

LOS/NLOS comes from ray casting against the heightmap; path loss then
follows the slice-appropriate statistical model. Everything is
deterministic: shadowing is off by default and no Monte Carlo is involved,
so rasters are bit-reproducible.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import channel as ch
from .antenna_geometry import Position3D, SectorAntenna, bs_gain_db
from .errors import DomainError, ScenarioError
from .heightmap import HeightMap, los_check
from .numerics import RngLike, as_generator

SECTOR_COUNT = 3


@dataclass(frozen=True)
class SectorSite:
    """Three-sector site; position is the mast top (roof + mast)."""

    position: Position3D
    p_tx_dbm: float = 46.0
    azimuth0: float = 0.0      # first sector bearing, rad (0 = north)
    antenna: SectorAntenna = field(default_factory=SectorAntenna)

    @property
    def sector_azimuths(self):
        return [self.azimuth0 + k * 2.0 * math.pi / SECTOR_COUNT
                for k in range(SECTOR_COUNT)]


def site_on_roof(hm: HeightMap, x: float, y: float, mast_m: float = 5.0,
                 **site_kwargs) -> SectorSite:
    """Place a site on the surface at (x, y), mast_m above the roof."""
    roof = float(hm.surface_at(x, y))
    return SectorSite(position=Position3D(x, y, roof + mast_m), **site_kwargs)


SITE_CSV_COLUMNS = ["x", "y", "roof_h", "p_tx_dbm", "azimuth0_deg",
                    "tilt_deg", "max_gain_dbi", "beamwidth_deg"]


def load_sites_csv(path) -> List[SectorSite]:
    """Site list: x,y,roof_h,p_tx_dbm,azimuth0_deg,tilt_deg,max_gain_dbi,beamwidth_deg."""
    sites = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(SITE_CSV_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ScenarioError(f"site CSV missing columns {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                vals = {k: float(row[k]) for k in SITE_CSV_COLUMNS}
            except (TypeError, ValueError):
                raise ScenarioError(f"bad numeric value in site CSV line {lineno}")
            ant = SectorAntenna(
                electrical_tilt=math.radians(vals["tilt_deg"]),
                max_gain_dbi=vals["max_gain_dbi"],
                beamwidth_3db=math.radians(vals["beamwidth_deg"]))
            sites.append(SectorSite(
                position=Position3D(vals["x"], vals["y"], vals["roof_h"] + 5.0),
                p_tx_dbm=vals["p_tx_dbm"],
                azimuth0=math.radians(vals["azimuth0_deg"]),
                antenna=ant))
    if not sites:
        raise ScenarioError("site CSV holds no sites")
    return sites


def save_sites_csv(sites: Sequence[SectorSite], path, mast_m: float = 5.0):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SITE_CSV_COLUMNS)
        for s in sites:
            writer.writerow([
                "%.9g" % s.position.x, "%.9g" % s.position.y,
                "%.9g" % (s.position.h - mast_m), "%.9g" % s.p_tx_dbm,
                "%.9g" % math.degrees(s.azimuth0),
                "%.9g" % math.degrees(s.antenna.downtilt),
                "%.9g" % s.antenna.max_gain_dbi,
                "%.9g" % math.degrees(s.antenna.beamwidth_3db)])


@dataclass(frozen=True)
class MapSimConfig:
    """Radio configuration for the map simulator.

    pl_model 'threegpp' uses the slice-aware statistical family with the
    map deciding LOS; 'free_space' applies the generalized Friis law with
    eta_los/eta_nlos. Distances below each formula's validity window are
    clamped to it (the map geometry can place users arbitrarily close).
    """

    frequency_hz: float = 1.8e9
    bandwidth_hz: float = 20e6
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 9.0
    env: ch.Environment = None
    ue_gain_dbi: float = 2.15
    pl_model: str = "threegpp"
    eta_los: float = 2.0
    eta_nlos: float = 3.5
    shadowing: bool = False

    def __post_init__(self):
        if self.pl_model not in ("threegpp", "free_space"):
            raise DomainError(f"unknown path-loss model {self.pl_model!r}")
        if self.env is None:
            object.__setattr__(self, "env", ch.urban())

    @property
    def noise_dbm(self) -> float:
        return (self.noise_density_dbm_hz
                + 10.0 * math.log10(self.bandwidth_hz) + self.noise_figure_db)


def _path_loss_db(cfg: MapSimConfig, d_h, d_3d, ue_h, site_h, los):
    """Vectorized slice-appropriate loss for one site (scalar heights)."""
    f_ghz = cfg.frequency_hz / 1e9
    if cfg.pl_model == "free_space":
        lam = ch.SPEED_OF_LIGHT / cfg.frequency_hz
        eta = cfg.eta_los if los else cfg.eta_nlos
        return 10.0 * eta * np.log10(4.0 * np.pi * np.maximum(d_3d, lam) / lam)
    slice_ = ch.slice_of(ue_h, cfg.env)
    if slice_ is ch.PropagationSlice.GROUND:
        lo, hi = (ch.RMA_GROUND_LOS_RANGE_M if los else ch.RMA_GROUND_NLOS_RANGE_M)
        d3 = np.clip(d_3d, lo, hi)
        if los:
            return ch.rma_ground_los_db(d3, ue_h, site_h, f_ghz)
        return ch.rma_ground_nlos_db(d3, ue_h, site_h, f_ghz, cfg.env)
    d3 = np.maximum(d_3d, 1.0)
    if los:
        return ch.aerial_los_db(d3, ue_h, f_ghz)
    return ch.aerial_nlos_db(d3, ue_h, f_ghz)


def received_power_dbm(site: SectorSite, sector_idx: int, ue: Position3D,
                       hm: HeightMap, cfg: MapSimConfig,
                       rng: Optional[RngLike] = None) -> float:
    """P_rx = P_tx + G_tx + G_rx - PL for one sector toward one location."""
    if not hm.contains(ue.x, ue.y):
        raise DomainError("evaluation point outside the map")
    los = los_check(site.position, ue, hm)
    dx = ue.x - site.position.x
    dy = ue.y - site.position.y
    d_h = math.hypot(dx, dy)
    d_3d = math.hypot(d_h, ue.h - site.position.h)
    pl = float(_path_loss_db(cfg, d_h, d_3d, ue.h, site.position.h, los))
    if cfg.shadowing:
        if rng is None:
            raise DomainError("shadowing draws need an RngStream")
        slice_ = ch.slice_of(ue.h, cfg.env)
        sigma = ch.shadowing_sigma_db(slice_, los, d_h, ue.h,
                                      h_g_m=site.position.h,
                                      f_c_ghz=cfg.frequency_hz / 1e9)
        pl += float(as_generator(rng).normal(0.0, sigma))
    from dataclasses import replace as _replace
    ant = _replace(site.antenna, azimuth=site.sector_azimuths[sector_idx])
    az = math.atan2(dx, dy)
    el = math.atan2(ue.h - site.position.h, d_h)
    g_tx = float(bs_gain_db(ant, az, el))
    return site.p_tx_dbm + g_tx + cfg.ue_gain_dbi - pl


@dataclass
class SinrGrid:
    """Raster result: SINR (dB) and serving sector per evaluated cell."""

    sinr_db: np.ndarray
    serving: np.ndarray          # flat sector index site*3+k, -1 outside
    x: np.ndarray
    y: np.ndarray
    ue_height_m: float

    def coverage_fraction(self, threshold_db: float = -6.0) -> float:
        vals = self.sinr_db[np.isfinite(self.sinr_db)]
        if vals.size == 0:
            return 0.0
        return float(np.mean(vals >= threshold_db))


def _sector_rx_dbm_grid(site, sector_az, cfg, hm, xs, ys, ue_h, los_mask):
    xx, yy = np.meshgrid(xs, ys)
    dx = xx - site.position.x
    dy = yy - site.position.y
    d_h = np.hypot(dx, dy)
    d_3d = np.hypot(d_h, ue_h - site.position.h)
    pl = np.where(
        los_mask,
        _path_loss_db(cfg, d_h, d_3d, ue_h, site.position.h, True),
        _path_loss_db(cfg, d_h, d_3d, ue_h, site.position.h, False))
    ant = site.antenna
    az = np.arctan2(dx, dy)
    el = np.arctan2(ue_h - site.position.h, d_h)
    daz = (az - sector_az + np.pi) % (2.0 * np.pi) - np.pi
    a_az = np.minimum(12.0 * (daz / ant.beamwidth_3db) ** 2, ant.sidelobe_floor_db)
    dele = el + ant.downtilt
    a_el = np.minimum(12.0 * (dele / ant.elevation_beamwidth) ** 2,
                      ant.sidelobe_floor_db)
    g_tx = ant.max_gain_dbi - np.minimum(a_az + a_el, ant.sidelobe_floor_db)
    return site.p_tx_dbm + g_tx + cfg.ue_gain_dbi - pl


def sinr_grid(sites: Sequence[SectorSite], hm: HeightMap, ue_height_m: float,
              cfg: MapSimConfig, stride: int = 1) -> SinrGrid:
    """SINR and serving-sector rasters at cell centers (optionally strided).

    All sectors of all sites transmit; the serving sector maximizes SINR
    (equivalently received power), ties to the lowest flat index. Cells
    whose evaluation point sits at or below the surface are obstructed for
    every link, which puts them in outage rather than excluding them.
    """
    if len(sites) == 0:
        raise DomainError("need at least one site")
    xs_all, ys_all = hm.cell_centers()
    xs = xs_all[::stride]
    ys = ys_all[::stride]
    rx_layers = []
    for site in sites:
        los_flat = np.array([
            los_check(site.position, Position3D(float(x), float(y), ue_height_m), hm)
            for y in ys for x in xs])
        los_mask = los_flat.reshape(len(ys), len(xs))
        for sector_az in site.sector_azimuths:
            rx_layers.append(_sector_rx_dbm_grid(site, sector_az, cfg, hm,
                                                 xs, ys, ue_height_m, los_mask))
    rx = np.stack(rx_layers)                        # (n_sectors, ny, nx)
    rx_lin = 10.0 ** (rx / 10.0)
    total = np.sum(rx_lin, axis=0)
    noise = 10.0 ** (cfg.noise_dbm / 10.0)
    serving = np.argmax(rx_lin, axis=0)
    best = np.take_along_axis(rx_lin, serving[None], axis=0)[0]
    sinr = best / (total - best + noise)
    return SinrGrid(sinr_db=10.0 * np.log10(np.maximum(sinr, 1e-30)),
                    serving=serving, x=xs, y=ys, ue_height_m=ue_height_m)


def coverage_vs_altitude(sites, hm, heights: Sequence[float], cfg: MapSimConfig,
                         threshold_db: float = -6.0, stride: int = 1):
    """[(h, covered fraction at SINR >= threshold_db)] per requested height."""
    if len(heights) == 0:
        raise DomainError("height list must be nonempty")
    out = []
    for h in heights:
        grid = sinr_grid(sites, hm, float(h), cfg, stride=stride)
        out.append((float(h), grid.coverage_fraction(threshold_db)))
    return out


def p_los_vs_altitude(sites, hm, heights: Sequence[float], stride: int = 1):
    """Fraction of cells with LOS to at least one site, per height."""
    xs_all, ys_all = hm.cell_centers()
    xs = xs_all[::stride]
    ys = ys_all[::stride]
    out = []
    for h in heights:
        any_los = np.zeros((len(ys), len(xs)), dtype=bool)
        for site in sites:
            flat = np.array([
                los_check(site.position, Position3D(float(x), float(y), float(h)), hm)
                for y in ys for x in xs])
            any_los |= flat.reshape(len(ys), len(xs))
        out.append((float(h), float(np.mean(any_los))))
    return out
