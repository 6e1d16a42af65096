"""Command-line front end: run a scenario file, emit CSV tables and rasters.

Every run is reproducible: identical seeds give byte-identical outputs for
any thread count, because all Monte Carlo work is keyed per work unit.
Floats print with 9 significant digits.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import abs_net, aue_net, localization as loc, mapsim as ms
from . import channel as ch
from .antenna_geometry import ConeUav, LinkGeometry, OmniUav, SectorAntenna
from .errors import DomainError, ScenarioError
from .heightmap import load_ascii_grid, save_ascii_grid, synthetic_city
from .numerics import Nakagami, RngStream, dbm_to_watt
from .scenario import Scenario, load_scenario

FMT = "%.9g"


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return FMT % value


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    return path


def _environment(block) -> ch.Environment:
    preset = block.get("preset", "urban")
    if preset != "custom":
        env = {"suburban": ch.suburban, "urban": ch.urban,
               "dense_urban": ch.dense_urban, "highrise": ch.highrise}[preset]()
        overrides = {k: v for k, v in block.items()
                     if k not in ("preset",) and v is not None}
        if overrides:
            env = ch.Environment(
                kind=overrides.get("kind", env.kind),
                varsigma=overrides.get("varsigma", env.varsigma),
                xi=overrides.get("xi", env.xi),
                omega=overrides.get("omega", env.omega),
                mean_building_height_m=overrides.get(
                    "mean_building_height_m", env.mean_building_height_m),
                street_width_m=overrides.get("street_width_m", env.street_width_m))
        return env
    required = ("kind", "varsigma", "xi", "omega")
    for key in required:
        if block.get(key) is None:
            raise ScenarioError("custom environment needs kind, varsigma, xi, omega",
                                f"environment.{key}")
    omega = block["omega"]
    return ch.Environment(
        kind=block["kind"], varsigma=block["varsigma"], xi=block["xi"],
        omega=omega,
        mean_building_height_m=block.get("mean_building_height_m")
        or omega * math.sqrt(math.pi / 2.0),
        street_width_m=block.get("street_width_m") or 20.0)


def _aue_config(block) -> aue_net.AueNetworkConfig:
    if block["antenna"] == "omni":
        uav = OmniUav(block["omni_gain_dbi"])
    else:
        uav = ConeUav(phi_b_deg=block["phi_b_deg"],
                      phi_t=math.radians(block["phi_t_deg"]))
    sector = SectorAntenna(
        electrical_tilt=math.radians(block["sector_downtilt_deg"]),
        max_gain_dbi=block["sector_max_gain_dbi"],
        beamwidth_3db=math.radians(block["sector_beamwidth_deg"]),
        sidelobe_floor_db=block["sector_sidelobe_floor_db"],
        elevation_beamwidth_3db=math.radians(
            block["sector_elevation_beamwidth_deg"]))
    threshold = None
    rate = None
    if block["target_rate_mbps"] is not None:
        rate = block["target_rate_mbps"] * 1e6
    else:
        threshold = 10.0 ** (block["threshold_db"] / 10.0)
    return aue_net.AueNetworkConfig(
        frequency_hz=block["frequency_ghz"] * 1e9,
        bs_density_per_km2=block["bs_density_per_km2"],
        bs_height_m=block["bs_height_m"],
        p_tx_w=dbm_to_watt(block["p_tx_dbm"]),
        bw_hz=block["bandwidth_mhz"] * 1e6,
        noise_density_w_per_hz=dbm_to_watt(block["noise_density_dbm_hz"]),
        noise_figure_db=block["noise_figure_db"],
        noise_override_w=(dbm_to_watt(block["noise_override_dbm"])
                          if block["noise_override_dbm"] is not None else None),
        threshold_t=threshold,
        target_rate_bps=rate,
        uav=uav,
        sector=sector,
        env=_environment(block["environment"]),
        eta_los=block["eta_los"],
        eta_nlos=block["eta_nlos"],
        nlos_excess_db=block["nlos_excess_db"],
        fading_los=Nakagami(block["fading_m_los"]),
        fading_nlos=Nakagami(block["fading_m_nlos"]),
        aue_ratio_rho=block["aue_ratio_rho"],
        region_radius_m=block["region_radius_m"],
    )


# ---------------------------------------------------------------------------
# Command runners
# ---------------------------------------------------------------------------

def _run_channel_table(s: Scenario, out_dir: Path, threads: int):
    block = s.params["channel"]
    env = _environment(block["environment"])
    f_ghz = block["frequency_ghz"]
    h_g = block["h_g_m"]
    rows = []
    for h in block["altitudes_m"]:
        slice_ = ch.slice_of(h, env)
        for d_h in block["distances_m"]:
            hi, lo = max(h, h_g), min(h, h_g)
            d_3d = math.hypot(d_h, h - h_g)
            p_build = ch._p_los_building_heights(d_h, hi, lo, env)
            p_3gpp = ch.p_los_3gpp(d_h, h, slice_)
            g = LinkGeometry(d_h=d_h, d_3d=d_3d, h_uav=h, h_g=h_g,
                             theta=math.atan2(h - h_g, d_h))
            def pl(los):
                try:
                    return ch.pl_3gpp_rural_db(g, f_ghz, env, los, slice_)
                except DomainError:
                    return float("nan")
            def sigma(los):
                try:
                    return ch.shadowing_sigma_db(slice_, los, d_h, h,
                                                 h_g_m=h_g, f_c_ghz=f_ghz)
                except DomainError:
                    return float("nan")
            pl_l, pl_n = pl(True), pl(False)
            avg = (ch.averaged_pl_db(pl_l, pl_n, float(p_3gpp))
                   if not (math.isnan(pl_l) or math.isnan(pl_n)) else float("nan"))
            rows.append([h, d_h, slice_.value, float(p_build), float(p_3gpp),
                         pl_l, pl_n, avg, sigma(True), sigma(False)])
    return [_write_csv(out_dir / "channel_table.csv",
                       ["h_uav_m", "d_h_m", "slice", "p_los_building",
                        "p_los_3gpp", "pl_los_db", "pl_nlos_db", "pl_avg_db",
                        "sigma_los_db", "sigma_nlos_db"], rows)]


def _run_aue_coverage(s: Scenario, out_dir: Path, threads: int):
    cfg = _aue_config(s.params["aue"])
    run = s.params["run"]
    rows = []
    for i, h in enumerate(run["altitudes_m"]):
        sinr = aue_net.sinr_samples(h, cfg, run["n_trials"],
                                    RngStream(s.seed, i), threads=threads)
        for t_db in run["thresholds_db"]:
            t = 10.0 ** (t_db / 10.0)
            p = float(np.mean(sinr > t))
            ci = 1.96 * math.sqrt(max(p * (1 - p), 1e-12) / run["n_trials"])
            rows.append([h, t_db, p, ci])
    return [_write_csv(out_dir / "aue_coverage.csv",
                       ["h_m", "threshold_db", "p_cov", "ci95"], rows)]


def _run_aue_sweep(s: Scenario, out_dir: Path, threads: int):
    cfg = _aue_config(s.params["aue"])
    sw = s.params["sweep"]
    t_max = None
    if sw["t_max_db"] is not None:
        t_max = 10.0 ** (sw["t_max_db"] / 10.0)
    points = aue_net.sweep(cfg, sw["axis"], sw["grid"], uav_h=sw["uav_h_m"],
                           n_trials=sw["n_trials"], rng=RngStream(s.seed, 0),
                           metric=sw["metric"], k_nodes=sw["k_nodes"],
                           t_max=t_max, threads=threads)
    rows = [[p.x, p.value, p.ci95] for p in points]
    return [_write_csv(out_dir / "aue_sweep.csv", ["x", "metric", "ci95"], rows)]


def _run_abs_design(s: Scenario, out_dir: Path, threads: int):
    b = s.params["abs"]
    prof = abs_net.urban_abs_profile(
        k0_db=b["k0_db"], k90_db=b["k90_db"], eta0=b["eta0"], eta90=b["eta90"],
        antenna_gain=10.0 ** (b["antenna_gain_db"] / 10.0),
        noise_w=dbm_to_watt(b["noise_dbm"]),
        threshold_t=10.0 ** (b["threshold_db"] / 10.0))
    rows = []
    for h in b["altitudes_m"]:
        design = abs_net.AbsDesign(h, b["r_c_m"], b["epsilon"])
        p_req = abs_net.required_power(design, prof)
        gain = abs_net.power_gain(h, b["r_c_m"], b["epsilon"], prof)
        srg = abs_net.sum_rate_gain(h, prof, design)
        rows.append([h, b["r_c_m"], p_req, gain, srg])
    return [_write_csv(out_dir / "abs_design.csv",
                       ["h_m", "r_c_m", "p_req_w", "power_gain",
                        "sum_rate_gain"], rows)]


def _run_localize(s: Scenario, out_dir: Path, threads: int):
    b = s.params["localize"]
    chan = loc.ElevationChannel(
        a_los=b["a_los"], b_los=b["b_los"], a_nlos=b["a_nlos"],
        b_nlos=b["b_nlos"], a_o=b["a_o"], b_o=b["b_o"],
        eta_los=b["eta_los"], eta_nlos=b["eta_nlos"],
        frequency_hz=b["frequency_ghz"] * 1e9)
    scen = loc.LocalizationScenario(n_users=b["n_users"],
                                    user_area_radius_m=b["user_area_radius_m"])
    rows = []
    task = 0
    for h in b["altitudes_m"]:
        for radius in b["radii_m"]:
            for m in b["m_points"]:
                plan = loc.AnchorPlan(m, radius, h)
                res = loc.run_campaign(scen, plan, chan,
                                       RngStream(s.seed, task),
                                       trials_per_user=b["trials_per_user"],
                                       state_mode=b["state_mode"])
                rows.append([h, radius, m, res.mean_error_m, res.p50_m,
                             res.p90_m])
                task += 1
    return [_write_csv(out_dir / "localize.csv",
                       ["h_m", "R_m", "M", "mean_err_m", "p50_m", "p90_m"],
                       rows)]


def _auto_site_positions(extent, count):
    # deterministic quarter-point style layout, center last
    if count == 1:
        return [(extent / 2, extent / 2)]
    pts = [(extent * 0.25, extent * 0.25), (extent * 0.75, extent * 0.25),
           (extent * 0.25, extent * 0.75), (extent * 0.75, extent * 0.75),
           (extent * 0.5, extent * 0.5), (extent * 0.5, extent * 0.25),
           (extent * 0.5, extent * 0.75), (extent * 0.25, extent * 0.5),
           (extent * 0.75, extent * 0.5)]
    return pts[:count]


def _run_mapsim(s: Scenario, out_dir: Path, threads: int):
    b = s.params["mapsim"]
    env = _environment(b["environment"])
    if b["heightmap"] is not None:
        hm = load_ascii_grid(b["heightmap"])
    else:
        syn = b["synthetic"]
        hm = synthetic_city(syn["extent_m"], syn["cellsize_m"],
                            _environment(syn["environment"]),
                            RngStream(s.seed, 1000),
                            min_height_m=syn["min_height_m"])
    if b["sites_csv"] is not None:
        sites = ms.load_sites_csv(b["sites_csv"])
    else:
        auto = b["auto_sites"]
        x0, x1, y0, y1 = hm.extent
        ant = SectorAntenna(
            electrical_tilt=math.radians(auto["downtilt_deg"]),
            max_gain_dbi=auto["max_gain_dbi"],
            beamwidth_3db=math.radians(auto["beamwidth_deg"]))
        sites = [ms.site_on_roof(hm, x0 + px, y0 + py, mast_m=auto["mast_m"],
                                 p_tx_dbm=auto["p_tx_dbm"], antenna=ant)
                 for px, py in _auto_site_positions(x1 - x0, auto["count"])]
    cfg = ms.MapSimConfig(frequency_hz=b["frequency_ghz"] * 1e9,
                          bandwidth_hz=b["bandwidth_mhz"] * 1e6,
                          noise_figure_db=b["noise_figure_db"],
                          env=env, pl_model=b["pl_model"])
    written = []
    rows = []
    plos = dict(ms.p_los_vs_altitude(sites, hm, b["heights_m"],
                                     stride=b["stride"]))
    for h in b["heights_m"]:
        grid = ms.sinr_grid(sites, hm, float(h), cfg, stride=b["stride"])
        rows.append([h, grid.coverage_fraction(b["threshold_db"]), plos[h]])
        if b["emit_rasters"]:
            from .heightmap import HeightMap
            raster = HeightMap(heights=grid.sinr_db[::-1, :],
                               cellsize=hm.cellsize * b["stride"],
                               xllcorner=hm.xllcorner, yllcorner=hm.yllcorner)
            path = out_dir / f"sinr_h{_fmt(h)}.asc"
            save_ascii_grid(raster, path)
            written.append(path)
    written.insert(0, _write_csv(
        out_dir / "mapsim_summary.csv",
        ["h_m", "coverage_fraction", "p_los_any"], rows))
    return written


_RUNNERS = {
    "channel-table": _run_channel_table,
    "aue-coverage": _run_aue_coverage,
    "aue-sweep": _run_aue_sweep,
    "abs-design": _run_abs_design,
    "localize": _run_localize,
    "mapsim": _run_mapsim,
}


def run_scenario(s: Scenario, out_dir, threads: int = 1):
    """Execute a validated scenario; returns the list of written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[s.command](s, out, threads)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="a2gnet",
        description="Air-to-ground channel and UAV network performance runs")
    parser.add_argument("--scenario", required=True, help="scenario YAML path")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for Monte Carlo runs")
    args = parser.parse_args(argv)
    try:
        scenario = load_scenario(args.scenario)
    except (ScenarioError, OSError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        scenario.seed = args.seed
    out_dir = args.out or scenario.output or "."
    try:
        paths = run_scenario(scenario, out_dir, threads=max(args.threads, 1))
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"model error in {scenario.command}: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
