"""Scenario files: a validated YAML tree drives every CLI run.

All model parameters live in the file; the command line only overrides the
seed, output directory, and thread count. Unknown keys are rejected with
their full path so a typo like `bs_densty` fails loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import yaml

from .errors import ScenarioError

COMMANDS = ("channel-table", "aue-coverage", "aue-sweep", "abs-design",
            "localize", "mapsim")

ENV_PRESETS = ("suburban", "urban", "dense_urban", "highrise")


@dataclass(frozen=True)
class Field:
    kind: type = float
    default: Any = None
    required: bool = False
    choices: tuple = None
    item_kind: type = float        # for list fields
    schema: dict = None            # for nested blocks


def _env_schema(default_preset="urban"):
    return Field(kind=dict, schema={
        "preset": Field(kind=str, default=default_preset,
                        choices=ENV_PRESETS + ("custom",)),
        "kind": Field(kind=str, default=None),
        "varsigma": Field(default=None),
        "xi": Field(default=None),
        "omega": Field(default=None),
        "mean_building_height_m": Field(default=None),
        "street_width_m": Field(default=None),
    })


_AUE_BLOCK = {
    "frequency_ghz": Field(default=1.8),
    "bs_density_per_km2": Field(default=5.0),
    "bs_height_m": Field(default=30.0),
    "p_tx_dbm": Field(default=43.0),
    "bandwidth_mhz": Field(default=20.0),
    "noise_density_dbm_hz": Field(default=-174.0),
    "noise_figure_db": Field(default=9.0),
    "noise_override_dbm": Field(default=None),
    "threshold_db": Field(default=0.0),
    "target_rate_mbps": Field(default=None),
    "eta_los": Field(default=2.0),
    "eta_nlos": Field(default=3.5),
    "nlos_excess_db": Field(default=20.0),
    "fading_m_los": Field(kind=int, default=3),
    "fading_m_nlos": Field(kind=int, default=1),
    "aue_ratio_rho": Field(default=0.5),
    "region_radius_m": Field(default=3000.0),
    "antenna": Field(kind=str, default="omni", choices=("omni", "cone")),
    "phi_b_deg": Field(default=60.0),
    "phi_t_deg": Field(default=0.0),
    "omni_gain_dbi": Field(default=2.15),
    "sector_max_gain_dbi": Field(default=16.0),
    "sector_downtilt_deg": Field(default=8.0),
    "sector_beamwidth_deg": Field(default=65.0),
    "sector_elevation_beamwidth_deg": Field(default=6.0),
    "sector_sidelobe_floor_db": Field(default=20.0),
    "environment": _env_schema(),
}

SCHEMAS: Dict[str, dict] = {
    "channel-table": {
        "channel": Field(kind=dict, schema={
            "frequency_ghz": Field(default=1.8),
            "h_g_m": Field(default=30.0),
            "altitudes_m": Field(kind=list, default=[1.5, 30.0, 150.0]),
            "distances_m": Field(kind=list,
                                 default=[50.0, 100.0, 200.0, 500.0, 1000.0]),
            "environment": _env_schema(),
        }),
    },
    "aue-coverage": {
        "aue": Field(kind=dict, schema=dict(_AUE_BLOCK)),
        "run": Field(kind=dict, schema={
            "altitudes_m": Field(kind=list, default=[30.0, 60.0, 120.0]),
            "thresholds_db": Field(kind=list, default=[0.0]),
            "n_trials": Field(kind=int, default=2000),
        }),
    },
    "aue-sweep": {
        "aue": Field(kind=dict, schema=dict(_AUE_BLOCK)),
        "sweep": Field(kind=dict, schema={
            "axis": Field(kind=str, required=True,
                          choices=("altitude", "density", "phi_b", "phi_t")),
            "grid": Field(kind=list, required=True),
            "uav_h_m": Field(default=150.0),
            "metric": Field(kind=str, default="capacity",
                            choices=("capacity", "coverage")),
            "n_trials": Field(kind=int, default=2000),
            "k_nodes": Field(kind=int, default=200),
            "t_max_db": Field(default=None),
        }),
    },
    "abs-design": {
        "abs": Field(kind=dict, schema={
            "k0_db": Field(default=0.0),
            "k90_db": Field(default=15.0),
            "eta0": Field(default=3.5),
            "eta90": Field(default=2.0),
            "antenna_gain_db": Field(default=0.0),
            "noise_dbm": Field(default=-92.0),
            "threshold_db": Field(default=0.0),
            "epsilon": Field(default=0.05),
            "r_c_m": Field(default=500.0),
            "n_users": Field(default=20.0),
            "bandwidth_mhz": Field(default=20.0),
            "altitudes_m": Field(kind=list,
                                 default=[50.0, 100.0, 200.0, 400.0, 800.0]),
        }),
    },
    "localize": {
        "localize": Field(kind=dict, schema={
            "m_points": Field(kind=list, item_kind=int, default=[3, 4]),
            "radii_m": Field(kind=list, default=[120.0]),
            "altitudes_m": Field(kind=list, default=[200.0]),
            "n_users": Field(kind=int, default=100),
            "user_area_radius_m": Field(default=200.0),
            "trials_per_user": Field(kind=int, default=1),
            "state_mode": Field(kind=str, default="independent",
                                choices=("independent", "common", "los", "nlos")),
            "frequency_ghz": Field(default=2.0),
            "a_los": Field(default=10.0),
            "b_los": Field(default=2.0),
            "a_nlos": Field(default=30.0),
            "b_nlos": Field(default=1.7),
            "a_o": Field(default=47.0),
            "b_o": Field(default=20.0),
            "eta_los": Field(default=2.0),
            "eta_nlos": Field(default=3.0),
        }),
    },
    "mapsim": {
        "mapsim": Field(kind=dict, schema={
            "heightmap": Field(kind=str, default=None),
            "synthetic": Field(kind=dict, schema={
                "extent_m": Field(default=480.0),
                "cellsize_m": Field(default=4.0),
                "min_height_m": Field(default=4.0),
                "environment": _env_schema("dense_urban"),
            }),
            "sites_csv": Field(kind=str, default=None),
            "auto_sites": Field(kind=dict, schema={
                "count": Field(kind=int, default=5),
                "p_tx_dbm": Field(default=46.0),
                "mast_m": Field(default=5.0),
                "downtilt_deg": Field(default=8.0),
                "max_gain_dbi": Field(default=16.0),
                "beamwidth_deg": Field(default=65.0),
            }),
            "heights_m": Field(kind=list, default=[1.5, 20.0, 60.0, 150.0]),
            "threshold_db": Field(default=-6.0),
            "stride": Field(kind=int, default=4),
            "frequency_ghz": Field(default=1.8),
            "bandwidth_mhz": Field(default=20.0),
            "noise_figure_db": Field(default=9.0),
            "pl_model": Field(kind=str, default="threegpp",
                              choices=("threegpp", "free_space")),
            "emit_rasters": Field(kind=bool, default=True),
            "environment": _env_schema("dense_urban"),
        }),
    },
}

_TOP_LEVEL = {
    "command": Field(kind=str, required=True, choices=COMMANDS),
    "seed": Field(kind=int, default=0),
    "output": Field(kind=str, default=None),
}


@dataclass
class Scenario:
    command: str
    seed: int
    output: Optional[str]
    params: Dict[str, Any] = field(default_factory=dict)


def _coerce(value, f: Field, path: str):
    if value is None:
        return None
    if f.kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError("expected a number", path)
        return float(value)
    if f.kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ScenarioError("expected an integer", path)
        return int(value)
    if f.kind is bool:
        if not isinstance(value, bool):
            raise ScenarioError("expected true/false", path)
        return value
    if f.kind is str:
        if not isinstance(value, str):
            raise ScenarioError("expected a string", path)
        if f.choices and value not in f.choices:
            raise ScenarioError(
                f"must be one of {', '.join(map(str, f.choices))}", path)
        return value
    if f.kind is list:
        if not isinstance(value, list) or not value:
            raise ScenarioError("expected a nonempty list", path)
        out = []
        for i, item in enumerate(value):
            if f.item_kind is int:
                if isinstance(item, bool) or not isinstance(item, int):
                    raise ScenarioError("expected integers", f"{path}[{i}]")
                out.append(int(item))
            else:
                if isinstance(item, bool) or not isinstance(item, (int, float)):
                    raise ScenarioError("expected numbers", f"{path}[{i}]")
                out.append(float(item))
        return out
    raise ScenarioError("unsupported field kind", path)  # pragma: no cover


def _validate_block(data, schema: dict, path: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ScenarioError("expected a mapping", path)
    out = {}
    for key in data:
        if key not in schema:
            raise ScenarioError(f"unknown key {key!r}", f"{path}.{key}" if path else key)
    for key, f in schema.items():
        sub_path = f"{path}.{key}" if path else key
        if f.schema is not None:
            out[key] = _validate_block(data.get(key), f.schema, sub_path)
            continue
        if key in data:
            out[key] = _coerce(data[key], f, sub_path)
        elif f.required:
            raise ScenarioError("missing required key", sub_path)
        else:
            out[key] = f.default
    return out


def parse_scenario(text: str) -> Scenario:
    """Parse and fully validate a scenario document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ScenarioError("scenario must be a key-value mapping")
    command = raw.get("command")
    if command is None:
        raise ScenarioError("missing required key", "command")
    if command not in COMMANDS:
        raise ScenarioError(f"must be one of {', '.join(COMMANDS)}", "command")
    schema = SCHEMAS[command]
    for key in raw:
        if key not in schema and key not in _TOP_LEVEL:
            raise ScenarioError(f"unknown key {key!r}", key)
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ScenarioError("seed must be a non-negative integer", "seed")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ScenarioError("output must be a string path", "output")
    params = {}
    for key, f in schema.items():
        params[key] = _validate_block(raw.get(key), f.schema, key)
    return Scenario(command=command, seed=seed, output=output, params=params)


def serialize_scenario(s: Scenario) -> str:
    """Canonical YAML for a validated scenario (parse-stable)."""
    doc = {"command": s.command, "seed": s.seed}
    if s.output is not None:
        doc["output"] = s.output
    doc.update(s.params)
    return yaml.safe_dump(doc, sort_keys=True, default_flow_style=False)


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
