"""Simulation configuration: TOML file with strict keys and per-key defaults.

Layout of the file (every key optional)::

    seed = 1
    drops = 100
    workers = 1
    system_bandwidth_hz = 100e6
    noise_psd_dbm_per_hz = -174.0
    pfs_tol = 1e-9

    [layout]    cell_radius_m, sectors_per_macro, hotspots, hotspot_fraction,
                hotspot_radius_m, min_dist_macro_m, min_dist_pico_m
    [radio]     macro_tx_dbm, macro_gain_dbi, pico_tx_dbm, pico_gain_dbi
    [energy]    macro_power_w, pico_active_w, pico_idle_w
    [traffic]   macro_means, hotspot_means, fluctuation
    [scenarios] include, beta
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .allocation import DEFAULT_TOL, RateParams, dbm_to_w
from .scenarios import EnergyModel, ScenarioSpec, parse_scenario
from .topology import MACRO, PICO, BaseStationParams, LayoutConfig, build_layout
from .traffic import HOTSPOT_MEANS, MACRO_MEANS, TrafficProfile

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_SCENARIOS = ("MO/PFS", "MO/EA", "PA20/PFS", "PA20/EA", "PA50/PFS",
                     "PA50/EA", "PA80/PFS", "PA80/EA", "DBADA")


class ConfigError(ValueError):
    pass


def _num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _pos(v):
    return _num(v) and v > 0


def _nonneg(v):
    return _num(v) and v >= 0


def _count_list(v):
    return isinstance(v, list) and len(v) > 0 and all(_int(x) and x >= 0 for x in v)


def _str_list(v):
    return isinstance(v, list) and all(isinstance(x, str) for x in v)


def _beta_list(v):
    return isinstance(v, list) and len(v) > 0 and all(_nonneg(x) for x in v)


# section -> key -> (default, check, description of valid values)
SCHEMA = {
    "": {
        "seed": (1, lambda v: _int(v) and v >= 0, "non-negative integer"),
        "drops": (100, lambda v: _int(v) and v >= 1, "positive integer"),
        "workers": (1, lambda v: _int(v) and v >= 1, "positive integer"),
        "system_bandwidth_hz": (100e6, _pos, "positive number"),
        "noise_psd_dbm_per_hz": (-174.0, _num, "number"),
        "pfs_tol": (DEFAULT_TOL, lambda v: _pos(v) and v < 1, "number in (0, 1)"),
    },
    "layout": {
        "cell_radius_m": (500.0, _pos, "positive number"),
        "sectors_per_macro": (3, lambda v: _int(v) and v >= 1, "positive integer"),
        "hotspots": (6, lambda v: _int(v) and 0 <= v, "non-negative integer"),
        "hotspot_fraction": (0.9, lambda v: _num(v) and 0 < v <= 1, "number in (0, 1]"),
        "hotspot_radius_m": (40.0, _pos, "positive number"),
        "min_dist_macro_m": (35.0, _pos, "positive number"),
        "min_dist_pico_m": (10.0, _pos, "positive number"),
    },
    "radio": {
        "macro_tx_dbm": (46.0, _num, "number"),
        "macro_gain_dbi": (14.0, _num, "number"),
        "pico_tx_dbm": (30.0, _num, "number"),
        "pico_gain_dbi": (5.0, _num, "number"),
    },
    "energy": {
        "macro_power_w": (390.0, _pos, "positive number"),
        "pico_active_w": (9.0, _pos, "positive number"),
        "pico_idle_w": (0.5, _nonneg, "non-negative number"),
    },
    "traffic": {
        "macro_means": (list(MACRO_MEANS), _count_list, "non-empty list of counts"),
        "hotspot_means": (list(HOTSPOT_MEANS), _count_list, "non-empty list of counts"),
        "fluctuation": (0.2, lambda v: _num(v) and 0 <= v < 1, "number in [0, 1)"),
    },
    "scenarios": {
        "include": (list(DEFAULT_SCENARIOS), _str_list, "list of scenario names"),
        "beta": ([0.5], _beta_list, "non-empty list of non-negative numbers"),
    },
}


@dataclass(frozen=True)
class SimulationConfig:
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    macro: BaseStationParams = field(
        default_factory=lambda: BaseStationParams(MACRO, 46.0, 14.0, 390.0, 0.0))
    pico: BaseStationParams = field(
        default_factory=lambda: BaseStationParams(PICO, 30.0, 5.0, 9.0, 0.5))
    energy: EnergyModel = field(default_factory=EnergyModel)
    rate: RateParams = field(default_factory=RateParams)
    traffic: TrafficProfile = field(
        default_factory=lambda: TrafficProfile(MACRO_MEANS, HOTSPOT_MEANS, 0.2))
    scenarios: tuple[ScenarioSpec, ...] = ()
    drops: int = 100
    seed: int = 1
    workers: int = 1
    pfs_tol: float = DEFAULT_TOL


def _flatten(raw: dict) -> dict:
    flat = {}
    for key, value in raw.items():
        if key in SCHEMA and key != "" and isinstance(value, dict):
            for sub, v in value.items():
                flat[f"{key}.{sub}"] = v
        else:
            flat[key] = value
    return flat


def _lookup(path: str):
    section, _, key = path.rpartition(".")
    return SCHEMA.get(section, {}).get(key)


def config_from_dict(raw: dict, overrides: dict | None = None) -> SimulationConfig:
    """Build a config from parsed TOML plus ``{"section.key": value}`` overrides."""
    values = _flatten(raw)
    values.update(overrides or {})
    for path, v in values.items():
        entry = _lookup(path)
        if entry is None:
            raise ConfigError(f"unknown config key {path!r}")
        if not entry[1](v):
            raise ConfigError(f"invalid value for {path!r}: {v!r} (expected {entry[2]})")

    def get(path):
        return values[path] if path in values else _lookup(path)[0]

    layout = LayoutConfig(**{k: get(f"layout.{k}") for k in SCHEMA["layout"]})
    try:
        build_layout(layout)
    except ValueError as exc:
        raise ConfigError(f"layout: {exc}") from None
    try:
        energy = EnergyModel(get("energy.macro_power_w"), layout.sectors_per_macro,
                             get("energy.pico_active_w"), get("energy.pico_idle_w"))
    except ValueError as exc:
        raise ConfigError(f"energy: {exc}") from None
    try:
        traffic = TrafficProfile(tuple(get("traffic.macro_means")),
                                 tuple(get("traffic.hotspot_means")),
                                 float(get("traffic.fluctuation")))
    except ValueError as exc:
        raise ConfigError(f"traffic: {exc}") from None
    try:
        specs = []
        for token in get("scenarios.include"):
            specs.extend(parse_scenario(token, get("scenarios.beta")))
    except ValueError as exc:
        raise ConfigError(f"scenarios.include: {exc}") from None
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"scenarios.include: duplicate scenarios in {labels}")
    if not specs:
        raise ConfigError("scenarios.include: no scenarios selected")
    return SimulationConfig(
        layout=layout,
        macro=BaseStationParams(MACRO, float(get("radio.macro_tx_dbm")),
                                float(get("radio.macro_gain_dbi")),
                                energy.macro_power_w, 0.0),
        pico=BaseStationParams(PICO, float(get("radio.pico_tx_dbm")),
                               float(get("radio.pico_gain_dbi")),
                               energy.pico_active_w, energy.pico_idle_w),
        energy=energy,
        rate=RateParams(float(dbm_to_w(get("noise_psd_dbm_per_hz"))),
                        float(get("system_bandwidth_hz"))),
        traffic=traffic,
        scenarios=tuple(specs),
        drops=get("drops"),
        seed=get("seed"),
        workers=get("workers"),
        pfs_tol=float(get("pfs_tol")),
    )


def load_config(path=None, overrides: dict | None = None) -> SimulationConfig:
    """Read a TOML config; ``path=None`` gives the defaults."""
    raw = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    return config_from_dict(raw, overrides)


def default_config() -> SimulationConfig:
    return config_from_dict({})
