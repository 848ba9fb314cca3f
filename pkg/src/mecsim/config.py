"""Scenario and sweep configuration files.

A scenario is one YAML mapping::

    seed: 11                       # workload RNG seed
    scheduler: optimal             # optimal | cloud_only | nearest_mec | brute_force
    epoch: 100 ms                  # scheduling window
    freq_optimizer: sca            # sca | grid
    access_delay_quantile: 0.98
    cloud_beta_scale: 1.0          # efficiency factor applied to cloud nodes
    topology:
      nodes:
        - {id: mec-a, kind: edge, profile: microserver,
           f_min: 1.6 GHz, f_max: 4.4 GHz}
        - {id: cloud, kind: cloud, profile: microserver,
           f_min: 1.6 GHz, f_max: 4.4 GHz}
      paths:
        - {origin: dev-1, node: mec-a, gamma_wired: 20 pJ/b,
           gamma_wireless: 4e4 pJ/b, rate: 50 Mb/s, distance: 0.4 km,
           response_access_delay: [1 ms, 2 ms]}
    workload:
      horizon: 20 s                # or n_tasks: 40
      rate: 2.0                    # mean arrivals per second
      size_bits: {dist: lognormal, median: 1 Mb, sigma: 0.5}
      intensity: {dist: uniform, low: 10, high: 500}
      output_ratio: {dist: uniform, low: 0.01, high: 0.2}
      deadline: {dist: uniform, low: 50 ms, high: 1 s}
      uplink_access_delay: {dist: uniform, low: 0 ms, high: 5 ms}
      origins: {dev-1: 1.0}

Numbers may carry engineering-unit suffixes; node profiles are bundled
names, inline ``{freq_hz: [...], power_w: [...], flops_per_cycle: s}``
mappings, or ``{csv: file.csv, flops_per_cycle: s}``.  A sweep file
names a base scenario, one dotted parameter path, and the value, seed
and scheduler lists to cross.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from . import profiles, units
from .model import CLOUD, ComputeNode, CpuProfile, NetworkPath, Topology, validate
from .scheduler import SCHEDULERS
from .simulator import DistSpec, WorkloadSpec


class ConfigError(ValueError):
    """Configuration file violates the schema or topology invariants."""


class UnknownSchedulerError(ConfigError):
    def __init__(self, name):
        super().__init__(
            f"unknown scheduler {name!r}; valid options: " + ", ".join(sorted(SCHEDULERS))
        )


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    workload: WorkloadSpec
    scheduler: str
    epoch_s: float
    quantile: float
    freq_optimizer: str
    cloud_beta_scale: float


@dataclass(frozen=True)
class SweepSpec:
    base: str
    parameter: str
    values: tuple
    seeds: tuple[int, ...]
    schedulers: tuple[str, ...]


def bundled_path(name: str) -> Path:
    return Path(resources.files("mecsim").joinpath(f"data/{name}.yaml"))


def resolve_config(path_or_name: str | Path) -> Path:
    """A filesystem path, or the name of a bundled config."""
    p = Path(path_or_name)
    if p.exists():
        return p
    bundled = bundled_path(str(path_or_name))
    if bundled.exists():
        return bundled
    raise FileNotFoundError(f"no such config file or bundled name: {path_or_name}")


def _read_yaml(path: Path) -> dict:
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def apply_override(config: dict, dotted: str, value) -> None:
    """Set ``a.b.c`` inside a nested mapping."""
    keys = dotted.split(".")
    node = config
    for key in keys[:-1]:
        node = node.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override path {dotted!r} crosses a non-mapping")
    node[keys[-1]] = value


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return mapping[key]


def _parse_profile(spec, where: str) -> CpuProfile:
    if isinstance(spec, str):
        try:
            return profiles.get_profile(spec)
        except KeyError as exc:
            raise ConfigError(f"{where}: {exc.args[0]}") from None
    if not isinstance(spec, dict):
        raise ConfigError(f"{where}: profile must be a name or a mapping")
    s = units.parse_quantity(
        _require(spec, "flops_per_cycle", where), units.DIMENSIONLESS, "flops_per_cycle"
    )
    if "csv" in spec:
        return profiles.load_profile_csv(spec["csv"], s)
    freqs = [units.parse_quantity(f, units.FREQUENCY, "freq") for f in _require(spec, "freq_hz", where)]
    powers = [units.parse_quantity(p, units.POWER, "power") for p in _require(spec, "power_w", where)]
    return CpuProfile(freq_grid_hz=tuple(freqs), power_w=tuple(powers), flops_per_cycle=s)


def _parse_node(spec: dict, cloud_beta_scale: float) -> ComputeNode:
    where = f"node {spec.get('id', '?')}"
    profile = _parse_profile(_require(spec, "profile", where), where)
    kind = _require(spec, "kind", where)
    if kind == CLOUD and cloud_beta_scale != 1.0:
        profile = profiles.scale_efficiency(profile, cloud_beta_scale)
    servers = spec.get("servers")
    if isinstance(servers, str):
        if servers != "unbounded":
            raise ConfigError(f"{where}: servers must be an integer or 'unbounded'")
        servers = None
    return ComputeNode(
        id=str(_require(spec, "id", where)),
        kind=kind,
        profile=profile,
        f_min_hz=units.parse_quantity(
            spec.get("f_min", profile.f_lo_hz), units.FREQUENCY, f"{where}: f_min"
        ),
        f_max_hz=units.parse_quantity(
            spec.get("f_max", profile.f_hi_hz), units.FREQUENCY, f"{where}: f_max"
        ),
        servers=servers,
    )


def _parse_samples(spec, where: str) -> tuple[float, ...]:
    if spec is None:
        return ()
    if isinstance(spec, dict) and "csv" in spec:
        data = np.loadtxt(spec["csv"], ndmin=1)
        return tuple(float(x) for x in data)
    if isinstance(spec, list):
        return tuple(units.parse_quantity(x, units.TIME, where) for x in spec)
    raise ConfigError(f"{where}: samples must be a list or {{csv: path}}")


def _parse_path(spec: dict) -> NetworkPath:
    where = f"path ({spec.get('origin', '?')} -> {spec.get('node', '?')})"
    rate = spec.get("rate", "inf")
    rate_bps = math.inf if rate in ("inf", math.inf) else units.parse_quantity(
        rate, units.RATE, f"{where}: rate"
    )
    return NetworkPath(
        origin=str(_require(spec, "origin", where)),
        node_id=str(_require(spec, "node", where)),
        gamma_wired_j_per_bit=units.parse_quantity(
            spec.get("gamma_wired", 0.0), units.ENERGY_PER_BIT, f"{where}: gamma_wired"
        ),
        gamma_wireless_j_per_bit=units.parse_quantity(
            spec.get("gamma_wireless", 0.0), units.ENERGY_PER_BIT, f"{where}: gamma_wireless"
        ),
        rate_bps=rate_bps,
        distance_km=units.parse_quantity(
            spec.get("distance", 0.0), units.DISTANCE, f"{where}: distance"
        ),
        prop_coeff_s_per_km=units.parse_quantity(
            spec.get("prop_coeff", 7.5e-6), units.TIME_PER_DISTANCE, f"{where}: prop_coeff"
        ),
        response_access_delay_s=_parse_samples(
            spec.get("response_access_delay"), f"{where}: response_access_delay"
        ),
    )


def _parse_dist(spec: dict, scales: dict, where: str) -> DistSpec:
    if not isinstance(spec, dict) or "dist" not in spec:
        raise ConfigError(f"{where}: expected a mapping with a 'dist' key")
    kind = spec["dist"]
    try:
        if kind == "uniform":
            return DistSpec(
                "uniform",
                units.parse_quantity(_require(spec, "low", where), scales, f"{where}: low"),
                units.parse_quantity(_require(spec, "high", where), scales, f"{where}: high"),
            )
        if kind == "lognormal":
            return DistSpec(
                "lognormal",
                units.parse_quantity(_require(spec, "median", where), scales, f"{where}: median"),
                units.parse_quantity(_require(spec, "sigma", where), units.DIMENSIONLESS, f"{where}: sigma"),
            )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: unknown distribution {kind!r}")


def _parse_workload(spec: dict, seed: int) -> WorkloadSpec:
    where = "workload"
    origins_map = _require(spec, "origins", where)
    if not isinstance(origins_map, dict):
        raise ConfigError(f"{where}: origins must map names to weights")
    n_tasks = spec.get("n_tasks")
    horizon = spec.get("horizon")
    try:
        return WorkloadSpec(
            rate_per_s=units.parse_quantity(_require(spec, "rate", where), units.DIMENSIONLESS, "rate"),
            size_bits=_parse_dist(_require(spec, "size_bits", where), units.BITS, "size_bits"),
            intensity=_parse_dist(_require(spec, "intensity", where), units.DIMENSIONLESS, "intensity"),
            output_ratio=_parse_dist(_require(spec, "output_ratio", where), units.DIMENSIONLESS, "output_ratio"),
            deadline_s=_parse_dist(_require(spec, "deadline", where), units.TIME, "deadline"),
            uplink_access_delay_s=_parse_dist(
                _require(spec, "uplink_access_delay", where), units.TIME, "uplink_access_delay"
            ),
            origins=tuple(sorted((str(k), float(v)) for k, v in origins_map.items())),
            seed=seed,
            n_tasks=int(n_tasks) if n_tasks is not None else None,
            horizon_s=units.parse_quantity(horizon, units.TIME, "horizon") if horizon is not None else None,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def build_scenario(config: dict) -> Scenario:
    try:
        return _build_scenario(config)
    except units.UnitError as exc:
        raise ConfigError(str(exc)) from exc


def _build_scenario(config: dict) -> Scenario:
    scheduler = config.get("scheduler", "optimal")
    if scheduler not in SCHEDULERS:
        raise UnknownSchedulerError(scheduler)
    freq_optimizer = config.get("freq_optimizer", "sca")
    if freq_optimizer not in ("sca", "grid"):
        raise ConfigError(f"freq_optimizer must be 'sca' or 'grid', got {freq_optimizer!r}")
    scale = units.parse_quantity(
        config.get("cloud_beta_scale", 1.0), units.DIMENSIONLESS, "cloud_beta_scale"
    )
    if not scale > 0:
        raise ConfigError("cloud_beta_scale must be positive")

    topo_cfg = _require(config, "topology", "scenario")
    nodes = [_parse_node(n, scale) for n in _require(topo_cfg, "nodes", "topology")]
    paths = [_parse_path(p) for p in _require(topo_cfg, "paths", "topology")]
    topology = Topology(nodes=tuple(nodes), paths=tuple(paths))
    errors = validate(topology)
    if errors:
        raise ConfigError("invalid topology: " + "; ".join(errors))

    seed = config.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed must be an integer")
    workload = _parse_workload(_require(config, "workload", "scenario"), seed)

    quantile = units.parse_quantity(
        config.get("access_delay_quantile", 0.98), units.DIMENSIONLESS, "access_delay_quantile"
    )
    if not 0.0 < quantile < 1.0:
        raise ConfigError("access_delay_quantile must lie in (0, 1)")
    epoch_s = units.parse_quantity(config.get("epoch", "100 ms"), units.TIME, "epoch")
    if not epoch_s > 0:
        raise ConfigError("epoch must be positive")

    return Scenario(
        topology=topology,
        workload=workload,
        scheduler=scheduler,
        epoch_s=epoch_s,
        quantile=quantile,
        freq_optimizer=freq_optimizer,
        cloud_beta_scale=scale,
    )


def load_raw(path_or_name: str | Path) -> dict:
    return _read_yaml(resolve_config(path_or_name))


def load_scenario(path_or_name: str | Path, overrides: dict | None = None) -> Scenario:
    config = load_raw(path_or_name)
    for dotted, value in (overrides or {}).items():
        apply_override(config, dotted, value)
    return build_scenario(config)


def scenario_with(config: dict, overrides: dict) -> Scenario:
    """Scenario from an in-memory config plus dotted overrides."""
    merged = copy.deepcopy(config)
    for dotted, value in overrides.items():
        apply_override(merged, dotted, value)
    return build_scenario(merged)


def load_sweep(path_or_name: str | Path) -> SweepSpec:
    path = resolve_config(path_or_name)
    config = _read_yaml(path)
    where = str(path)
    base = str(_require(config, "base", where))
    # Relative base paths resolve against the sweep file's directory.
    base_path = Path(base)
    if not base_path.is_absolute() and (path.parent / base_path).exists():
        base = str(path.parent / base_path)
    values = _require(config, "values", where)
    seeds = _require(config, "seeds", where)
    schedulers = _require(config, "schedulers", where)
    if not values or not seeds or not schedulers:
        raise ConfigError(f"{where}: values, seeds and schedulers must be non-empty")
    for s in schedulers:
        if s not in SCHEDULERS:
            raise UnknownSchedulerError(s)
    return SweepSpec(
        base=base,
        parameter=str(_require(config, "parameter", where)),
        values=tuple(values),
        seeds=tuple(int(s) for s in seeds),
        schedulers=tuple(str(s) for s in schedulers),
    )
