import textwrap

import pytest

from mecsim.config import (
    ConfigError,
    UnknownSchedulerError,
    apply_override,
    load_raw,
    load_scenario,
    load_sweep,
    scenario_with,
)
from mecsim.energetics import efficiency_at

MINIMAL = textwrap.dedent("""\
    seed: 3
    scheduler: optimal
    epoch: 100 ms
    topology:
      nodes:
        - {id: e1, kind: edge, profile: microserver, f_min: 1.6 GHz, f_max: 4.4 GHz}
        - {id: cloud, kind: cloud, profile: microserver}
      paths:
        - {origin: dev, node: e1, gamma_wired: 20 pJ/b, gamma_wireless: 4e4 pJ/b,
           rate: 50 Mb/s, distance: 0.4 km, response_access_delay: [1 ms, 2 ms]}
        - {origin: dev, node: cloud, gamma_wired: 6e4 pJ/b, gamma_wireless: 4e4 pJ/b,
           rate: 50 Mb/s, distance: 1500 km}
    workload:
      n_tasks: 5
      rate: 2.0
      size_bits: {dist: lognormal, median: 1 Mb, sigma: 0.5}
      intensity: {dist: uniform, low: 10, high: 500}
      output_ratio: {dist: uniform, low: 0.01, high: 0.2}
      deadline: {dist: uniform, low: 50 ms, high: 1 s}
      uplink_access_delay: {dist: uniform, low: 0 ms, high: 5 ms}
      origins: {dev: 1.0}
""")


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text(MINIMAL)
    return path


def test_minimal_scenario_loads(config_file):
    scenario = load_scenario(config_file)
    assert scenario.scheduler == "optimal"
    assert scenario.epoch_s == pytest.approx(0.1)
    assert scenario.workload.seed == 3
    assert scenario.workload.n_tasks == 5
    path = scenario.topology.path("dev", "e1")
    assert path.gamma_wireless_j_per_bit == pytest.approx(4e-8)
    assert path.rate_bps == pytest.approx(50e6)
    assert path.distance_km == pytest.approx(0.4)
    assert path.response_access_delay_s == pytest.approx((1e-3, 2e-3))
    node = scenario.topology.node("e1")
    assert node.f_min_hz == pytest.approx(1.6e9)


def test_bundled_configs_load():
    for name in ("default", "oracle_small", "gamma_zero"):
        scenario = load_scenario(name)
        assert scenario.topology.nodes
    spec = load_sweep("sweep_default")
    assert spec.parameter == "cloud_beta_scale"
    assert len(spec.values) == 8


def test_seed_override(config_file):
    scenario = load_scenario(config_file, {"seed": 7})
    assert scenario.workload.seed == 7


def test_cloud_beta_scale_scales_cloud_profile_only(config_file):
    base = load_scenario(config_file)
    scaled = load_scenario(config_file, {"cloud_beta_scale": 4.0})
    f = 2.7e9
    assert efficiency_at(scaled.topology.node("cloud").profile, f) == pytest.approx(
        4.0 * efficiency_at(base.topology.node("cloud").profile, f), rel=1e-12)
    assert scaled.topology.node("e1").profile == base.topology.node("e1").profile


def test_unknown_scheduler_named(config_file):
    with pytest.raises(UnknownSchedulerError) as err:
        load_scenario(config_file, {"scheduler": "genetic"})
    message = str(err.value)
    for name in ("optimal", "cloud_only", "nearest_mec", "brute_force"):
        assert name in message


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scenario("does_not_exist.yaml")


def test_schema_violations(tmp_path, config_file):
    raw = load_raw(config_file)

    broken = {k: v for k, v in raw.items() if k != "workload"}
    with pytest.raises(ConfigError, match="workload"):
        scenario_with(broken, {})

    with pytest.raises(ConfigError, match="unknown unit"):
        scenario_with(raw, {"epoch": "100 furlongs"})

    with pytest.raises(ConfigError, match="distribution"):
        scenario_with(raw, {"workload.size_bits": {"dist": "zipf", "low": 1, "high": 2}})

    with pytest.raises(ConfigError, match="missing path"):
        pruned = dict(raw)
        pruned["topology"] = {
            "nodes": raw["topology"]["nodes"],
            "paths": raw["topology"]["paths"][:1],
        }
        scenario_with(pruned, {})

    with pytest.raises(ConfigError, match="cloud_beta_scale"):
        scenario_with(raw, {"cloud_beta_scale": -1.0})


def test_inline_profile_and_dotted_override(config_file):
    raw = load_raw(config_file)
    inline = {
        "freq_hz": ["1 GHz", "2 GHz", "3 GHz"],
        "power_w": [5.0, 9.0, 16.0],
        "flops_per_cycle": 8,
    }
    raw["topology"]["nodes"][0]["profile"] = inline
    raw["topology"]["nodes"][0]["f_min"] = "1 GHz"
    raw["topology"]["nodes"][0]["f_max"] = "3 GHz"
    scenario = scenario_with(raw, {"workload.rate": 4.0})
    prof = scenario.topology.node("e1").profile
    assert prof.freq_grid_hz == (1e9, 2e9, 3e9)
    assert prof.flops_per_cycle == 8.0
    assert scenario.workload.rate_per_s == 4.0


def test_apply_override_paths():
    config = {"a": {"b": 1}}
    apply_override(config, "a.b", 2)
    apply_override(config, "a.c.d", 3)
    assert config == {"a": {"b": 2, "c": {"d": 3}}}


def test_profile_csv_loading(tmp_path, config_file):
    csv = tmp_path / "prof.csv"
    csv.write_text("1e9,5.0\n2e9,9.0\n3e9,16.0\n")
    raw = load_raw(config_file)
    raw["topology"]["nodes"][0]["profile"] = {"csv": str(csv), "flops_per_cycle": 4}
    raw["topology"]["nodes"][0]["f_min"] = "1 GHz"
    raw["topology"]["nodes"][0]["f_max"] = "3 GHz"
    scenario = scenario_with(raw, {})
    assert scenario.topology.node("e1").profile.power_w == (5.0, 9.0, 16.0)


def test_access_samples_csv(tmp_path, config_file):
    csv = tmp_path / "acc.csv"
    csv.write_text("0.001\n0.002\n0.004\n")
    raw = load_raw(config_file)
    raw["topology"]["paths"][0]["response_access_delay"] = {"csv": str(csv)}
    scenario = scenario_with(raw, {})
    assert scenario.topology.path("dev", "e1").response_access_delay_s \
        == (0.001, 0.002, 0.004)


def test_sweep_spec_validation(tmp_path):
    sweep = tmp_path / "sweep.yaml"
    sweep.write_text(
        "base: default\nparameter: cloud_beta_scale\nvalues: []\n"
        "seeds: [1]\nschedulers: [optimal]\n"
    )
    with pytest.raises(ConfigError, match="non-empty"):
        load_sweep(sweep)
    sweep.write_text(
        "base: default\nparameter: cloud_beta_scale\nvalues: [1]\n"
        "seeds: [1]\nschedulers: [simulated_annealing]\n"
    )
    with pytest.raises(UnknownSchedulerError):
        load_sweep(sweep)
