"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as
they appear.  The sweep-based criteria share one module-scoped set of
simulation results built from the bundled default scenario and sweep.
"""

import itertools
import math
import time

import numpy as np
import pytest

from mecsim.cli import main as cli_main
from mecsim.config import load_raw, load_sweep, scenario_with
from mecsim.latency import NodeQueueState, occupy_for, total_delay
from mecsim.scheduler import (
    brute_force_schedule,
    hungarian,
    schedule_optimal,
    total_accepted_energy,
)
from mecsim.simulator import generate_workload, simulate

from helpers import random_small_instance

SWEEP_VALUES = (0.5, 1, 2, 4, 8, 16, 24, 32)
SWEEP_SEEDS = (11, 12, 13, 14, 15)
SWEEP_SCHEDULERS = ("optimal", "cloud_only", "nearest_mec")


def report(number: int, ok: bool, text: str) -> None:
    print(f"[criterion {number:02d}] {'PASS' if ok else 'FAIL'}: {text}")


def spearman(xs, ys) -> float:
    """Rank correlation with average ranks on ties."""

    def ranks(values):
        order = sorted(range(len(values)), key=lambda i: values[i])
        out = [0.0] * len(values)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for k in range(i, j + 1):
                out[order[k]] = avg
            i = j + 1
        return out

    rx, ry = np.asarray(ranks(xs)), np.asarray(ranks(ys))
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx * ry).sum() / math.sqrt((rx * rx).sum() * (ry * ry).sum()))


@pytest.fixture(scope="module")
def default_sweep():
    """All (value, seed, scheduler) simulation results plus wall time."""
    spec = load_sweep("sweep_default")
    assert spec.values == SWEEP_VALUES
    assert spec.seeds == SWEEP_SEEDS
    assert spec.schedulers == SWEEP_SCHEDULERS
    base = load_raw(spec.base)
    started = time.monotonic()
    results = {}
    for value in spec.values:
        for seed in spec.seeds:
            for scheduler in spec.schedulers:
                scenario = scenario_with(
                    base,
                    {spec.parameter: value, "seed": seed, "scheduler": scheduler},
                )
                tasks = generate_workload(scenario.workload)
                results[(value, seed, scheduler)] = simulate(
                    scenario.topology, tasks, scheduler,
                    epoch_s=scenario.epoch_s,
                    freq_optimizer=scenario.freq_optimizer,
                    quantile=scenario.quantile,
                )
    return results, time.monotonic() - started


def test_criterion_01_dominance(default_sweep):
    results, elapsed = default_sweep
    violations = 0
    comparisons = 0
    for value in SWEEP_VALUES:
        for seed in SWEEP_SEEDS:
            optimal = results[(value, seed, "optimal")]
            accepted_opt = {d.task_id: d for d in optimal.decisions if not d.rejected}
            for baseline in ("cloud_only", "nearest_mec"):
                other = results[(value, seed, baseline)]
                accepted_other = {d.task_id: d for d in other.decisions
                                  if not d.rejected}
                common = sorted(set(accepted_opt) & set(accepted_other))
                if not common:
                    continue
                comparisons += 1
                mean_opt = np.mean([accepted_opt[t].energy.total_j for t in common])
                mean_other = np.mean([accepted_other[t].energy.total_j for t in common])
                if mean_opt > mean_other + 1e-12:
                    violations += 1
    ok = violations == 0 and comparisons == len(SWEEP_VALUES) * len(SWEEP_SEEDS) * 2 \
        and elapsed < 120.0
    report(1, ok, f"optimal mean energy <= both baselines on every sweep point "
                  f"({comparisons} comparisons, {violations} violations, "
                  f"sweep built in {elapsed:.1f}s)")
    assert violations == 0
    assert elapsed < 120.0


def test_criterion_02_inverse_proportionality():
    base = load_raw("gamma_zero")
    products = []
    for value in SWEEP_VALUES:
        scenario = scenario_with(base, {"cloud_beta_scale": value})
        tasks = generate_workload(scenario.workload)
        result = simulate(scenario.topology, tasks, "cloud_only",
                          epoch_s=scenario.epoch_s,
                          freq_optimizer=scenario.freq_optimizer,
                          quantile=scenario.quantile)
        products.append(result.metrics.mean_energy_per_task_j * value)
    spread = (max(products) - min(products)) / products[0]
    ok = spread <= 1e-6
    report(2, ok, f"cloud-only mean energy x cloud efficiency constant "
                  f"(relative spread {spread:.2e})")
    assert spread <= 1e-6


def test_criterion_03_baseline_flatness(default_sweep):
    results, _ = default_sweep
    mismatches = 0
    for seed in SWEEP_SEEDS:
        reference = results[(SWEEP_VALUES[0], seed, "nearest_mec")]
        for value in SWEEP_VALUES[1:]:
            candidate = results[(value, seed, "nearest_mec")]
            if candidate.metrics != reference.metrics \
                    or candidate.decisions != reference.decisions:
                mismatches += 1
    ok = mismatches == 0
    report(3, ok, f"nearest-MEC metrics bitwise identical across the sweep "
                  f"({mismatches} mismatches)")
    assert mismatches == 0


def test_criterion_04_mec_share_trend(default_sweep):
    results, _ = default_sweep
    share_means = []
    lowest_shares = [results[(SWEEP_VALUES[0], seed, "optimal")].metrics.mec_share_pct
                     for seed in SWEEP_SEEDS]
    for value in SWEEP_VALUES:
        shares = [results[(value, seed, "optimal")].metrics.mec_share_pct
                  for seed in SWEEP_SEEDS]
        assert all(s is not None for s in shares)
        share_means.append(float(np.mean(shares)))
    rho = spearman(list(SWEEP_VALUES), share_means)
    all_mec_at_lowest = all(s == 100.0 for s in lowest_shares)
    floor_at_highest = share_means[-1] >= 5.0
    ok = all_mec_at_lowest and rho <= -0.9 and floor_at_highest
    report(4, ok, f"MEC share 100% at lowest efficiency, Spearman {rho:.3f} <= -0.9, "
                  f"highest-efficiency share {share_means[-1]:.1f}% >= 5%")
    assert all_mec_at_lowest
    assert rho <= -0.9
    assert floor_at_highest


def test_criterion_05_intensity_split():
    base = load_raw("default")
    holds = 0
    seeds = range(31, 41)
    for seed in seeds:
        scenario = scenario_with(base, {"cloud_beta_scale": SWEEP_VALUES[-1],
                                        "seed": seed})
        tasks = generate_workload(scenario.workload)
        metrics = simulate(scenario.topology, tasks, "optimal",
                           epoch_s=scenario.epoch_s,
                           freq_optimizer=scenario.freq_optimizer,
                           quantile=scenario.quantile).metrics
        if metrics.mean_theta_cloud is not None \
                and metrics.mean_theta_mec is not None \
                and metrics.mean_theta_cloud > metrics.mean_theta_mec:
            holds += 1
    ok = holds == len(list(seeds))
    report(5, ok, f"cloud-placed tasks more compute-intense than MEC-placed "
                  f"in {holds}/10 seeds at the highest cloud efficiency")
    assert holds == 10


def test_criterion_06_oracle_equivalence():
    started = time.monotonic()
    worst = {"grid": 0.0, "sca": 0.0}
    for seed in range(50):
        topology, tasks = random_small_instance(seed, max_tasks=4, max_edges=2)
        brute = brute_force_schedule(tasks, topology, NodeQueueState())
        energy_brute = total_accepted_energy(brute)
        for mode in ("grid", "sca"):
            decisions = schedule_optimal(tasks, topology, NodeQueueState(),
                                         freq_optimizer=mode)
            assert sum(d.rejected for d in decisions) == sum(d.rejected for d in brute)
            energy = total_accepted_energy(decisions)
            if energy_brute > 0:
                worst[mode] = max(worst[mode],
                                  abs(energy - energy_brute) / energy_brute)
    elapsed = time.monotonic() - started
    ok = worst["sca"] <= 0.02 and worst["grid"] <= 0.005 and elapsed < 60.0
    report(6, ok, f"50 instances vs brute force: grid gap {worst['grid']:.2e} "
                  f"<= 0.5%, SCA gap {worst['sca']:.2e} <= 2% in {elapsed:.1f}s")
    assert worst["sca"] <= 0.02
    assert worst["grid"] <= 0.005
    assert elapsed < 60.0


def test_criterion_07_hungarian_exactness():
    rng = np.random.default_rng(1234)
    mismatches = 0
    for _ in range(1000):
        n = int(rng.integers(1, 8))
        m = int(rng.integers(n, 8))
        cost = rng.integers(0, 1000, size=(n, m)).astype(float)
        _, total = hungarian(cost)
        best = min(
            sum(cost[i, p[i]] for i in range(n))
            for p in itertools.permutations(range(m), n)
        )
        if total != best:
            mismatches += 1
    ok = mismatches == 0
    report(7, ok, f"1000 random matrices up to 7x7 match permutation minima "
                  f"exactly ({mismatches} mismatches)")
    assert mismatches == 0


def test_criterion_08_equation_unit_values():
    from mecsim.energetics import comm_energy, compute_energy, efficiency_at
    from mecsim.latency import (
        access_delay_quantile,
        compute_delay,
        propagation_delay,
        transfer_delay,
    )
    from mecsim.model import CpuProfile, NetworkPath, Task
    from mecsim.profiles import get_profile

    REL = 1e-12
    checks = []
    const = CpuProfile(freq_grid_hz=(1e9, 4e9), power_w=(10.0, 10.0),
                       flops_per_cycle=4.0)
    checks.append(math.isclose(efficiency_at(const, 1e9), 4e8, rel_tol=REL))
    checks.append(math.isclose(efficiency_at(const, 2e9), 8e8, rel_tol=REL))

    task = Task(id="t", size_bits=1e6, intensity=100.0, output_ratio=0.0,
                deadline_s=1.0)
    checks.append(math.isclose(compute_energy(task, const, 2.5e9), 0.1, rel_tol=REL))

    wifi = NetworkPath(origin="d", node_id="n", gamma_wired_j_per_bit=1e-10,
                       gamma_wireless_j_per_bit=4e-8, rate_bps=1e6)
    small = Task(id="s", size_bits=1e3, intensity=0.0, output_ratio=0.1,
                 deadline_s=1.0)
    checks.append(math.isclose(comm_energy(small, wifi), 4.411e-5, rel_tol=REL))

    checks.append(math.isclose(
        compute_delay(task, get_profile("i5_2500k"), 2.7e9),
        9.259259259259259e-3, rel_tol=REL))
    checks.append(math.isclose(transfer_delay(task, 1e6), 1.0, rel_tol=REL))

    prop = propagation_delay(1000.0, 7.5e-6)
    checks.append(prop == 1000.0 * 7.5e-6)  # the plain product, no hidden factors
    checks.append(math.isclose(prop, 7.5e-3, rel_tol=REL))

    samples = [i / 1000 for i in range(1, 101)]
    checks.append(access_delay_quantile(samples, 0.98) == 0.098)

    ok = all(checks)
    report(8, ok, f"hand-evaluated energy/delay values reproduced at 1e-12 "
                  f"({sum(checks)}/{len(checks)} checks)")
    assert all(checks)


def test_criterion_09_hard_deadline_invariant(default_sweep):
    results, _ = default_sweep
    violations = 0
    accepted_total = 0
    for (value, seed, scheduler), result in results.items():
        by_id = {t.id: t for t in result.tasks}
        # replay each run against a fresh queue, decision order preserved
        scenario = scenario_with(load_raw("default"),
                                 {"cloud_beta_scale": value, "seed": seed})
        topology = scenario.topology
        shadow = NodeQueueState()
        for decision in result.decisions:
            if decision.rejected:
                continue
            accepted_total += 1
            task = by_id[decision.task_id]
            node = topology.node(decision.node_id)
            path = topology.path(task.origin, decision.node_id)
            again = total_delay(task, node, path, decision.frequency_hz, shadow,
                                quantile=scenario.quantile)
            if again.total_s > task.deadline_s:
                violations += 1
            occupy_for(task, node, path, again, shadow)
    ok = violations == 0 and accepted_total > 0
    report(9, ok, f"zero recomputed deadline violations across "
                  f"{accepted_total} accepted placements")
    assert violations == 0


def test_criterion_10_determinism(tmp_path, capsys):
    code1 = cli_main(["run", "--config", "default"])
    first = capsys.readouterr().out
    code2 = cli_main(["run", "--config", "default"])
    second = capsys.readouterr().out
    run_identical = code1 == code2 == 0 and first == second

    sweep_file = tmp_path / "sweep.yaml"
    sweep_file.write_text(
        "base: gamma_zero\nparameter: cloud_beta_scale\nvalues: [1, 8]\n"
        "seeds: [7]\nschedulers: [optimal, cloud_only]\n"
    )
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    cli_main(["sweep", "--config", str(sweep_file), "--out", str(out_a)])
    cli_main(["sweep", "--config", str(sweep_file), "--out", str(out_b)])
    capsys.readouterr()
    sweep_identical = out_a.read_bytes() == out_b.read_bytes()

    ok = run_identical and sweep_identical
    report(10, ok, "repeated runs and sweeps are byte-identical")
    assert run_identical
    assert sweep_identical
