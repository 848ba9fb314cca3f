"""Shared builders for the test suite."""

from __future__ import annotations

import math

import numpy as np

from mecsim.model import ComputeNode, CpuProfile, NetworkPath, Task, Topology
from mecsim.profiles import get_profile


def const_profile(power_w: float = 10.0, s: float = 4.0,
                  f_lo: float = 1e9, f_hi: float = 4e9) -> CpuProfile:
    """Flat power curve: beta(f) = f * s / power, monotone in f."""
    return CpuProfile(freq_grid_hz=(f_lo, f_hi), power_w=(power_w, power_w),
                      flops_per_cycle=s)


def free_path(origin: str, node_id: str, **kwargs) -> NetworkPath:
    """Zero-cost, infinitely fast link (on-device sentinel)."""
    return NetworkPath(origin=origin, node_id=node_id, rate_bps=math.inf, **kwargs)


def simple_task(**kwargs) -> Task:
    defaults = dict(id="t0", size_bits=1e6, intensity=100.0, output_ratio=0.0,
                    deadline_s=10.0, arrival_s=0.0, origin="dev",
                    uplink_access_delay_s=0.0)
    defaults.update(kwargs)
    return Task(**defaults)


def two_edge_one_cloud(profile: CpuProfile | None = None) -> Topology:
    """2 MEC nodes + cloud, all reachable from origin 'dev'."""
    prof = profile or get_profile("microserver")
    nodes = (
        ComputeNode(id="e1", kind="edge", profile=prof,
                    f_min_hz=prof.f_lo_hz, f_max_hz=prof.f_hi_hz),
        ComputeNode(id="e2", kind="edge", profile=prof,
                    f_min_hz=prof.f_lo_hz, f_max_hz=prof.f_hi_hz),
        ComputeNode(id="cloud", kind="cloud", profile=prof,
                    f_min_hz=prof.f_lo_hz, f_max_hz=prof.f_hi_hz),
    )
    paths = (
        NetworkPath(origin="dev", node_id="e1", gamma_wired_j_per_bit=2e-11,
                    gamma_wireless_j_per_bit=4e-8, rate_bps=1e8, distance_km=0.5),
        NetworkPath(origin="dev", node_id="e2", gamma_wired_j_per_bit=2e-11,
                    gamma_wireless_j_per_bit=4e-8, rate_bps=1e8, distance_km=2.0),
        NetworkPath(origin="dev", node_id="cloud", gamma_wired_j_per_bit=6e-8,
                    gamma_wireless_j_per_bit=4e-8, rate_bps=1e8, distance_km=1000.0),
    )
    return Topology(nodes=nodes, paths=paths)


def random_small_instance(seed: int, max_tasks: int = 4, max_edges: int = 2):
    """Feasible-by-construction random batch plus topology, one epoch."""
    rng = np.random.default_rng(seed)
    prof = get_profile("microserver")
    n_edges = int(rng.integers(1, max_edges + 1))
    nodes = [
        ComputeNode(id=f"e{k}", kind="edge", profile=prof,
                    f_min_hz=prof.f_lo_hz, f_max_hz=prof.f_hi_hz)
        for k in range(n_edges)
    ]
    nodes.append(ComputeNode(id="cloud", kind="cloud", profile=prof,
                             f_min_hz=prof.f_lo_hz, f_max_hz=prof.f_hi_hz))
    paths = []
    for node in nodes:
        is_cloud = node.kind == "cloud"
        paths.append(NetworkPath(
            origin="dev", node_id=node.id,
            gamma_wired_j_per_bit=6e-8 if is_cloud else 2e-11,
            gamma_wireless_j_per_bit=4e-8,
            rate_bps=1e8,
            distance_km=1000.0 if is_cloud else float(rng.uniform(0.2, 3.0)),
            response_access_delay_s=tuple(rng.uniform(5e-4, 5e-3, 6)),
        ))
    topology = Topology(nodes=tuple(nodes), paths=tuple(paths))

    n_tasks = int(rng.integers(1, max_tasks + 1))
    tasks = [
        Task(
            id=f"t{i}",
            size_bits=float(rng.lognormal(math.log(3e5), 0.4)),
            intensity=float(rng.uniform(10, 300)),
            output_ratio=float(rng.uniform(0.0, 0.1)),
            deadline_s=float(rng.uniform(0.15, 0.8)),
            arrival_s=float(rng.uniform(0.0, 0.05)),
            origin="dev",
            uplink_access_delay_s=float(rng.uniform(0.0, 2e-3)),
        )
        for i in range(n_tasks)
    ]
    tasks.sort(key=lambda t: (t.arrival_s, t.id))
    return topology, tasks
