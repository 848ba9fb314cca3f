"""Domain types shared by every other module.

A scenario is a set of :class:`Task` requests, a :class:`Topology` of
compute nodes (edge or cloud) and origin-to-node network paths.  All
types are immutable after construction and safe to share across
concurrent evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

EDGE = "edge"
CLOUD = "cloud"


@dataclass(frozen=True)
class Task:
    """One offloading request.

    ``size_bits`` is the request length L, ``intensity`` the required
    FLOP per input bit, ``output_ratio`` the response size as a fraction
    of the request (the response is ``output_ratio * size_bits`` bits).
    ``uplink_access_delay_s`` is the random-access delay the request
    already suffered on its way in; it is measured, not modelled.
    """

    id: str
    size_bits: float
    intensity: float
    output_ratio: float
    deadline_s: float
    arrival_s: float = 0.0
    origin: str = "local"
    uplink_access_delay_s: float = 0.0

    def __post_init__(self):
        if not self.size_bits > 0:
            raise ValueError(f"task {self.id}: size_bits must be > 0")
        if not self.deadline_s > 0:
            raise ValueError(f"task {self.id}: deadline_s must be > 0")
        if self.intensity < 0:
            raise ValueError(f"task {self.id}: intensity must be >= 0")
        if self.output_ratio < 0:
            raise ValueError(f"task {self.id}: output_ratio must be >= 0")
        if self.arrival_s < 0:
            raise ValueError(f"task {self.id}: arrival_s must be >= 0")
        if self.uplink_access_delay_s < 0:
            raise ValueError(f"task {self.id}: uplink_access_delay_s must be >= 0")

    @property
    def work_flop(self) -> float:
        """Total operations required: L * intensity."""
        return self.size_bits * self.intensity


@dataclass(frozen=True)
class CpuProfile:
    """Tabulated package power versus clock frequency.

    Power is interpolated piecewise-linearly between grid points; the
    table is the single source of truth.  ``flops_per_cycle`` is the
    operations-per-clock-tick factor, so throughput at frequency f is
    ``f * flops_per_cycle`` FLOP/s.
    """

    freq_grid_hz: tuple[float, ...]
    power_w: tuple[float, ...]
    flops_per_cycle: float

    def __post_init__(self):
        object.__setattr__(self, "freq_grid_hz", tuple(float(f) for f in self.freq_grid_hz))
        object.__setattr__(self, "power_w", tuple(float(p) for p in self.power_w))

    @property
    def f_lo_hz(self) -> float:
        return self.freq_grid_hz[0]

    @property
    def f_hi_hz(self) -> float:
        return self.freq_grid_hz[-1]

    def check_frequency(self, f_hz: float) -> None:
        if not (self.f_lo_hz <= f_hz <= self.f_hi_hz):
            raise ValueError(
                f"frequency {f_hz:g} Hz outside profile span "
                f"[{self.f_lo_hz:g}, {self.f_hi_hz:g}] Hz"
            )

    def power_at(self, f_hz: float):
        """Interpolated package power P(f) in Watts; f may be an array."""
        if np.isscalar(f_hz):
            self.check_frequency(f_hz)
        return np.interp(f_hz, self.freq_grid_hz, self.power_w)

    def problems(self) -> list[str]:
        """Structural defects, phrased for topology validation."""
        out = []
        if len(self.freq_grid_hz) < 2:
            out.append("frequency grid needs at least 2 points")
        if any(b <= a for a, b in zip(self.freq_grid_hz, self.freq_grid_hz[1:])):
            out.append("grid not strictly increasing")
        if len(self.power_w) != len(self.freq_grid_hz):
            out.append("power table length differs from frequency grid")
        if any(p <= 0 for p in self.power_w):
            out.append("power values must be positive")
        if not self.flops_per_cycle > 0:
            out.append("flops_per_cycle must be positive")
        return out


@dataclass(frozen=True)
class ComputeNode:
    """Edge or cloud execution resource.

    Edge nodes have a finite server count (default 1) and queue work;
    cloud nodes serve every task on an independent server, encoded as
    ``servers=None`` (unbounded).
    """

    id: str
    kind: str
    profile: CpuProfile
    f_min_hz: float
    f_max_hz: float
    servers: int | None = None

    def __post_init__(self):
        if self.kind == EDGE and self.servers is None:
            object.__setattr__(self, "servers", 1)

    @property
    def is_cloud(self) -> bool:
        return self.kind == CLOUD

    def problems(self) -> list[str]:
        out = [f"node {self.id}: {p}" for p in self.profile.problems()]
        if self.kind not in (EDGE, CLOUD):
            out.append(f"node {self.id}: kind must be '{EDGE}' or '{CLOUD}'")
        if not self.f_min_hz <= self.f_max_hz:
            out.append(f"node {self.id}: f_min_hz > f_max_hz")
        if not out and not (
            self.profile.f_lo_hz <= self.f_min_hz
            and self.f_max_hz <= self.profile.f_hi_hz
        ):
            out.append(f"node {self.id}: frequency range outside profile grid span")
        if self.kind == CLOUD and self.servers is not None:
            out.append(f"node {self.id}: cloud nodes must have unbounded servers")
        if self.kind == EDGE and (self.servers is None or self.servers < 1):
            out.append(f"node {self.id}: edge nodes need a finite server count >= 1")
        return out


@dataclass(frozen=True)
class NetworkPath:
    """Origin-to-node communication descriptor.

    ``gamma_wired_j_per_bit`` / ``gamma_wireless_j_per_bit`` are the
    per-bit transmission energies of the wired and wireless segments.
    ``response_access_delay_s`` is an empirical sample set of channel
    access delays seen by responses; empty means no access delay.
    A zero-cost on-device path uses gamma=0 and ``rate_bps=math.inf``.
    """

    origin: str
    node_id: str
    gamma_wired_j_per_bit: float = 0.0
    gamma_wireless_j_per_bit: float = 0.0
    rate_bps: float = math.inf
    distance_km: float = 0.0
    prop_coeff_s_per_km: float = 7.5e-6
    response_access_delay_s: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "response_access_delay_s",
            tuple(float(x) for x in self.response_access_delay_s),
        )

    def problems(self) -> list[str]:
        tag = f"path ({self.origin} -> {self.node_id})"
        out = []
        if not self.rate_bps > 0:
            out.append(f"{tag}: rate_bps must be positive")
        if self.gamma_wired_j_per_bit < 0 or self.gamma_wireless_j_per_bit < 0:
            out.append(f"{tag}: gamma values must be >= 0")
        if self.distance_km < 0:
            out.append(f"{tag}: distance_km must be >= 0")
        if self.prop_coeff_s_per_km < 0:
            out.append(f"{tag}: prop_coeff_s_per_km must be >= 0")
        if any(s < 0 for s in self.response_access_delay_s):
            out.append(f"{tag}: delay samples must be >= 0")
        return out


@dataclass(frozen=True)
class Topology:
    """Compute nodes plus one path per (origin, node) pair in use."""

    nodes: tuple[ComputeNode, ...]
    paths: tuple[NetworkPath, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "paths", tuple(self.paths))

    @cached_property
    def _by_id(self) -> dict[str, ComputeNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def _path_map(self) -> dict[tuple[str, str], NetworkPath]:
        return {(p.origin, p.node_id): p for p in self.paths}

    @cached_property
    def origins(self) -> tuple[str, ...]:
        return tuple(sorted({p.origin for p in self.paths}))

    def node(self, node_id: str) -> ComputeNode:
        return self._by_id[node_id]

    def path(self, origin: str, node_id: str) -> NetworkPath:
        return self._path_map[(origin, node_id)]

    def has_path(self, origin: str, node_id: str) -> bool:
        return (origin, node_id) in self._path_map

    def edge_nodes(self) -> list[ComputeNode]:
        return sorted((n for n in self.nodes if n.kind == EDGE), key=lambda n: n.id)

    def cloud_nodes(self) -> list[ComputeNode]:
        return sorted((n for n in self.nodes if n.kind == CLOUD), key=lambda n: n.id)


def validate(topology: Topology) -> list[str]:
    """Collect every invariant violation; an empty list means ok.

    Checks node uniqueness, per-node profile and range invariants,
    per-path field invariants, and that each origin appearing in the
    path set has a path to every node.
    """
    errors: list[str] = []
    seen: set[str] = set()
    for node in topology.nodes:
        if node.id in seen:
            errors.append(f"duplicate node id {node.id!r}")
        seen.add(node.id)
        errors.extend(node.problems())

    pair_count: dict[tuple[str, str], int] = {}
    for path in topology.paths:
        key = (path.origin, path.node_id)
        pair_count[key] = pair_count.get(key, 0) + 1
        errors.extend(path.problems())
        if path.node_id not in seen:
            errors.append(f"path ({path.origin} -> {path.node_id}): unknown node")
    for key, count in pair_count.items():
        if count > 1:
            errors.append(f"duplicate path ({key[0]} -> {key[1]})")

    for origin in topology.origins:
        for node in topology.nodes:
            if (origin, node.id) not in pair_count:
                errors.append(f"missing path ({origin} -> {node.id})")
    return errors
