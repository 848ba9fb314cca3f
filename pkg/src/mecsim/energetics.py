"""Per-task energy models.

Computation: a node running at clock f delivers ``beta(f) = f * s / P(f)``
FLOP per Joule (s = FLOP per cycle, P the interpolated package power), so
a task of L bits and intensity theta FLOP/bit costs ``L * theta / beta(f)``
Joules.  Communication: moving the request and its response costs
``L * (1 + o) * (gamma_wired + gamma_wireless)`` Joules.  Both are
energies per task; no idle or static node power is modelled.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import CpuProfile, ComputeNode, NetworkPath, Task


@dataclass(frozen=True)
class EnergyBreakdown:
    compute_j: float
    comm_j: float

    @property
    def total_j(self) -> float:
        return self.compute_j + self.comm_j


def efficiency_at(profile: CpuProfile, f_hz: float) -> float:
    """Compute efficiency beta(f) in FLOP per Joule.

    Piecewise-linear in the power table; exact at grid points.  Raises
    ValueError when f lies outside the tabulated span.
    """
    power = profile.power_at(f_hz)
    return f_hz * profile.flops_per_cycle / power


def compute_energy(task: Task, profile: CpuProfile, f_hz: float) -> float:
    """Energy of executing the task at clock f: L * theta / beta(f)."""
    return task.size_bits * task.intensity / efficiency_at(profile, f_hz)


def comm_energy(task: Task, path: NetworkPath) -> float:
    """Energy of moving L bits there and o*L bits back over the path."""
    return (
        task.size_bits
        * (1.0 + task.output_ratio)
        * (path.gamma_wired_j_per_bit + path.gamma_wireless_j_per_bit)
    )


def local_node_energy(
    task: Task, node: ComputeNode, f_hz: float, path: NetworkPath
) -> EnergyBreakdown:
    """Total energy of serving the task on ``node`` at clock f via ``path``."""
    return EnergyBreakdown(
        compute_j=compute_energy(task, node.profile, f_hz),
        comm_j=comm_energy(task, path),
    )
