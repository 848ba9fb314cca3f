"""Delay components and the per-node FIFO queue state.

End-to-end service time of a task is the sum of six parts: the measured
uplink access delay, the link transfer time L(1+o)/r, the propagation
delay (coefficient times distance), the wait for the node to become
free, the computation time L*theta/(f*s), and the response's channel
access delay taken as an empirical quantile (default the 98th
percentile, so most responses return no later than planned).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import CLOUD, ComputeNode, CpuProfile, NetworkPath, Task

DEFAULT_ACCESS_QUANTILE = 0.98


@dataclass(frozen=True)
class DelayBreakdown:
    uplink_access_s: float
    transfer_s: float
    propagation_s: float
    queue_s: float
    compute_s: float
    response_access_s: float

    @property
    def total_s(self) -> float:
        return (
            self.uplink_access_s
            + self.transfer_s
            + self.propagation_s
            + self.queue_s
            + self.compute_s
            + self.response_access_s
        )


@dataclass
class NodeQueueState:
    """Busy-until horizon per edge node; cloud nodes carry no state.

    Mutated only by the single-threaded scheduling loop; busy_until
    never moves backwards within a run.
    """

    busy_until_s: dict[str, float] = field(default_factory=dict)

    def busy_until(self, node_id: str) -> float:
        return self.busy_until_s.get(node_id, 0.0)

    def occupy(self, node_id: str, start_s: float, duration_s: float) -> None:
        new_horizon = start_s + duration_s
        if new_horizon < self.busy_until(node_id):
            raise ValueError(f"node {node_id}: busy horizon may not decrease")
        self.busy_until_s[node_id] = new_horizon

    def copy(self) -> "NodeQueueState":
        return NodeQueueState(dict(self.busy_until_s))


def compute_delay(task: Task, profile: CpuProfile, f_hz: float) -> float:
    """Computation time L * theta / (f * s)."""
    profile.check_frequency(f_hz)
    return task.work_flop / (f_hz * profile.flops_per_cycle)


def transfer_delay(task: Task, rate_bps: float) -> float:
    """Link occupancy L * (1 + o) / r for request plus response."""
    return task.size_bits * (1.0 + task.output_ratio) / rate_bps


def propagation_delay(distance_km: float, coeff_s_per_km: float = 7.5e-6) -> float:
    return distance_km * coeff_s_per_km


def access_delay_quantile(samples, q: float) -> float:
    """Nearest-rank empirical quantile: sorted value at ceil(q*n), 1-based.

    Deterministic by construction (no interpolation); an empty sample
    set means no access delay.
    """
    if not 0.0 < q < 1.0:
        raise ValueError("quantile must lie strictly between 0 and 1")
    ordered = sorted(samples)
    if not ordered:
        return 0.0
    rank = math.ceil(q * len(ordered))
    return ordered[rank - 1]


def ready_time(task: Task, path: NetworkPath) -> float:
    """Instant the request reaches the node: arrival, uplink access,
    uplink share of the transfer, then propagation."""
    return (
        task.arrival_s
        + task.uplink_access_delay_s
        + task.size_bits / path.rate_bps
        + propagation_delay(path.distance_km, path.prop_coeff_s_per_km)
    )


def queueing_delay(state: NodeQueueState, node: ComputeNode, ready_at_s: float) -> float:
    """Wait until the node frees up; clouds assign an idle server at once."""
    if node.kind == CLOUD:
        return 0.0
    return max(0.0, state.busy_until(node.id) - ready_at_s)


def total_delay(
    task: Task,
    node: ComputeNode,
    path: NetworkPath,
    f_hz: float,
    state: NodeQueueState,
    *,
    quantile: float = DEFAULT_ACCESS_QUANTILE,
) -> DelayBreakdown:
    """Assemble the full six-component breakdown for one placement."""
    return DelayBreakdown(
        uplink_access_s=task.uplink_access_delay_s,
        transfer_s=transfer_delay(task, path.rate_bps),
        propagation_s=propagation_delay(path.distance_km, path.prop_coeff_s_per_km),
        queue_s=queueing_delay(state, node, ready_time(task, path)),
        compute_s=compute_delay(task, node.profile, f_hz),
        response_access_s=access_delay_quantile(path.response_access_delay_s, quantile),
    )


def occupy_for(task: Task, node: ComputeNode, path: NetworkPath,
               delay: DelayBreakdown, state: NodeQueueState) -> None:
    """Advance the node's busy horizon after accepting a placement.

    Service occupies the node for the computation time only; link
    transfers do not block it.
    """
    if node.kind == CLOUD:
        return
    start = ready_time(task, path) + delay.queue_s
    state.occupy(node.id, start, delay.compute_s)
