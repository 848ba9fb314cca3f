"""Seeded workload generation, the epoch loop, and metrics aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .latency import NodeQueueState, occupy_for, total_delay
from .model import Task, Topology, validate
from .scheduler import SCHEDULERS, PlacementDecision

DEFAULT_EPOCH_S = 0.1


@dataclass(frozen=True)
class DistSpec:
    """uniform(low, high) or lognormal(median, sigma)."""

    kind: str
    a: float
    b: float

    def __post_init__(self):
        if self.kind == "uniform":
            if not (0 <= self.a <= self.b):
                raise ValueError("uniform needs 0 <= low <= high")
        elif self.kind == "lognormal":
            if not (self.a > 0 and self.b >= 0):
                raise ValueError("lognormal needs median > 0 and sigma >= 0")
        else:
            raise ValueError(f"unknown distribution {self.kind!r}")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(self.a, self.b, size)
        return rng.lognormal(math.log(self.a), self.b, size)


@dataclass(frozen=True)
class WorkloadSpec:
    """Random task stream: Poisson arrivals, per-field distributions.

    Give either ``n_tasks`` (exact count) or ``horizon_s`` (arrivals are
    drawn until the horizon, so the count itself is Poisson).
    """

    rate_per_s: float
    size_bits: DistSpec
    intensity: DistSpec
    output_ratio: DistSpec
    deadline_s: DistSpec
    uplink_access_delay_s: DistSpec
    origins: tuple[tuple[str, float], ...]
    seed: int = 0
    n_tasks: int | None = None
    horizon_s: float | None = None

    def __post_init__(self):
        if not self.rate_per_s > 0:
            raise ValueError("arrival rate must be positive")
        if (self.n_tasks is None) == (self.horizon_s is None):
            raise ValueError("give exactly one of n_tasks or horizon_s")
        if self.n_tasks is not None and self.n_tasks < 0:
            raise ValueError("n_tasks must be >= 0")
        if not self.origins or any(w < 0 for _, w in self.origins) \
                or not sum(w for _, w in self.origins) > 0:
            raise ValueError("origins need non-negative weights summing > 0")


def generate_workload(spec: WorkloadSpec) -> list[Task]:
    """Deterministic for a fixed seed; arrivals sorted ascending."""
    rng = np.random.default_rng(spec.seed)
    if spec.n_tasks is not None:
        gaps = rng.exponential(1.0 / spec.rate_per_s, spec.n_tasks)
        arrivals = np.cumsum(gaps)
    else:
        chunks = []
        t = 0.0
        while t <= spec.horizon_s:
            gaps = rng.exponential(1.0 / spec.rate_per_s, 256)
            chunks.append(t + np.cumsum(gaps))
            t = float(chunks[-1][-1])
        arrivals = np.concatenate(chunks)
        arrivals = arrivals[arrivals <= spec.horizon_s]
    n = len(arrivals)

    sizes = spec.size_bits.sample(rng, n)
    intensities = spec.intensity.sample(rng, n)
    ratios = spec.output_ratio.sample(rng, n)
    deadlines = spec.deadline_s.sample(rng, n)
    uplinks = spec.uplink_access_delay_s.sample(rng, n)
    names = [o for o, _ in spec.origins]
    weights = np.asarray([w for _, w in spec.origins], dtype=float)
    origins = rng.choice(names, size=n, p=weights / weights.sum())

    return [
        Task(
            id=f"t{i:04d}",
            size_bits=float(sizes[i]),
            intensity=float(intensities[i]),
            output_ratio=float(ratios[i]),
            deadline_s=float(deadlines[i]),
            arrival_s=float(arrivals[i]),
            origin=str(origins[i]),
            uplink_access_delay_s=float(uplinks[i]),
        )
        for i in range(n)
    ]


@dataclass(frozen=True)
class RunMetrics:
    """Flat record of one simulation run; means cover accepted tasks
    only and are None when the underlying group is empty."""

    n_generated: int
    n_accepted: int
    n_rejected: int
    rejection_rate: float
    mec_share_pct: float | None
    mean_energy_per_task_j: float | None
    mean_compute_j: float | None
    mean_comm_j: float | None
    mean_uplink_access_s: float | None
    mean_transfer_s: float | None
    mean_propagation_s: float | None
    mean_queue_s: float | None
    mean_compute_s: float | None
    mean_response_access_s: float | None
    mean_delay_s: float | None
    mean_theta_mec: float | None
    mean_theta_cloud: float | None

    def as_row(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class SimulationResult:
    metrics: RunMetrics
    decisions: list[PlacementDecision]
    tasks: list[Task]


class DeadlineViolation(RuntimeError):
    """An accepted placement failed the independent delay recheck."""


def _aggregate(tasks: list[Task], decisions: list[PlacementDecision],
               topology: Topology) -> RunMetrics:
    by_id = {t.id: t for t in tasks}
    accepted = [d for d in decisions if not d.rejected]
    n_gen, n_acc = len(tasks), len(accepted)

    def mean(values) -> float | None:
        values = list(values)
        return float(np.mean(values)) if values else None

    on_edge = [d for d in accepted if not topology.node(d.node_id).is_cloud]
    on_cloud = [d for d in accepted if topology.node(d.node_id).is_cloud]
    return RunMetrics(
        n_generated=n_gen,
        n_accepted=n_acc,
        n_rejected=n_gen - n_acc,
        rejection_rate=(n_gen - n_acc) / n_gen if n_gen else 0.0,
        mec_share_pct=100.0 * len(on_edge) / n_acc if n_acc else None,
        mean_energy_per_task_j=mean(d.energy.total_j for d in accepted),
        mean_compute_j=mean(d.energy.compute_j for d in accepted),
        mean_comm_j=mean(d.energy.comm_j for d in accepted),
        mean_uplink_access_s=mean(d.delay.uplink_access_s for d in accepted),
        mean_transfer_s=mean(d.delay.transfer_s for d in accepted),
        mean_propagation_s=mean(d.delay.propagation_s for d in accepted),
        mean_queue_s=mean(d.delay.queue_s for d in accepted),
        mean_compute_s=mean(d.delay.compute_s for d in accepted),
        mean_response_access_s=mean(d.delay.response_access_s for d in accepted),
        mean_delay_s=mean(d.delay.total_s for d in accepted),
        mean_theta_mec=mean(by_id[d.task_id].intensity for d in on_edge),
        mean_theta_cloud=mean(by_id[d.task_id].intensity for d in on_cloud),
    )


def simulate(
    topology: Topology,
    tasks: list[Task],
    scheduler: str = "optimal",
    *,
    epoch_s: float = DEFAULT_EPOCH_S,
    freq_optimizer: str = "sca",
    quantile: float = 0.98,
) -> SimulationResult:
    """Run one scenario: group tasks into epochs, schedule each epoch
    carrying queue state forward, and re-verify every accepted deadline
    against an independently replayed queue.
    """
    errors = validate(topology)
    if errors:
        raise ValueError("invalid topology: " + "; ".join(errors))
    if scheduler not in SCHEDULERS:
        raise KeyError(scheduler)
    if not epoch_s > 0:
        raise ValueError("epoch_s must be positive")
    schedule = SCHEDULERS[scheduler]
    kwargs = {"quantile": quantile}
    if scheduler != "brute_force":
        kwargs["freq_optimizer"] = freq_optimizer

    ordered = sorted(tasks, key=lambda t: (t.arrival_s, t.id))
    state = NodeQueueState()
    shadow = NodeQueueState()
    decisions: list[PlacementDecision] = []
    i = 0
    while i < len(ordered):
        epoch = math.floor(ordered[i].arrival_s / epoch_s)
        j = i
        while j < len(ordered) and math.floor(ordered[j].arrival_s / epoch_s) == epoch:
            j += 1
        batch = ordered[i:j]
        batch_decisions = schedule(batch, topology, state, **kwargs)
        for task, decision in zip(batch, batch_decisions):
            if decision.rejected:
                continue
            node = topology.node(decision.node_id)
            path = topology.path(task.origin, decision.node_id)
            again = total_delay(
                task, node, path, decision.frequency_hz, shadow, quantile=quantile
            )
            if again != decision.delay:
                raise DeadlineViolation(
                    f"task {task.id}: replayed delay differs from scheduled delay"
                )
            if again.total_s > task.deadline_s:
                raise DeadlineViolation(
                    f"task {task.id}: accepted with delay {again.total_s:g} s "
                    f"over deadline {task.deadline_s:g} s"
                )
            occupy_for(task, node, path, again, shadow)
        decisions.extend(batch_decisions)
        i = j

    return SimulationResult(
        metrics=_aggregate(ordered, decisions, topology),
        decisions=decisions,
        tasks=ordered,
    )


def run(topology, tasks, scheduler="optimal", **kwargs) -> RunMetrics:
    """Metrics-only wrapper around :func:`simulate`."""
    return simulate(topology, tasks, scheduler, **kwargs).metrics
