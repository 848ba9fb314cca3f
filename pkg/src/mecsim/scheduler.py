"""Joint task-to-node assignment and clock-frequency selection.

The mixed problem (integer placement, continuous frequency) decouples:
for each (task, node) pair the minimum-energy deadline-feasible clock is
found first, then a minimum-cost one-to-one matching assigns tasks to
edge nodes and per-task cloud clones.  Two frequency optimizers are
provided: an exhaustive dense-grid search (the correctness anchor) and a
successive-convex-approximation descent that walks the kinks of the
piecewise-linear power table.  Simpler policies (cloud only, nearest
edge) and an exhaustive small-instance solver serve as baselines and as
a verification oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energetics import (
    EnergyBreakdown,
    comm_energy,
    compute_energy,
    local_node_energy,
)
from .latency import (
    DEFAULT_ACCESS_QUANTILE,
    DelayBreakdown,
    NodeQueueState,
    access_delay_quantile,
    occupy_for,
    propagation_delay,
    queueing_delay,
    ready_time,
    total_delay,
    transfer_delay,
)
from .model import ComputeNode, NetworkPath, Task, Topology

DEFAULT_GRID_POINTS = 512
SCA_DESCENT_SLACK = 1e-12


class GuardRailError(ValueError):
    """Raised when an instance exceeds the brute-force size limits."""


@dataclass(frozen=True)
class PlacementDecision:
    task_id: str
    node_id: str | None
    frequency_hz: float | None = None
    energy: EnergyBreakdown | None = None
    delay: DelayBreakdown | None = None

    @property
    def rejected(self) -> bool:
        return self.node_id is None


@dataclass(frozen=True)
class FrequencyChoice:
    """Optimal clock for one (task, node, path) pair."""

    f_hz: float
    energy: EnergyBreakdown
    delay: DelayBreakdown


def _rejected(task: Task) -> PlacementDecision:
    return PlacementDecision(task_id=task.id, node_id=None)


def frequency_candidates(node: ComputeNode, n_points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Dense frequency grid over the node range, plus all profile knots."""
    knots = [f for f in node.profile.freq_grid_hz if node.f_min_hz <= f <= node.f_max_hz]
    lin = np.linspace(node.f_min_hz, node.f_max_hz, n_points)
    return np.unique(np.concatenate([lin, np.asarray(knots, dtype=float)]))


def optimize_frequency_grid(
    task: Task,
    node: ComputeNode,
    path: NetworkPath,
    state: NodeQueueState,
    *,
    n_points: int = DEFAULT_GRID_POINTS,
    quantile: float = DEFAULT_ACCESS_QUANTILE,
) -> FrequencyChoice | None:
    """Exhaustive search for the minimum-energy feasible clock.

    Evaluates total energy on the dense candidate grid, discards
    frequencies whose end-to-end delay exceeds the deadline, and returns
    the cheapest survivor (ties broken toward the lower frequency).
    Returns None when no candidate meets the deadline.

    The vectorised arithmetic below mirrors the scalar primitives
    operation-for-operation so the selected point reproduces bit-equal
    energy and delay when re-evaluated through them.
    """
    f = frequency_candidates(node, n_points)
    s = node.profile.flops_per_cycle

    # Delay: only the computation term depends on f.
    fixed = (
        task.uplink_access_delay_s
        + transfer_delay(task, path.rate_bps)
        + propagation_delay(path.distance_km, path.prop_coeff_s_per_km)
        + queueing_delay(state, node, ready_time(task, path))
    )
    response = access_delay_quantile(path.response_access_delay_s, quantile)
    totals = (fixed + task.work_flop / (f * s)) + response
    feasible = totals <= task.deadline_s
    if not feasible.any():
        return None

    beta = f * s / node.profile.power_at(f)
    energy = task.work_flop / beta + comm_energy(task, path)
    energy = np.where(feasible, energy, np.inf)
    best = int(np.argmin(energy))  # first minimum = lowest frequency
    f_best = float(f[best])
    return FrequencyChoice(
        f_hz=f_best,
        energy=local_node_energy(task, node, f_best, path),
        delay=total_delay(task, node, path, f_best, state, quantile=quantile),
    )


def _feasible_interval(
    task: Task,
    node: ComputeNode,
    path: NetworkPath,
    state: NodeQueueState,
    quantile: float,
) -> tuple[float, float] | None:
    """Clock interval meeting the deadline, or None."""
    fixed = (
        task.uplink_access_delay_s
        + transfer_delay(task, path.rate_bps)
        + propagation_delay(path.distance_km, path.prop_coeff_s_per_km)
        + queueing_delay(state, node, ready_time(task, path))
        + access_delay_quantile(path.response_access_delay_s, quantile)
    )
    slack = task.deadline_s - fixed
    if task.work_flop == 0.0:
        return (node.f_min_hz, node.f_max_hz) if slack >= 0.0 else None
    if slack <= 0.0:
        return None
    f_lo = max(node.f_min_hz, task.work_flop / (node.profile.flops_per_cycle * slack))
    if f_lo > node.f_max_hz:
        return None
    return (f_lo, node.f_max_hz)


def optimize_frequency_sca(
    task: Task,
    node: ComputeNode,
    path: NetworkPath,
    state: NodeQueueState,
    *,
    tol_hz: float = 1e3,
    max_iter: int = 64,
    quantile: float = DEFAULT_ACCESS_QUANTILE,
    history: list | None = None,
) -> FrequencyChoice | None:
    """Successive convex approximation over the clock frequency.

    On each segment of the piecewise-linear power table the energy is
    exactly c*(a + b*f)/f with the segment's secant coefficients, a
    convex surrogate tight at the current iterate; its minimiser sits at
    a segment endpoint.  The descent therefore walks from knot to knot,
    moving while the true objective strictly improves, and stops at a
    stationary knot, after max_iter rounds, or when the step shrinks
    below tol_hz.  The true objective is non-increasing along the way.

    ``history``, when given, collects the true objective value at every
    iterate (initial point included).
    """
    interval = _feasible_interval(task, node, path, state, quantile)
    if interval is None:
        return None
    f_lo, f_hi = interval

    def objective(f_hz: float) -> float:
        return compute_energy(task, node.profile, f_hz) + comm_energy(task, path)

    if task.work_flop == 0.0:
        f_star = f_lo  # energy is flat; prefer the lowest clock
        if history is not None:
            history.append(objective(f_star))
    else:
        knots = sorted(
            {f_lo, f_hi}
            | {g for g in node.profile.freq_grid_hz if f_lo < g < f_hi}
        )
        values = [objective(k) for k in knots]
        idx = len(knots) - 1
        if history is not None:
            history.append(values[idx])
        for _ in range(max_iter):
            best_next = None
            for neighbour in (idx - 1, idx + 1):
                if 0 <= neighbour < len(knots) and values[neighbour] < values[idx]:
                    if best_next is None or values[neighbour] < values[best_next]:
                        best_next = neighbour
            if best_next is None:
                break
            if values[best_next] > values[idx] + SCA_DESCENT_SLACK:
                raise RuntimeError("SCA descent produced an increasing step")
            step = abs(knots[best_next] - knots[idx])
            idx = best_next
            if history is not None:
                history.append(values[idx])
            if step <= tol_hz:
                break
        f_star = knots[idx]

    return FrequencyChoice(
        f_hz=f_star,
        energy=local_node_energy(task, node, f_star, path),
        delay=total_delay(task, node, path, f_star, state, quantile=quantile),
    )


_OPTIMIZERS = {
    "sca": optimize_frequency_sca,
    "grid": optimize_frequency_grid,
}


def _best_clock(task, node, path, state, freq_optimizer, quantile):
    try:
        optimizer = _OPTIMIZERS[freq_optimizer]
    except KeyError:
        raise ValueError(
            f"unknown frequency optimizer {freq_optimizer!r} (use 'sca' or 'grid')"
        ) from None
    return optimizer(task, node, path, state, quantile=quantile)


@dataclass(frozen=True)
class MatrixColumn:
    """One assignable slot: an edge node, or one task's cloud clone."""

    node_id: str
    row_lock: int | None = None  # clone columns are valid for one row only


@dataclass
class CostMatrix:
    task_ids: list[str]
    columns: list[MatrixColumn]
    energy: np.ndarray  # (tasks, columns); +inf marks infeasible entries
    choices: dict[tuple[int, int], FrequencyChoice]


def build_cost_matrix(
    batch: list[Task],
    topology: Topology,
    state: NodeQueueState,
    *,
    freq_optimizer: str = "sca",
    quantile: float = DEFAULT_ACCESS_QUANTILE,
) -> CostMatrix:
    """Optimal-frequency energies for every task/slot pair.

    Columns are the edge nodes followed by one cloud clone per task;
    the clone holds the task's cheapest cloud option and is +inf for
    every other row, which encodes unbounded cloud capacity inside a
    one-to-one matching.  Infeasible pairs are +inf, never errors.
    """
    if not batch:
        raise ValueError("batch must be non-empty")
    edges = topology.edge_nodes()
    clouds = topology.cloud_nodes()
    columns = [MatrixColumn(node_id=e.id) for e in edges]
    n = len(batch)
    energy = np.full((n, len(columns) + (n if clouds else 0)), np.inf)
    choices: dict[tuple[int, int], FrequencyChoice] = {}

    for i, task in enumerate(batch):
        for j, edge in enumerate(edges):
            if not topology.has_path(task.origin, edge.id):
                continue
            choice = _best_clock(
                task, edge, topology.path(task.origin, edge.id),
                state, freq_optimizer, quantile,
            )
            if choice is not None:
                energy[i, j] = choice.energy.total_j
                choices[(i, j)] = choice

    if clouds:
        for i, task in enumerate(batch):
            best: tuple[str, FrequencyChoice] | None = None
            for cloud in clouds:
                if not topology.has_path(task.origin, cloud.id):
                    continue
                choice = _best_clock(
                    task, cloud, topology.path(task.origin, cloud.id),
                    state, freq_optimizer, quantile,
                )
                if choice is not None and (
                    best is None or choice.energy.total_j < best[1].energy.total_j
                ):
                    best = (cloud.id, choice)
            j = len(edges) + i
            if best is not None:
                columns.append(MatrixColumn(node_id=best[0], row_lock=i))
                energy[i, j] = best[1].energy.total_j
                choices[(i, j)] = best[1]
            else:
                columns.append(MatrixColumn(node_id=clouds[0].id, row_lock=i))

    return CostMatrix(
        task_ids=[t.id for t in batch],
        columns=columns,
        energy=energy,
        choices=choices,
    )


def hungarian(cost) -> tuple[list[int | None], float]:
    """Minimum-cost one-to-one assignment of rows to columns.

    Potentials / shortest-augmenting-path formulation, O(rows^2 * cols),
    for rectangular matrices with rows <= columns.  Entries must be
    non-negative; +inf marks forbidden pairs.  Internally +inf becomes a
    cost exceeding any all-finite assignment, so forbidden entries are
    used only when a row has no finite column left; such rows come back
    as None (rejected) and are excluded from the returned total.
    """
    a = np.asarray(cost, dtype=float)
    if a.ndim != 2:
        raise ValueError("cost must be a 2-D matrix")
    n, m = a.shape
    if n == 0:
        return [], 0.0
    if n > m:
        raise ValueError("hungarian requires rows <= columns")
    if np.isnan(a).any() or (a < 0).any():
        raise ValueError("entries must be >= 0 (inf allowed)")

    finite = a[np.isfinite(a)]
    big = float(finite.sum()) + 1.0 if finite.size else 1.0
    c = np.where(np.isfinite(a), a, big)

    INF = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    match_row = [0] * (m + 1)  # match_row[j] = row matched to column j (1-based)
    for i in range(1, n + 1):
        match_row[0] = i
        j0 = 0
        minv = [INF] * (m + 1)
        used = [False] * (m + 1)
        way = [0] * (m + 1)
        while True:
            used[j0] = True
            i0 = match_row[j0]
            delta = INF
            j1 = 0
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = c[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[match_row[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match_row[j0] == 0:
                break
        while j0 != 0:  # augment along the alternating path
            j1 = way[j0]
            match_row[j0] = match_row[j1]
            j0 = j1

    assignment: list[int | None] = [None] * n
    for j in range(1, m + 1):
        if match_row[j] > 0:
            assignment[match_row[j] - 1] = j - 1
    result: list[int | None] = []
    total = 0.0
    for i, j in enumerate(assignment):
        if j is None or not np.isfinite(a[i, j]):
            result.append(None)
        else:
            result.append(j)
            total += a[i, j]
    return result, total


def _decision(task: Task, node_id: str, choice: FrequencyChoice) -> PlacementDecision:
    return PlacementDecision(
        task_id=task.id,
        node_id=node_id,
        frequency_hz=choice.f_hz,
        energy=choice.energy,
        delay=choice.delay,
    )


def _accept(task, topology, state, decision: PlacementDecision) -> None:
    node = topology.node(decision.node_id)
    path = topology.path(task.origin, decision.node_id)
    occupy_for(task, node, path, decision.delay, state)


def schedule_optimal(
    batch: list[Task],
    topology: Topology,
    state: NodeQueueState,
    *,
    freq_optimizer: str = "sca",
    quantile: float = DEFAULT_ACCESS_QUANTILE,
) -> list[PlacementDecision]:
    """Energy-minimal matching over per-pair optimal-frequency costs.

    A rejection column per task (priced above any all-placed solution)
    makes the matching place as many tasks as feasibility allows before
    minimizing energy.  Accepted edge placements advance the queue
    state.
    """
    if not batch:
        return []
    matrix = build_cost_matrix(
        batch, topology, state, freq_optimizer=freq_optimizer, quantile=quantile
    )
    n, m = matrix.energy.shape
    finite = matrix.energy[np.isfinite(matrix.energy)]
    reject_cost = float(finite.sum()) + 1.0 if finite.size else 1.0
    augmented = np.full((n, m + n), np.inf)
    augmented[:, :m] = matrix.energy
    for i in range(n):
        augmented[i, m + i] = reject_cost
    assignment, _ = hungarian(augmented)

    decisions = []
    for i, task in enumerate(batch):
        j = assignment[i]
        if j is None or j >= m:
            decisions.append(_rejected(task))
            continue
        decisions.append(_decision(task, matrix.columns[j].node_id, matrix.choices[(i, j)]))
    for task, decision in zip(batch, decisions):
        if not decision.rejected:
            _accept(task, topology, state, decision)
    return decisions


def schedule_cloud_only(
    batch: list[Task],
    topology: Topology,
    state: NodeQueueState,
    *,
    freq_optimizer: str = "sca",
    quantile: float = DEFAULT_ACCESS_QUANTILE,
) -> list[PlacementDecision]:
    """Every task to its cheapest cloud node; edge nodes are ignored."""
    decisions = []
    clouds = topology.cloud_nodes()
    for task in batch:
        best: tuple[str, FrequencyChoice] | None = None
        for cloud in clouds:
            if not topology.has_path(task.origin, cloud.id):
                continue
            choice = _best_clock(
                task, cloud, topology.path(task.origin, cloud.id),
                state, freq_optimizer, quantile,
            )
            if choice is not None and (
                best is None or choice.energy.total_j < best[1].energy.total_j
            ):
                best = (cloud.id, choice)
        decisions.append(_rejected(task) if best is None else _decision(task, *best))
    return decisions


def schedule_nearest_mec(
    batch: list[Task],
    topology: Topology,
    state: NodeQueueState,
    *,
    freq_optimizer: str = "sca",
    quantile: float = DEFAULT_ACCESS_QUANTILE,
) -> list[PlacementDecision]:
    """Each task to the closest edge node, queueing behind earlier work.

    The node choice is by path distance alone (ties to the lower node
    id); if that node cannot meet the deadline the task is rejected even
    when another node could serve it.
    """
    decisions = []
    for task in batch:
        reachable = [
            (topology.path(task.origin, e.id).distance_km, e.id, e)
            for e in topology.edge_nodes()
            if topology.has_path(task.origin, e.id)
        ]
        if not reachable:
            decisions.append(_rejected(task))
            continue
        _, _, node = min(reachable)
        choice = _best_clock(
            task, node, topology.path(task.origin, node.id),
            state, freq_optimizer, quantile,
        )
        if choice is None:
            decisions.append(_rejected(task))
            continue
        decision = _decision(task, node.id, choice)
        _accept(task, topology, state, decision)
        decisions.append(decision)
    return decisions


MAX_BRUTE_TASKS = 8
MAX_BRUTE_EDGES = 4


def _scan_clock(task, node, path, state, n_points, quantile) -> FrequencyChoice | None:
    """Plain scalar sweep over the candidate clocks (oracle path)."""
    best = None
    for f in frequency_candidates(node, n_points):
        f = float(f)
        delay = total_delay(task, node, path, f, state, quantile=quantile)
        if delay.total_s > task.deadline_s:
            continue
        energy = local_node_energy(task, node, f, path)
        if best is None or energy.total_j < best.energy.total_j:
            best = FrequencyChoice(f_hz=f, energy=energy, delay=delay)
    return best


def brute_force_schedule(
    batch: list[Task],
    topology: Topology,
    state: NodeQueueState,
    freq_grid_points: int = DEFAULT_GRID_POINTS,
    *,
    quantile: float = DEFAULT_ACCESS_QUANTILE,
) -> list[PlacementDecision]:
    """Exhaustive verification oracle for small batches.

    Enumerates every map of tasks to (edge | cloud | reject) respecting
    one task per edge node, each task at its own grid-optimal clock, and
    returns the solution with the fewest rejections, then minimum total
    energy.  A task is rejected only when no feasible joint solution
    places it.  Guard rails: at most 8 tasks and 4 edge nodes.
    """
    if len(batch) > MAX_BRUTE_TASKS:
        raise GuardRailError(f"brute force limited to {MAX_BRUTE_TASKS} tasks per batch")
    edges = topology.edge_nodes()
    if len(edges) > MAX_BRUTE_EDGES:
        raise GuardRailError(f"brute force limited to {MAX_BRUTE_EDGES} edge nodes")
    if not batch:
        return []

    clouds = topology.cloud_nodes()
    options: list[list[tuple[str | None, FrequencyChoice | None]]] = []
    for task in batch:
        task_options: list[tuple[str | None, FrequencyChoice | None]] = []
        for node in edges + clouds:
            if not topology.has_path(task.origin, node.id):
                continue
            choice = _scan_clock(
                task, node, topology.path(task.origin, node.id),
                state, freq_grid_points, quantile,
            )
            if choice is not None:
                task_options.append((node.id, choice))
        task_options.append((None, None))  # rejection
        options.append(task_options)

    edge_ids = {e.id for e in edges}
    n = len(batch)
    best_key: tuple[int, float] | None = None
    best_pick: list[int] | None = None
    pick = [0] * n

    def explore(i: int, used_edges: frozenset, n_rejected: int, energy: float) -> None:
        nonlocal best_key, best_pick
        if best_key is not None and (n_rejected, energy) >= best_key:
            return  # any completion only adds rejections or energy
        if i == n:
            best_key = (n_rejected, energy)
            best_pick = pick.copy()
            return
        for k, (node_id, choice) in enumerate(options[i]):
            if node_id is None:
                pick[i] = k
                explore(i + 1, used_edges, n_rejected + 1, energy)
            elif node_id in edge_ids:
                if node_id in used_edges:
                    continue
                pick[i] = k
                explore(i + 1, used_edges | {node_id}, n_rejected,
                        energy + choice.energy.total_j)
            else:
                pick[i] = k
                explore(i + 1, used_edges, n_rejected, energy + choice.energy.total_j)

    explore(0, frozenset(), 0, 0.0)
    assert best_pick is not None

    decisions = []
    for i, task in enumerate(batch):
        node_id, choice = options[i][best_pick[i]]
        if node_id is None:
            decisions.append(_rejected(task))
        else:
            decisions.append(_decision(task, node_id, choice))
    for task, decision in zip(batch, decisions):
        if not decision.rejected:
            _accept(task, topology, state, decision)
    return decisions


SCHEDULERS = {
    "optimal": schedule_optimal,
    "cloud_only": schedule_cloud_only,
    "nearest_mec": schedule_nearest_mec,
    "brute_force": brute_force_schedule,
}


def total_accepted_energy(decisions: list[PlacementDecision]) -> float:
    return sum(d.energy.total_j for d in decisions if not d.rejected)
