"""mecsim: energy-minimal task placement across MEC nodes and a cloud.

Models per-task computation energy through a frequency-dependent
FLOP-per-Joule efficiency curve, communication energy through per-bit
link costs, and end-to-end delay through transfer, propagation,
queueing and channel-access components.  A Hungarian matching over
per-pair optimal-clock costs yields the energy-minimal schedule; grid
and SCA frequency optimizers, two baseline policies, a brute-force
oracle, a seeded simulator and a sweep CLI round out the toolkit.
"""

from .energetics import (
    EnergyBreakdown,
    comm_energy,
    compute_energy,
    efficiency_at,
    local_node_energy,
)
from .latency import (
    DelayBreakdown,
    NodeQueueState,
    access_delay_quantile,
    compute_delay,
    propagation_delay,
    queueing_delay,
    total_delay,
    transfer_delay,
)
from .model import ComputeNode, CpuProfile, NetworkPath, Task, Topology, validate
from .scheduler import (
    SCHEDULERS,
    CostMatrix,
    FrequencyChoice,
    GuardRailError,
    PlacementDecision,
    brute_force_schedule,
    build_cost_matrix,
    hungarian,
    optimize_frequency_grid,
    optimize_frequency_sca,
    schedule_cloud_only,
    schedule_nearest_mec,
    schedule_optimal,
)
from .simulator import (
    DistSpec,
    RunMetrics,
    SimulationResult,
    WorkloadSpec,
    generate_workload,
    run,
    simulate,
)
from .config import Scenario, SweepSpec, load_scenario, load_sweep

__version__ = "0.1.0"
