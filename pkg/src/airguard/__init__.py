"""Decentralized spatio-temporal task allocation for airspace defense."""

from .cbba import (AgentBelief, AllocationResult, ConsensusMessage,
                   build_bundle, consensus_step, release_on_loss, resolve)
from .harness import (ORACLE_MAX_TASKS, SWEEP_CSV_HEADER, OracleSizeError,
                      OracleSolution, SweepCell, SweepConfig, SweepResult,
                      brute_force_oracle, derive_seed, emit_report,
                      parse_sweep_csv, run_montecarlo, sweep_to_csv)
from .losses import (INFEASIBLE, PathContext, composite_loss, context_for,
                     insert_at, is_infeasible, marginal_cost, path_cost,
                     spatial_loss, temporal_feasible, temporal_loss)
from .scenario import (SPAWN_RETRY_BUDGET, STATUS_APPROACHING,
                       STATUS_NEUTRALIZED, STATUS_PENETRATED, EvaderState,
                       IntruderState, ScenarioConfig, ScenarioError,
                       SpatioTemporalTask, Vec2, clear_spawn_radii,
                       load_scenario, neutralizing_point, spawn_intruder,
                       tasks_from_intruders, time_of_intrusion)
from .simulator import (EpochMetrics, SimEvent, WorldState, fill_spawn_slots,
                        format_event, format_metrics, new_world, replan,
                        run_episode, step)

__version__ = "0.1.0"

__all__ = [
    "AgentBelief", "AllocationResult", "ConsensusMessage", "EpochMetrics",
    "EvaderState", "INFEASIBLE", "IntruderState", "ORACLE_MAX_TASKS",
    "OracleSizeError", "OracleSolution", "PathContext", "SPAWN_RETRY_BUDGET",
    "STATUS_APPROACHING", "STATUS_NEUTRALIZED", "STATUS_PENETRATED",
    "SWEEP_CSV_HEADER", "ScenarioConfig", "ScenarioError", "SimEvent",
    "SpatioTemporalTask", "SweepCell", "SweepConfig", "SweepResult", "Vec2",
    "WorldState",
    "brute_force_oracle", "build_bundle", "clear_spawn_radii",
    "composite_loss", "consensus_step", "context_for", "derive_seed",
    "emit_report", "fill_spawn_slots", "format_event", "format_metrics",
    "insert_at", "is_infeasible", "load_scenario", "marginal_cost",
    "neutralizing_point", "new_world", "parse_sweep_csv", "path_cost",
    "release_on_loss", "replan", "resolve", "run_episode", "run_montecarlo",
    "spatial_loss", "spawn_intruder", "step", "sweep_to_csv",
    "tasks_from_intruders", "temporal_feasible", "temporal_loss",
    "time_of_intrusion", "__version__",
]
