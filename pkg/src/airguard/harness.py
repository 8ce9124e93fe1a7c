"""Evaluation harness: exhaustive oracle, Monte-Carlo sweeps, reports.

The oracle enumerates every assignment of tasks to agents (including leaving
tasks out) with the best feasible visit order per agent, so it is the ground
truth the decentralized allocator is measured against on small instances.
The sweep grid reruns whole episodes across spawn-separation and team-size
settings with per-cell, per-epoch seeds derived arithmetically from one base
seed, which keeps results identical no matter how work is scheduled.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .cbba import AllocationResult
from .losses import INFEASIBLE, path_cost
from .scenario import EvaderState, ScenarioConfig, SpatioTemporalTask, Vec2
from .simulator import EpochMetrics, SimEvent, format_event, format_metrics
from .simulator import run_episode

ORACLE_MAX_TASKS = 8

_MASK64 = (1 << 64) - 1

SWEEP_CSV_HEADER = "sep_m,evaders,epochs,success_rate,mean_neutralized"


class OracleSizeError(ValueError):
    """Raised when an instance is too large to enumerate exhaustively."""


@dataclass(frozen=True, slots=True)
class OracleSolution:
    assignment: dict[int, int | None]   # task id -> agent id or None
    paths: dict[int, list[int]]         # agent id -> ordered task ids
    assigned_count: int
    total_cost: float


@dataclass(frozen=True, slots=True)
class SweepConfig:
    base: ScenarioConfig
    sep_grid: tuple[float, ...]
    evader_grid: tuple[int, ...]
    epochs: int
    base_seed: int | None = None       # None: fall back to base.rng_seed

    def validate(self) -> None:
        self.base.validate()
        if not self.sep_grid or not self.evader_grid:
            raise ValueError("sweep grids must be nonempty")
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")


@dataclass(frozen=True, slots=True)
class SweepCell:
    sep_m: float
    evaders: int
    epochs: int
    success_rate: float
    mean_neutralized: float


@dataclass(frozen=True, slots=True)
class SweepResult:
    sep_grid: tuple[float, ...]
    evader_grid: tuple[int, ...]
    epochs: int
    base_seed: int
    cells: tuple[SweepCell, ...]        # sep-major, evader-minor order


def derive_seed(base: int, *indices: int) -> int:
    """Mix a base seed with position indices into an independent 64-bit seed.

    Pure integer arithmetic (multiply-xor-shift finalizer), so the mapping is
    identical across platforms, processes, and thread counts.
    """
    h = (base ^ 0x9E3779B97F4A7C15) & _MASK64
    for v in indices:
        h = (h ^ (v & _MASK64)) * 0xBF58476D1CE4E5B9 & _MASK64
        h ^= h >> 27
        h = h * 0x94D049BB133111EB & _MASK64
        h ^= h >> 31
    return h


def brute_force_oracle(evaders: list[EvaderState],
                       tasks: dict[int, SpatioTemporalTask],
                       intruder_positions: dict[int, Vec2],
                       cfg: ScenarioConfig,
                       max_tasks: int = ORACLE_MAX_TASKS) -> OracleSolution:
    """Exhaustively optimal allocation for a small static instance.

    Objective is lexicographic: first assign as many tasks as possible, then
    minimize the summed path costs. Per agent and task subset the cheapest
    feasible visit order is found by checking every permutation; a task may
    also stay unassigned, so the search space is (num agents + 1)^num tasks
    assignment vectors. Raises OracleSizeError beyond max_tasks.
    """
    task_ids = sorted(tasks)
    if len(task_ids) > max_tasks:
        raise OracleSizeError(
            f"{len(task_ids)} tasks exceeds the enumeration cap {max_tasks}")
    agents = sorted(evaders, key=lambda e: e.id)

    # Cheapest feasible order per (agent, task subset), memoized; None when
    # no order is feasible.
    order_memo: dict[tuple[int, tuple[int, ...]],
                     tuple[float, tuple[int, ...]] | None] = {}

    def best_order(agent: EvaderState,
                   subset: tuple[int, ...]) -> tuple[float, tuple[int, ...]] | None:
        key = (agent.id, subset)
        if key in order_memo:
            return order_memo[key]
        best: tuple[float, tuple[int, ...]] | None = None
        for perm in itertools.permutations(subset):
            cost = path_cost(list(perm), agent, tasks, intruder_positions, cfg)
            if cost < INFEASIBLE and (best is None or cost < best[0]):
                best = (cost, perm)
        order_memo[key] = best
        return best

    best_vec: tuple[int, float, tuple[int | None, ...]] | None = None
    choices: list[int | None] = [None] + [a.id for a in agents]
    for vector in itertools.product(choices, repeat=len(task_ids)):
        subsets: dict[int, list[int]] = {a.id: [] for a in agents}
        count = 0
        for j, owner in zip(task_ids, vector):
            if owner is not None:
                subsets[owner].append(j)
                count += 1
        total = 0.0
        feasible = True
        for a in agents:
            ordered = best_order(a, tuple(subsets[a.id]))
            if ordered is None:
                feasible = False
                break
            total += ordered[0]
        if not feasible:
            continue
        key = (-count, total)
        if best_vec is None or key < (best_vec[0], best_vec[1]):
            best_vec = (-count, total, vector)
    assert best_vec is not None  # the all-unassigned vector is always feasible

    _, total, vector = best_vec
    assignment = {j: owner for j, owner in zip(task_ids, vector)}
    paths = {}
    for a in agents:
        subset = tuple(j for j in task_ids if assignment[j] == a.id)
        ordered = best_order(a, subset)
        paths[a.id] = list(ordered[1]) if ordered else []
    return OracleSolution(assignment=assignment, paths=paths,
                          assigned_count=-best_vec[0], total_cost=total)


def _episode_brief(args: tuple[ScenarioConfig, int]) -> tuple[bool, int]:
    cfg, seed = args
    metrics, _ = run_episode(cfg, seed)
    return metrics.success, metrics.neutralized


def run_montecarlo(sweep: SweepConfig, jobs: int = 1) -> SweepResult:
    """Sweep separation x team size, `sweep.epochs` episodes per cell.

    Episode seeds depend only on the base seed and the (cell, epoch) indices,
    and results are aggregated in submission order, so the outcome is
    byte-stable for any `jobs` value.
    """
    sweep.validate()
    epochs = sweep.epochs
    seed0 = sweep.base.rng_seed if sweep.base_seed is None else sweep.base_seed
    runs: list[tuple[ScenarioConfig, int]] = []
    for si, sep in enumerate(sweep.sep_grid):
        for ei, nev in enumerate(sweep.evader_grid):
            cfg = replace(sweep.base, min_radial_separation=float(sep),
                          num_evaders=int(nev))
            cfg.validate()
            for epoch in range(epochs):
                runs.append((cfg, derive_seed(seed0, si, ei, epoch)))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            briefs = list(pool.map(_episode_brief, runs, chunksize=16))
    else:
        briefs = [_episode_brief(r) for r in runs]

    cells = []
    at = 0
    for sep in sweep.sep_grid:
        for nev in sweep.evader_grid:
            chunk = briefs[at:at + epochs]
            at += epochs
            wins = sum(1 for ok, _ in chunk if ok)
            mean_n = sum(n for _, n in chunk) / epochs
            cells.append(SweepCell(float(sep), int(nev), epochs,
                                   wins / epochs, mean_n))
    return SweepResult(tuple(float(s) for s in sweep.sep_grid),
                       tuple(int(n) for n in sweep.evader_grid),
                       epochs, seed0, tuple(cells))


def sweep_to_csv(result: SweepResult) -> str:
    lines = [SWEEP_CSV_HEADER]
    for c in result.cells:
        lines.append(f"{c.sep_m:g},{c.evaders},{c.epochs},"
                     f"{c.success_rate:.4f},{c.mean_neutralized:.4f}")
    return "\n".join(lines) + "\n"


def parse_sweep_csv(text: str) -> tuple[SweepCell, ...]:
    """Read back what sweep_to_csv wrote; raises ValueError on malformed input."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != SWEEP_CSV_HEADER:
        raise ValueError("missing or wrong sweep CSV header")
    cells = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 5:
            raise ValueError(f"bad sweep CSV row: {ln!r}")
        cells.append(SweepCell(float(parts[0]), int(parts[1]), int(parts[2]),
                               float(parts[3]), float(parts[4])))
    return tuple(cells)


def _allocation_report(result: AllocationResult) -> str:
    lines = [
        f"converged={int(result.converged)} rounds={result.rounds_used}",
    ]
    for agent_id in sorted(result.paths):
        path = result.paths[agent_id]
        shown = " -> ".join(str(j) for j in path) if path else "(idle)"
        lines.append(f"evader {agent_id}: {shown}")
    unassigned = sorted(j for j, a in result.assignment.items() if a is None)
    lines.append("unassigned: "
                 + (",".join(str(j) for j in unassigned) if unassigned else "none"))
    return "\n".join(lines) + "\n"


def _sweep_report(result: SweepResult) -> str:
    lines = [f"epochs={result.epochs} base_seed={result.base_seed}",
             f"{'sep_m':>8} {'evaders':>8} {'success_rate':>13} {'mean_neutralized':>17}"]
    for c in result.cells:
        lines.append(f"{c.sep_m:>8g} {c.evaders:>8} {c.success_rate:>13.4f} "
                     f"{c.mean_neutralized:>17.4f}")
    return "\n".join(lines) + "\n"


def _episode_report(metrics: EpochMetrics, events: list[SimEvent]) -> str:
    kinds = {"spawn": 0, "replan": 0, "neutralize": 0, "penetrate": 0}
    for ev in events:
        kinds[ev.kind] = kinds.get(ev.kind, 0) + 1
    lines = [format_metrics(metrics)]
    lines.extend(f"events {k}={v}" for k, v in sorted(kinds.items()))
    return "\n".join(lines) + "\n"


def emit_report(result: object, format: str = "report") -> str:
    """Render a result object in one of the supported output lanes.

    csv fits sweep results; events fits (metrics, event list) episode pairs;
    report fits allocations, sweeps, and episode pairs. Anything else raises
    ValueError.
    """
    if format == "csv":
        if isinstance(result, SweepResult):
            return sweep_to_csv(result)
        raise ValueError("csv output is only defined for sweep results")
    if format == "events":
        if (isinstance(result, tuple) and len(result) == 2
                and isinstance(result[0], EpochMetrics)):
            metrics, events = result
            lines = [format_event(ev) for ev in events]
            lines.append(format_metrics(metrics))
            return "\n".join(lines) + "\n"
        raise ValueError("events output is only defined for episode results")
    if format == "report":
        if isinstance(result, AllocationResult):
            return _allocation_report(result)
        if isinstance(result, SweepResult):
            return _sweep_report(result)
        if (isinstance(result, tuple) and len(result) == 2
                and isinstance(result[0], EpochMetrics)):
            return _episode_report(result[0], result[1])
        raise ValueError(f"no report lane for {type(result).__name__}")
    raise ValueError(f"unknown format {format!r}")
