"""Loss functions scoring intercept tasks along an evader's ordered path.

Every task on a path is scored against the path position just before it: the
previous task's boundary point and crossing time, or the evader's own position
at relative time zero for the first slot. A task an evader cannot reach in
time is INFEASIBLE, which absorbs through every downstream combination, so a
path with one impossible leg is impossible as a whole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .scenario import EvaderState, ScenarioConfig, SpatioTemporalTask, Vec2

INFEASIBLE = math.inf


def is_infeasible(value: float) -> bool:
    return value == INFEASIBLE


@dataclass(frozen=True, slots=True)
class PathContext:
    """Where the evader arrives from, and the relative time it departs.

    For the head of a path this is the evader's current position at time 0;
    afterward it is the previous task's boundary point and crossing time.
    """

    prev_point: Vec2
    prev_time: float


def context_for(path: list[int], index: int, evader: EvaderState,
                tasks: dict[int, SpatioTemporalTask]) -> PathContext:
    """Context seen by a task inserted at `index` of `path`."""
    if index == 0:
        return PathContext(evader.position, 0.0)
    prev = tasks[path[index - 1]]
    return PathContext(prev.neutral_point, prev.intrusion_time)


def spatial_loss(task: SpatioTemporalTask, ctx: PathContext,
                 intruder_pos: Vec2, eta: float) -> float:
    """Travel distance to the boundary point plus a pull toward the intruder.

    The second term discounts tasks whose intruder is still far out, scaled
    by eta in (0, 1).
    """
    return (task.neutral_point.dist(ctx.prev_point)
            + eta * task.neutral_point.dist(intruder_pos))


def temporal_feasible(task: SpatioTemporalTask, ctx: PathContext,
                      v_max: float) -> bool:
    """True when the evader can depart after ctx and still arrive in time.

    Requires a strictly positive time gap and a travel time strictly below
    it at top speed.
    """
    gap = task.intrusion_time - ctx.prev_time
    if gap <= 0.0:
        return False
    return task.neutral_point.dist(ctx.prev_point) / v_max < gap


def temporal_loss(task: SpatioTemporalTask, ctx: PathContext,
                  v_max: float) -> float:
    """Urgency-weighted slack (1 + t)*(t - prev_t), or INFEASIBLE."""
    if not temporal_feasible(task, ctx, v_max):
        return INFEASIBLE
    gap = task.intrusion_time - ctx.prev_time
    return (1.0 + task.intrusion_time) * gap


def composite_loss(task: SpatioTemporalTask, ctx: PathContext,
                   intruder_pos: Vec2, cfg: ScenarioConfig) -> float:
    """Product of spatial and temporal losses; INFEASIBLE absorbs.

    Feasibility is checked before multiplying so an infinite temporal term
    can never meet a zero spatial term.
    """
    gap = task.intrusion_time - ctx.prev_time
    if gap <= 0.0:
        return INFEASIBLE
    d = task.neutral_point.dist(ctx.prev_point)
    if d / cfg.evader_max_speed >= gap:
        return INFEASIBLE
    spatial = d + cfg.eta * task.neutral_point.dist(intruder_pos)
    return spatial * (1.0 + task.intrusion_time) * gap


def path_cost(path: list[int], evader: EvaderState,
              tasks: dict[int, SpatioTemporalTask],
              intruder_positions: dict[int, Vec2],
              cfg: ScenarioConfig) -> float:
    """Sum of composite losses along the path in order; INFEASIBLE absorbs."""
    total = 0.0
    prev_point = evader.position
    prev_time = 0.0
    v_max = cfg.evader_max_speed
    eta = cfg.eta
    for task_id in path:
        task = tasks[task_id]
        gap = task.intrusion_time - prev_time
        if gap <= 0.0:
            return INFEASIBLE
        point = task.neutral_point
        d = point.dist(prev_point)
        if d / v_max >= gap:
            return INFEASIBLE
        total += ((d + eta * point.dist(intruder_positions[task_id]))
                  * (1.0 + task.intrusion_time) * gap)
        prev_point = point
        prev_time = task.intrusion_time
    return total


def insert_at(path: list[int], index: int, task_id: int) -> list[int]:
    """Copy of `path` with `task_id` spliced in before position `index`."""
    return path[:index] + [task_id] + path[index:]


def marginal_cost(path: list[int], evader: EvaderState, candidate_id: int,
                  tasks: dict[int, SpatioTemporalTask],
                  intruder_positions: dict[int, Vec2],
                  cfg: ScenarioConfig) -> tuple[float, int | None]:
    """Cheapest increase in path cost from inserting the candidate task.

    Tries every insertion slot and returns (cost delta, slot index), with the
    smallest index winning ties. Returns (INFEASIBLE, None) when the candidate
    is already on the path, the path itself is infeasible, or no slot admits
    the candidate.

    Each leg's loss depends only on its immediate predecessor, so inserting at
    slot n changes exactly two legs: the candidate's own, and the displaced
    successor's. Legs past the insertion point are untouched.
    """
    if candidate_id in path:
        return INFEASIBLE, None

    v_max = cfg.evader_max_speed
    eta = cfg.eta
    cand = tasks[candidate_id]
    c_point = cand.neutral_point
    c_time = cand.intrusion_time
    c_pull = eta * c_point.dist(intruder_positions[candidate_id])

    # One walk collects, per slot n, the context entering it and the loss of
    # the leg currently occupying it (None past the end).
    contexts: list[tuple[Vec2, float]] = [(evader.position, 0.0)]
    leg_losses: list[float] = []
    prev_point = evader.position
    prev_time = 0.0
    for task_id in path:
        task = tasks[task_id]
        gap = task.intrusion_time - prev_time
        if gap <= 0.0:
            return INFEASIBLE, None
        point = task.neutral_point
        d = point.dist(prev_point)
        if d / v_max >= gap:
            return INFEASIBLE, None
        leg_losses.append((d + eta * point.dist(intruder_positions[task_id]))
                          * (1.0 + task.intrusion_time) * gap)
        prev_point = point
        prev_time = task.intrusion_time
        contexts.append((point, task.intrusion_time))

    best_delta = INFEASIBLE
    best_slot: int | None = None
    for n in range(len(path) + 1):
        ctx_point, ctx_time = contexts[n]
        gap = c_time - ctx_time
        if gap <= 0.0:
            continue
        d = c_point.dist(ctx_point)
        if d / v_max >= gap:
            continue
        delta = (d + c_pull) * (1.0 + c_time) * gap
        if n < len(path):
            # The displaced task now follows the candidate instead.
            nxt = tasks[path[n]]
            n_gap = nxt.intrusion_time - c_time
            if n_gap <= 0.0:
                continue
            n_d = nxt.neutral_point.dist(c_point)
            if n_d / v_max >= n_gap:
                continue
            delta += ((n_d + eta * nxt.neutral_point.dist(intruder_positions[path[n]]))
                      * (1.0 + nxt.intrusion_time) * n_gap) - leg_losses[n]
        if delta < best_delta:
            best_delta = delta
            best_slot = n
    return best_delta, best_slot
