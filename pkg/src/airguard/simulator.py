"""Closed-loop episode driver tying allocation to kinematics.

Time advances in fixed dt ticks. Each tick spawns intruders into free slots,
reruns the allocator on its fixed cadence, then moves everything and checks
for captures and boundary crossings. An episode ends at the first boundary
crossing (failure), when the epoch's full intruder budget has been
neutralized (success), or at the horizon (failure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from random import Random

from .cbba import AllocationResult, resolve
from .scenario import (STATUS_APPROACHING, STATUS_NEUTRALIZED, STATUS_PENETRATED,
                       EvaderState, IntruderState, ScenarioConfig,
                       SpatioTemporalTask, Vec2, clear_spawn_radii,
                       spawn_intruder, tasks_from_intruders)


@dataclass(slots=True)
class SimEvent:
    time: float
    kind: str                    # spawn | replan | neutralize | penetrate
    evader_id: int | None = None
    intruder_id: int | None = None
    payload: str = ""


@dataclass(slots=True)
class WorldState:
    clock: float
    evaders: list[EvaderState]
    intruders: list[IntruderState]
    tasks: dict[int, SpatioTemporalTask]
    allocation: AllocationResult | None
    tick: int = 0
    spawned: int = 0
    neutralized: int = 0
    penetrated: int = 0
    events: list[SimEvent] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class EpochMetrics:
    success: bool
    spawned: int
    neutralized: int
    penetrated: int
    duration: float
    replans: int
    mean_replan_rounds: float


def new_world(cfg: ScenarioConfig) -> WorldState:
    """Fresh world: evaders evenly spaced on the boundary circle, no intruders."""
    center = cfg.airspace_center
    radius = cfg.airspace_radius
    evaders = []
    for k in range(cfg.num_evaders):
        angle = 2.0 * math.pi * k / cfg.num_evaders
        pos = Vec2(center.x + radius * math.cos(angle),
                   center.y + radius * math.sin(angle))
        evaders.append(EvaderState(k, pos, cfg.evader_max_speed))
    return WorldState(clock=0.0, evaders=evaders, intruders=[], tasks={},
                      allocation=None)


def replan(world: WorldState, cfg: ScenarioConfig) -> AllocationResult:
    """Rebuild the task set from live intruders and rerun the allocator.

    Fresh beliefs every time: tasks and costs are snapshotted from current
    positions, the auction runs to agreement, and every evader's path is
    replaced by the resulting one.
    """
    tasks = {t.task_id: t for t in tasks_from_intruders(world.intruders, cfg)}
    positions = {it.id: it.position for it in world.intruders
                 if it.status == STATUS_APPROACHING}
    result = resolve(world.evaders, tasks, positions, cfg)
    world.tasks = tasks
    world.allocation = result
    for ev in world.evaders:
        ev.current_path = list(result.paths.get(ev.id, []))
    if result.assignment:
        parts = ",".join(
            f"{j}:{a if a is not None else '-'}"
            for j, a in sorted(result.assignment.items()))
    else:
        parts = "-"
    world.events.append(SimEvent(
        world.clock, "replan",
        payload=f"assign={parts} rounds={result.rounds_used} "
                f"converged={int(result.converged)}"))
    return result


def step(world: WorldState, cfg: ScenarioConfig) -> None:
    """Advance one tick: move everything, then resolve captures and crossings.

    Intruders fly straight at the center; evaders fly toward the boundary
    point of the first live task on their path and hold once there. After
    moving, each approaching intruder (ascending id) is captured by the
    nearest evader within neutralize_radius, ties to the lower evader id;
    captures are checked before boundary crossings.
    """
    dt = cfg.sim_dt
    # clock is derived from the tick count, not accumulated, so event times
    # stay on the exact dt grid over arbitrarily long episodes
    world.tick += 1
    world.clock = world.tick * dt
    cx = cfg.airspace_center.x
    cy = cfg.airspace_center.y
    boundary = cfg.airspace_radius
    capture = cfg.neutralize_radius

    for it in world.intruders:
        if it.status != STATUS_APPROACHING:
            continue
        px, py = it.position.x, it.position.y
        dist = math.hypot(px - cx, py - cy)
        if dist > 0.0:
            k = it.speed * dt / dist
            it.position = Vec2(px + (cx - px) * k, py + (cy - py) * k)

    tasks = world.tasks
    for ev in world.evaders:
        target: Vec2 | None = None
        for task_id in ev.current_path:
            task = tasks.get(task_id)
            if task is not None:
                target = task.neutral_point
                break
        if target is None:
            continue
        px, py = ev.position.x, ev.position.y
        dist = math.hypot(target.x - px, target.y - py)
        reach = ev.max_speed * dt
        if dist <= reach:
            ev.position = target
        elif dist > 0.0:
            k = reach / dist
            ev.position = Vec2(px + (target.x - px) * k, py + (target.y - py) * k)

    for it in sorted(world.intruders, key=lambda x: x.id):
        if it.status != STATUS_APPROACHING:
            continue
        ix, iy = it.position.x, it.position.y
        best_key: tuple[float, int] | None = None
        best_ev: EvaderState | None = None
        for ev in world.evaders:
            d = math.hypot(ev.position.x - ix, ev.position.y - iy)
            if d <= capture and (best_key is None or (d, ev.id) < best_key):
                best_key = (d, ev.id)
                best_ev = ev
        if best_ev is None:
            continue
        it.status = STATUS_NEUTRALIZED
        world.neutralized += 1
        _drop_task(world, it.id)
        world.events.append(SimEvent(
            world.clock, "neutralize", evader_id=best_ev.id, intruder_id=it.id,
            payload=f"ex={best_ev.position.x:.6f} ey={best_ev.position.y:.6f} "
                    f"ix={ix:.6f} iy={iy:.6f}"))

    for it in sorted(world.intruders, key=lambda x: x.id):
        if it.status != STATUS_APPROACHING:
            continue
        ix, iy = it.position.x, it.position.y
        if math.hypot(ix - cx, iy - cy) <= boundary:
            it.status = STATUS_PENETRATED
            world.penetrated += 1
            _drop_task(world, it.id)
            world.events.append(SimEvent(
                world.clock, "penetrate", intruder_id=it.id,
                payload=f"x={ix:.6f} y={iy:.6f}"))


def _drop_task(world: WorldState, task_id: int) -> None:
    world.tasks.pop(task_id, None)
    for ev in world.evaders:
        if task_id in ev.current_path:
            ev.current_path.remove(task_id)


def fill_spawn_slots(world: WorldState, cfg: ScenarioConfig,
                     rng: Random) -> int:
    """Spawn intruders into free concurrency slots; returns how many landed.

    Stops early when the epoch budget is spent, no admissible radius exists,
    or one attempt exhausts its retry budget (the next tick tries again).
    """
    added = 0
    while (world.spawned < cfg.max_intruders_per_epoch
           and (world.spawned - world.neutralized - world.penetrated)
           < cfg.max_concurrent_intruders
           and clear_spawn_radii(world.intruders, cfg)):
        it = spawn_intruder(rng, cfg, world.intruders)
        if it is None:
            break
        world.intruders.append(it)
        world.spawned += 1
        added += 1
        world.events.append(SimEvent(
            world.clock, "spawn", intruder_id=it.id,
            payload=f"x={it.position.x:.6f} y={it.position.y:.6f} "
                    f"speed={it.speed:.3f}"))
    return added


def run_episode(cfg: ScenarioConfig,
                seed: int | None = None) -> tuple[EpochMetrics, list[SimEvent]]:
    """Simulate one epoch; returns metrics plus the ordered event log.

    The per-tick order is spawn attempts, replanning on its cadence, then one
    kinematic step. Success means the entire per-epoch intruder budget was
    neutralized with no boundary crossing before the horizon.
    """
    cfg.validate()
    rng = Random(cfg.rng_seed if seed is None else seed)
    world = new_world(cfg)
    dt = cfg.sim_dt
    replan_every = max(1, round(cfg.replan_interval / dt))
    n_ticks = math.ceil(cfg.horizon / dt - 1e-9)
    budget = cfg.max_intruders_per_epoch
    replans = 0
    rounds_total = 0

    for tick in range(n_ticks):
        fill_spawn_slots(world, cfg, rng)
        if tick % replan_every == 0:
            result = replan(world, cfg)
            replans += 1
            rounds_total += result.rounds_used
        step(world, cfg)
        if world.penetrated:
            break
        if world.neutralized == budget:
            break

    success = world.neutralized == budget and world.penetrated == 0
    mean_rounds = rounds_total / replans if replans else 0.0
    metrics = EpochMetrics(success=success, spawned=world.spawned,
                           neutralized=world.neutralized,
                           penetrated=world.penetrated,
                           duration=world.clock, replans=replans,
                           mean_replan_rounds=mean_rounds)
    return metrics, world.events


def format_event(ev: SimEvent) -> str:
    """Render one event as a stable single line for logs and diffing."""
    parts = [f"t={ev.time:.3f}", f"kind={ev.kind}"]
    if ev.evader_id is not None:
        parts.append(f"evader={ev.evader_id}")
    if ev.intruder_id is not None:
        parts.append(f"intruder={ev.intruder_id}")
    if ev.payload:
        parts.append(ev.payload)
    return " ".join(parts)


def format_metrics(m: EpochMetrics) -> str:
    return (f"metrics success={int(m.success)} spawned={m.spawned} "
            f"neutralized={m.neutralized} penetrated={m.penetrated} "
            f"duration={m.duration:.3f} replans={m.replans} "
            f"mean_replan_rounds={m.mean_replan_rounds:.4f}")
