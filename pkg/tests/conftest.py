"""Shared builders for the test suite."""

from __future__ import annotations

import math
from dataclasses import replace
from random import Random

import pytest

from airguard import (EvaderState, IntruderState, ScenarioConfig,
                      SpatioTemporalTask, Vec2, path_cost,
                      tasks_from_intruders)


def make_cfg(**overrides) -> ScenarioConfig:
    cfg = replace(ScenarioConfig(), **overrides)
    cfg.validate()
    return cfg


def ring_evaders(n: int, cfg: ScenarioConfig) -> list[EvaderState]:
    center = cfg.airspace_center
    out = []
    for k in range(n):
        angle = 2.0 * math.pi * k / n
        out.append(EvaderState(
            k,
            Vec2(center.x + cfg.airspace_radius * math.cos(angle),
                 center.y + cfg.airspace_radius * math.sin(angle)),
            cfg.evader_max_speed))
    return out


def random_instance(rng: Random, n_agents: int, n_tasks: int,
                    cfg: ScenarioConfig):
    """Random static scene: evaders inside the disc, intruders outside."""
    evaders = []
    for k in range(n_agents):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        radius = rng.uniform(0.0, cfg.airspace_radius)
        evaders.append(EvaderState(
            k, Vec2(radius * math.cos(angle), radius * math.sin(angle)),
            cfg.evader_max_speed))
    intruders = []
    for j in range(n_tasks):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        radius = rng.uniform(cfg.airspace_radius * 1.5, cfg.airspace_radius * 3.0)
        intruders.append(IntruderState(
            j, Vec2(radius * math.cos(angle), radius * math.sin(angle)),
            cfg.intruder_speed))
    tasks = {t.task_id: t for t in tasks_from_intruders(intruders, cfg)}
    positions = {it.id: it.position for it in intruders}
    return evaders, tasks, positions


def allocation_census(alloc, evaders, tasks, positions, cfg):
    """(assigned count, summed path cost) of an allocation's paths."""
    count = sum(1 for a in alloc.assignment.values() if a is not None)
    total = sum(path_cost(alloc.paths[e.id], e, tasks, positions, cfg)
                for e in evaders)
    return count, total


@pytest.fixture
def cfg() -> ScenarioConfig:
    return make_cfg()
