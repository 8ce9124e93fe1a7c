"""World-model geometry, spawning, and config parsing."""

from __future__ import annotations

import math
from random import Random

import pytest

from airguard import (IntruderState, ScenarioConfig, ScenarioError, Vec2,
                      load_scenario, neutralizing_point, spawn_intruder,
                      tasks_from_intruders, time_of_intrusion)
from airguard.scenario import (SPAWN_RETRY_BUDGET, STATUS_NEUTRALIZED,
                               clear_spawn_radii)
from conftest import make_cfg


def test_neutralizing_point_on_axis(cfg):
    it = IntruderState(0, Vec2(250.0, 0.0), 3.0)
    p = neutralizing_point(it, cfg)
    assert p.x == pytest.approx(100.0, abs=1e-12)
    assert p.y == pytest.approx(0.0, abs=1e-12)


def test_neutralizing_point_diagonal(cfg):
    # (160, 120) has norm 200, so the crossing sits at half the vector.
    p = neutralizing_point(IntruderState(1, Vec2(160.0, 120.0), 3.0), cfg)
    assert p.x == pytest.approx(80.0, abs=1e-12)
    assert p.y == pytest.approx(60.0, abs=1e-12)


def test_neutralizing_point_offset_center():
    cfg = make_cfg(airspace_center=Vec2(50.0, -20.0))
    it = IntruderState(0, Vec2(50.0, -320.0), 3.0)
    p = neutralizing_point(it, cfg)
    assert p.x == pytest.approx(50.0, abs=1e-12)
    assert p.y == pytest.approx(-120.0, abs=1e-12)


def test_neutralizing_point_lies_on_boundary_ray(cfg):
    rng = Random(101)
    for _ in range(200):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        radius = rng.uniform(cfg.airspace_radius + 1e-6, 500.0)
        it = IntruderState(0, Vec2(radius * math.cos(angle),
                                   radius * math.sin(angle)), 3.0)
        p = neutralizing_point(it, cfg)
        assert p.norm() == pytest.approx(cfg.airspace_radius, rel=1e-12)
        # Same direction as the intruder itself.
        cross = p.x * it.position.y - p.y * it.position.x
        assert cross == pytest.approx(0.0, abs=1e-6 * radius)
        assert p.x * it.position.x + p.y * it.position.y > 0.0


def test_neutralizing_point_rejects_inside(cfg):
    inside = IntruderState(0, Vec2(30.0, 40.0), 3.0)
    with pytest.raises(ScenarioError):
        neutralizing_point(inside, cfg)
    on_edge = IntruderState(0, Vec2(100.0, 0.0), 3.0)
    with pytest.raises(ScenarioError):
        neutralizing_point(on_edge, cfg)


def test_time_of_intrusion_values():
    it = IntruderState(0, Vec2(150.0, 0.0), 3.0)
    assert time_of_intrusion(it, Vec2(0.0, 0.0)) == pytest.approx(50.0)
    it = IntruderState(1, Vec2(0.0, 200.0), 3.0)
    assert time_of_intrusion(it, Vec2(0.0, 0.0)) == pytest.approx(200.0 / 3.0)
    assert time_of_intrusion(it, it.position) == 0.0


def test_time_of_intrusion_rejects_bad_speed():
    it = IntruderState(0, Vec2(150.0, 0.0), 0.0)
    with pytest.raises(ScenarioError):
        time_of_intrusion(it, Vec2(0.0, 0.0))


def test_tasks_from_intruders_skips_dead_and_sorts(cfg):
    intruders = [
        IntruderState(5, Vec2(0.0, 150.0), 3.0),
        IntruderState(2, Vec2(200.0, 0.0), 3.0),
        IntruderState(3, Vec2(300.0, 0.0), 3.0, status=STATUS_NEUTRALIZED),
    ]
    tasks = tasks_from_intruders(intruders, cfg)
    assert [t.task_id for t in tasks] == [2, 5]
    by_id = {t.task_id: t for t in tasks}
    assert by_id[2].neutral_point.x == pytest.approx(100.0)
    assert by_id[2].intrusion_time == pytest.approx(100.0 / 3.0)
    assert by_id[5].intrusion_time == pytest.approx(50.0 / 3.0)


def test_spawn_respects_annulus_and_separation(cfg):
    rng = Random(11)
    existing: list[IntruderState] = []
    for _ in range(40):
        it = spawn_intruder(rng, cfg, existing)
        if it is None:
            break
        radius = it.position.norm()
        assert cfg.spawn_radius_min - 1e-9 <= radius <= cfg.spawn_radius_max + 1e-9
        for other in existing:
            gap = abs(radius - other.position.norm())
            assert gap >= cfg.min_radial_separation - 1e-9
        existing.append(it)
    assert existing, "at least one spawn must land in an empty world"


def test_spawn_fresh_id_is_max_plus_one(cfg):
    rng = Random(3)
    existing = [IntruderState(7, Vec2(0.0, 200.0), 3.0)]
    it = spawn_intruder(rng, cfg, existing)
    assert it is not None and it.id == 8


def test_spawn_gives_up_when_fully_blocked():
    cfg = make_cfg(min_radial_separation=500.0)
    rng = Random(5)
    blocker = IntruderState(0, Vec2(0.0, 200.0), 3.0)
    before = rng.getstate()
    assert spawn_intruder(rng, cfg, [blocker]) is None
    # Exactly the retry budget of (angle, radius) draws was consumed.
    probe = Random(5)
    probe.setstate(before)
    for _ in range(2 * SPAWN_RETRY_BUDGET):
        probe.random()
    assert rng.getstate() == probe.getstate()


def test_clear_spawn_radii_merges_blockers(cfg):
    # Blockers at radii 200 and 215 with separation 40 exclude (160, 240)
    # and (175, 255), which together cover the whole [180, 250] annulus.
    blockers = [IntruderState(0, Vec2(200.0, 0.0), 3.0),
                IntruderState(1, Vec2(0.0, 215.0), 3.0)]
    spans = clear_spawn_radii(blockers, cfg)
    assert spans == []
    near = [IntruderState(0, Vec2(190.0, 0.0), 3.0)]
    spans = clear_spawn_radii(near, cfg)
    assert spans == [(230.0, 250.0)]


def test_clear_spawn_radii_degenerate_annulus():
    cfg = make_cfg(spawn_radius_min=200.0, spawn_radius_max=200.0,
                   min_radial_separation=0.0)
    assert clear_spawn_radii([], cfg) == [(200.0, 200.0)]
    rng = Random(1)
    it = spawn_intruder(rng, cfg, [])
    assert it is not None
    assert it.position.norm() == pytest.approx(200.0)


def test_intrusion_time_falls_with_approach(cfg):
    # Moving straight at the center shortens the crossing time by exactly
    # the elapsed time.
    it = IntruderState(0, Vec2(160.0, 120.0), 3.0)
    point = neutralizing_point(it, cfg)
    t0 = time_of_intrusion(it, point)
    dt = 0.1
    step = it.position.norm()
    k = it.speed * dt / step
    it.position = Vec2(it.position.x * (1.0 - k), it.position.y * (1.0 - k))
    t1 = time_of_intrusion(it, point)
    assert t0 - t1 == pytest.approx(dt, abs=1e-6)


def test_load_scenario_defaults_and_overrides():
    cfg = load_scenario("""
    # comment line
    airspace_radius = 120.0
    num_evaders = 4          # trailing comment
    rng_seed = 99
    airspace_center = 10.0, -5.0
    """)
    assert cfg.airspace_radius == 120.0
    assert cfg.num_evaders == 4
    assert cfg.rng_seed == 99
    assert cfg.airspace_center == Vec2(10.0, -5.0)
    assert cfg.neutralize_radius == 20.0  # untouched default


@pytest.mark.parametrize("text", [
    "bogus_key = 1",
    "airspace_radius == 5",
    "airspace_radius = fast",
    "airspace_center = 1.0",
    "num_evaders = 2.5",
])
def test_load_scenario_rejects_malformed(text):
    with pytest.raises(ScenarioError):
        load_scenario(text)


@pytest.mark.parametrize("field,value", [
    ("airspace_radius", -1.0),
    ("neutralize_radius", 0.0),
    ("neutralize_radius", 150.0),
    ("intruder_speed", 0.0),
    ("evader_max_speed", 2.0),      # must exceed intruder speed
    ("num_evaders", 0),
    ("max_concurrent_intruders", 0),
    ("max_intruders_per_epoch", -1),
    ("spawn_radius_min", 90.0),     # inside the boundary
    ("spawn_radius_max", 150.0),    # below the minimum
    ("min_radial_separation", -4.0),
    ("eta", 0.0),
    ("eta", 1.0),
    ("sim_dt", 0.0),
    ("replan_interval", 0.05),      # below sim_dt
    ("horizon", 0.0),
    ("consensus_max_rounds", -1),
    ("airspace_radius", math.inf),
    ("eta", math.nan),
])
def test_validate_rejects_bad_fields(field, value):
    from dataclasses import replace
    cfg = replace(ScenarioConfig(), **{field: value})
    with pytest.raises(ScenarioError):
        cfg.validate()


def test_default_config_is_valid():
    ScenarioConfig().validate()
