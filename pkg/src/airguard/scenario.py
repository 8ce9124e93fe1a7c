"""World model for the airspace-defense scenario.

A circular protected airspace sits at a fixed center. Intruders spawn on an
annulus outside the boundary and fly straight toward the center at constant
speed; defending evaders patrol inside and are dispatched to intercept.
Every approaching intruder induces one spatio-temporal task: the point where
its inbound ray crosses the boundary circle, paired with the time remaining
until it gets there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from random import Random

STATUS_APPROACHING = "approaching"
STATUS_NEUTRALIZED = "neutralized"
STATUS_PENETRATED = "penetrated"

# Rejection-sampling budget for one spawn attempt. If no admissible position
# is found within this many draws the attempt is abandoned for this tick.
SPAWN_RETRY_BUDGET = 64


class ScenarioError(ValueError):
    """Raised for configs that violate scenario invariants."""


@dataclass(frozen=True, slots=True)
class Vec2:
    x: float
    y: float

    def dist(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True, slots=True)
class ScenarioConfig:
    """Flat bundle of every tunable the engine reads.

    Distances are meters, speeds meters per second, times seconds.
    """

    airspace_center: Vec2 = Vec2(0.0, 0.0)
    airspace_radius: float = 100.0        # protected boundary circle
    neutralize_radius: float = 20.0       # capture range of an evader
    intruder_speed: float = 3.0
    evader_max_speed: float = 4.5
    num_evaders: int = 3
    max_concurrent_intruders: int = 6
    max_intruders_per_epoch: int = 30
    spawn_radius_min: float = 180.0       # annulus intruders appear on
    spawn_radius_max: float = 250.0
    min_radial_separation: float = 40.0   # pairwise distance-to-center gap at spawn
    eta: float = 0.5                      # weight of intruder proximity in spatial loss
    sim_dt: float = 0.1
    replan_interval: float = 0.5
    horizon: float = 1200.0
    rng_seed: int = 1
    consensus_max_rounds: int = 0         # 0 selects the automatic bound

    def validate(self) -> None:
        """Raise ScenarioError naming the offending field if any bound fails."""
        checks = [
            (self.airspace_radius > 0.0, "airspace_radius must be positive"),
            (0.0 < self.neutralize_radius < self.airspace_radius,
             "neutralize_radius must lie in (0, airspace_radius)"),
            (self.intruder_speed > 0.0, "intruder_speed must be positive"),
            (self.evader_max_speed > self.intruder_speed,
             "evader_max_speed must exceed intruder_speed"),
            (self.num_evaders >= 1, "num_evaders must be at least 1"),
            (self.max_concurrent_intruders >= 1,
             "max_concurrent_intruders must be at least 1"),
            (self.max_intruders_per_epoch >= 0,
             "max_intruders_per_epoch must be nonnegative"),
            (self.spawn_radius_min > self.airspace_radius,
             "spawn_radius_min must exceed airspace_radius"),
            (self.spawn_radius_max >= self.spawn_radius_min,
             "spawn_radius_max must be at least spawn_radius_min"),
            (self.min_radial_separation >= 0.0,
             "min_radial_separation must be nonnegative"),
            (0.0 < self.eta < 1.0, "eta must lie in (0, 1)"),
            (self.sim_dt > 0.0, "sim_dt must be positive"),
            (self.replan_interval >= self.sim_dt,
             "replan_interval must be at least sim_dt"),
            (self.horizon > 0.0, "horizon must be positive"),
            (self.consensus_max_rounds >= 0,
             "consensus_max_rounds must be nonnegative"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ScenarioError(msg)
        for name in ("airspace_radius", "neutralize_radius", "intruder_speed",
                     "evader_max_speed", "spawn_radius_min", "spawn_radius_max",
                     "min_radial_separation", "eta", "sim_dt", "replan_interval",
                     "horizon"):
            if not math.isfinite(getattr(self, name)):
                raise ScenarioError(f"{name} must be finite")
        if not (math.isfinite(self.airspace_center.x)
                and math.isfinite(self.airspace_center.y)):
            raise ScenarioError("airspace_center must be finite")


@dataclass(slots=True)
class IntruderState:
    id: int
    position: Vec2
    speed: float
    status: str = STATUS_APPROACHING


@dataclass(slots=True)
class EvaderState:
    id: int
    position: Vec2
    max_speed: float
    current_path: list[int] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class SpatioTemporalTask:
    """One point-defense job: be at neutral_point before intrusion_time."""

    task_id: int            # equals the inducing intruder's id
    neutral_point: Vec2
    intrusion_time: float   # seconds from now until boundary crossing


def neutralizing_point(intruder: IntruderState, cfg: ScenarioConfig) -> Vec2:
    """Boundary-circle point where the intruder's inbound ray crosses.

    The intruder must be strictly outside the boundary.
    """
    center = cfg.airspace_center
    dx = intruder.position.x - center.x
    dy = intruder.position.y - center.y
    dist = math.hypot(dx, dy)
    if dist <= cfg.airspace_radius:
        raise ScenarioError(
            f"intruder {intruder.id} is not outside the boundary "
            f"(dist {dist:.3f} <= radius {cfg.airspace_radius:.3f})")
    k = cfg.airspace_radius / dist
    return Vec2(center.x + dx * k, center.y + dy * k)


def time_of_intrusion(intruder: IntruderState, point: Vec2) -> float:
    """Seconds until the intruder reaches `point` at its constant speed."""
    if intruder.speed <= 0.0:
        raise ScenarioError(f"intruder {intruder.id} speed must be positive")
    return intruder.position.dist(point) / intruder.speed


def tasks_from_intruders(intruders: list[IntruderState],
                         cfg: ScenarioConfig) -> list[SpatioTemporalTask]:
    """Snapshot one task per approaching intruder, ordered by task id."""
    tasks = []
    for it in sorted(intruders, key=lambda it: it.id):
        if it.status != STATUS_APPROACHING:
            continue
        point = neutralizing_point(it, cfg)
        tasks.append(SpatioTemporalTask(it.id, point, time_of_intrusion(it, point)))
    return tasks


def clear_spawn_radii(existing: list[IntruderState], cfg: ScenarioConfig,
                      ) -> list[tuple[float, float]]:
    """Sub-intervals of the spawn annulus clear of every approaching intruder.

    A candidate radius is admissible when its distance-to-center differs by at
    least min_radial_separation from every approaching intruder's. Returns the
    admissible radius intervals in ascending order (possibly empty).
    """
    lo, hi = cfg.spawn_radius_min, cfg.spawn_radius_max
    sep = cfg.min_radial_separation
    center = cfg.airspace_center
    blocked = sorted(
        (it.position.dist(center) - sep, it.position.dist(center) + sep)
        for it in existing if it.status == STATUS_APPROACHING)
    out = []
    cur = lo
    for b_lo, b_hi in blocked:
        if b_hi <= cur or b_lo >= hi:
            continue
        if b_lo > cur:
            out.append((cur, b_lo))
        cur = max(cur, b_hi)
        if cur > hi:
            break
    # The annulus is closed, so a zero-width remainder (including a
    # degenerate min == max annulus) still admits one exact radius.
    if cur <= hi:
        out.append((cur, hi))
    return out


def spawn_intruder(rng: Random, cfg: ScenarioConfig,
                   existing: list[IntruderState]) -> IntruderState | None:
    """Try to place one new intruder on the spawn annulus.

    Position is drawn with angle uniform on [0, 2*pi) and radius uniform on
    [spawn_radius_min, spawn_radius_max], redrawn until the radial-separation
    rule against all approaching intruders holds. Returns None if the retry
    budget runs out; the caller is free to try again on a later tick.
    """
    center = cfg.airspace_center
    sep = cfg.min_radial_separation
    radii = [it.position.dist(center)
             for it in existing if it.status == STATUS_APPROACHING]
    for _ in range(SPAWN_RETRY_BUDGET):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        radius = rng.uniform(cfg.spawn_radius_min, cfg.spawn_radius_max)
        if all(abs(radius - r) >= sep for r in radii):
            fresh_id = 1 + max((it.id for it in existing), default=-1)
            pos = Vec2(center.x + radius * math.cos(angle),
                       center.y + radius * math.sin(angle))
            return IntruderState(fresh_id, pos, cfg.intruder_speed)
    return None


_CONFIG_FIELDS: dict[str, type] = {
    "airspace_radius": float,
    "neutralize_radius": float,
    "intruder_speed": float,
    "evader_max_speed": float,
    "num_evaders": int,
    "max_concurrent_intruders": int,
    "max_intruders_per_epoch": int,
    "spawn_radius_min": float,
    "spawn_radius_max": float,
    "min_radial_separation": float,
    "eta": float,
    "sim_dt": float,
    "replan_interval": float,
    "horizon": float,
    "rng_seed": int,
    "consensus_max_rounds": int,
}


def load_scenario(text: str) -> ScenarioConfig:
    """Parse a flat key = value config; '#' starts a comment.

    Unknown keys and malformed values raise ScenarioError. Keys omitted from
    the text keep their defaults. The returned config is already validated.
    """
    overrides: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key == "airspace_center":
            parts = value.split(",")
            if len(parts) != 2:
                raise ScenarioError(f"line {lineno}: airspace_center wants 'x,y'")
            try:
                overrides[key] = Vec2(float(parts[0]), float(parts[1]))
            except ValueError as exc:
                raise ScenarioError(f"line {lineno}: {exc}") from None
            continue
        caster = _CONFIG_FIELDS.get(key)
        if caster is None:
            raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        try:
            overrides[key] = caster(value)
        except ValueError:
            raise ScenarioError(
                f"line {lineno}: cannot parse {value!r} for {key}") from None
    cfg = replace(ScenarioConfig(), **overrides)
    cfg.validate()
    return cfg
