"""Command-line front end.

Subcommands: allocate (one static allocation), simulate (one full episode),
montecarlo (grid sweep of episodes), oracle (exhaustive optimum next to the
decentralized result on the same scene). Output goes to stdout or --out.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from random import Random

from .cbba import resolve
from .harness import (ORACLE_MAX_TASKS, SweepConfig, brute_force_oracle,
                      emit_report, run_montecarlo)
from .losses import INFEASIBLE, path_cost
from .scenario import ScenarioConfig, ScenarioError, load_scenario, tasks_from_intruders
from .simulator import fill_spawn_slots, new_world, run_episode


def _load_config(args: argparse.Namespace) -> ScenarioConfig:
    if args.scenario:
        with open(args.scenario, "r", encoding="utf-8") as fh:
            cfg = load_scenario(fh.read())
    else:
        cfg = ScenarioConfig()
        cfg.validate()
    if args.seed is not None:
        cfg = replace(cfg, rng_seed=args.seed)
    return cfg


def _write(out_path: str | None, text: str) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _initial_scene(cfg: ScenarioConfig):
    """The scene an episode would see at its very first replan."""
    world = new_world(cfg)
    fill_spawn_slots(world, cfg, Random(cfg.rng_seed))
    tasks = {t.task_id: t for t in tasks_from_intruders(world.intruders, cfg)}
    positions = {it.id: it.position for it in world.intruders}
    return world, tasks, positions


def _cmd_allocate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    world, tasks, positions = _initial_scene(cfg)
    result = resolve(world.evaders, tasks, positions, cfg)
    _write(args.out, emit_report(result, args.format))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    metrics, events = run_episode(cfg)
    _write(args.out, emit_report((metrics, events), args.format))
    return 0


def _cmd_montecarlo(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    sweep = SweepConfig(
        base=cfg,
        sep_grid=tuple(float(s) for s in args.sep_grid.split(",") if s.strip()),
        evader_grid=tuple(int(s) for s in args.evaders_grid.split(",")
                          if s.strip()),
        epochs=args.epochs)
    result = run_montecarlo(sweep, jobs=args.jobs)
    _write(args.out, emit_report(result, args.format))
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    world, tasks, positions = _initial_scene(cfg)
    alloc = resolve(world.evaders, tasks, positions, cfg)
    optimum = brute_force_oracle(world.evaders, tasks, positions, cfg,
                                 max_tasks=args.max_tasks)
    alloc_count = sum(1 for a in alloc.assignment.values() if a is not None)
    alloc_cost = sum(path_cost(alloc.paths[e.id], e, tasks, positions, cfg)
                     for e in world.evaders)
    lines = [
        f"tasks={len(tasks)} agents={len(world.evaders)}",
        (f"resolve: assigned={alloc_count} cost={alloc_cost:.6f} "
         f"rounds={alloc.rounds_used} converged={int(alloc.converged)}"),
        (f"oracle:  assigned={optimum.assigned_count} "
         f"cost={optimum.total_cost:.6f}"),
    ]
    if alloc_count < optimum.assigned_count:
        lines.append("gap: decentralized run assigned fewer tasks")
    elif alloc_cost > optimum.total_cost + 1e-9 * max(1.0, abs(optimum.total_cost)):
        lines.append(f"gap: cost overhead {alloc_cost - optimum.total_cost:.6f}")
    else:
        lines.append("gap: none")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="airguard",
        description="Spatio-temporal task allocation for airspace defense")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--scenario", help="path to a key = value scenario file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the scenario rng seed")
        p.add_argument("--out", default=None,
                       help="write output to this file instead of stdout")

    p = sub.add_parser("allocate", help="run one static allocation")
    common(p)
    p.add_argument("--format", choices=["report"], default="report")
    p.set_defaults(fn=_cmd_allocate)

    p = sub.add_parser("simulate", help="run one closed-loop episode")
    common(p)
    p.add_argument("--format", choices=["events", "report"], default="events")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("montecarlo", help="sweep separation x team size")
    common(p)
    p.add_argument("--format", choices=["csv", "report"], default="csv")
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--sep-grid", default="0,10,20,40,60,80",
                   help="comma-separated separations in meters")
    p.add_argument("--evaders-grid", default="2,3,4",
                   help="comma-separated team sizes")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes; results identical for any value")
    p.set_defaults(fn=_cmd_montecarlo)

    p = sub.add_parser("oracle", help="compare one allocation to the optimum")
    common(p)
    p.add_argument("--max-tasks", type=int, default=ORACLE_MAX_TASKS,
                   help="refuse to enumerate beyond this many tasks")
    p.set_defaults(fn=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
