"""Episode runner and benchmark matrix driver."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .estimation import make_estimator
from .grid import (
    Cell,
    GroundTruthMap,
    MapFormatError,
    MapGenerationError,
    MapParams,
    generate_map,
    load_map,
    reachable_mask,
)
from .navigation import EpisodeState, ReplayRecord, ensure_goal, navigate_step, remaining_frontier_count
from .planner import DEFAULT_PRUNE_WIDTH, DEFAULT_STEP_RATIO, make_planner
from .sensing import Action, AgentState, Heading, SensorConfig


class ConfigError(ValueError):
    pass


DEFAULT_BUDGET = 500

# Reachable-cell-count buckets for benchmark aggregation.
SIZE_BUCKETS = (("small", 4000), ("medium", 10000), ("large", None))


def size_bucket(reachable_cells: int) -> str:
    if reachable_cells < SIZE_BUCKETS[0][1]:
        return "small"
    if reachable_cells <= SIZE_BUCKETS[1][1]:
        return "medium"
    return "large"


@dataclass(frozen=True)
class EpisodeConfig:
    """One exploration episode: map source, start, budget, and policies."""

    map_file: str | None = None
    gen_seed: int | None = None
    gen_params: MapParams = MapParams()
    start: Cell | None = None
    seed: int = 0  # start-cell choice and noisy-estimator stream
    budget: int = DEFAULT_BUDGET
    planner: str = "lfe"
    estimator: str = "oracle"
    fov_degrees: int = 360
    range_cells: int = 40
    step_ratio: float = DEFAULT_STEP_RATIO
    k: int = DEFAULT_PRUNE_WIDTH


@dataclass
class EpisodeResult:
    coverage: float
    coverage_trace: list[float]
    steps_used: int
    frontiers_visited: list[tuple[int, int]]
    remaining_frontier_cells: int
    reachable_cells: int
    wall_clock_ms: float
    replay: list[ReplayRecord] = field(default_factory=list)


def _resolve_map(config: EpisodeConfig) -> GroundTruthMap:
    if (config.map_file is None) == (config.gen_seed is None):
        raise ConfigError("exactly one of map_file or gen_seed must be given")
    if config.map_file is not None:
        try:
            return load_map(Path(config.map_file).read_text())
        except FileNotFoundError:
            raise ConfigError(f"map file not found: {config.map_file}") from None
        except MapFormatError as exc:
            raise ConfigError(f"bad map file {config.map_file}: {exc}") from None
    try:
        return generate_map(config.gen_seed, config.gen_params)
    except MapGenerationError as exc:
        raise ConfigError(f"map generation failed: {exc}") from None


def _resolve_start(config: EpisodeConfig, gt: GroundTruthMap) -> Cell:
    if config.start is not None:
        start = config.start
        if not gt.in_bounds(start) or not gt.is_free(start):
            raise ConfigError(f"start {start} is not a free in-bounds cell")
        return start
    ys, xs = np.nonzero(gt.free_mask)
    if ys.size == 0:
        raise ConfigError("map has no free cells")
    rng = np.random.default_rng(config.seed)
    i = int(rng.integers(ys.size))
    return Cell(int(xs[i]), int(ys[i]))


def run_episode(config: EpisodeConfig) -> EpisodeResult:
    """Run one episode to budget exhaustion or frontier exhaustion."""
    if config.budget < 1:
        raise ConfigError("budget must be >= 1")
    gt = _resolve_map(config)
    start = _resolve_start(config, gt)
    try:
        sensor = SensorConfig(config.fov_degrees, config.range_cells)
        planner = make_planner(config.planner, config.k)
        estimator = make_estimator(config.estimator, config.seed, config.step_ratio)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    t0 = time.perf_counter()
    from .grid import ObservedMap

    state = EpisodeState(
        gt=gt,
        observed=ObservedMap.unknown_like(gt),
        agent=AgentState(start, Heading.N, config.budget),
        sensor=sensor,
        planner=planner,
        estimator=estimator,
        step_ratio=config.step_ratio,
        reachable=reachable_mask(gt, start),
    )
    state.sense()
    state.coverage_trace.append(state.coverage)
    while state.agent.remaining_budget > 0:
        if not ensure_goal(state):
            state.replay.append(
                ReplayRecord(
                    step=state.steps_used,
                    pos=state.agent.pos,
                    heading=state.agent.heading.name,
                    action=Action.STOP.value,
                    coverage=state.coverage,
                    chosen_frontier=None,
                )
            )
            break
        navigate_step(state)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return EpisodeResult(
        coverage=state.coverage,
        coverage_trace=state.coverage_trace,
        steps_used=state.steps_used,
        frontiers_visited=[(c.x, c.y) for c in state.visited_frontiers],
        remaining_frontier_cells=remaining_frontier_count(state),
        reachable_cells=int(state.reachable.sum()),
        wall_clock_ms=wall_ms,
        replay=state.replay,
    )


def write_replay(path: str | Path, replay: list[ReplayRecord]) -> None:
    """JSON-lines replay log, one record per primitive action."""
    with open(path, "w", newline="\n") as fh:
        for rec in replay:
            fh.write(
                json.dumps(
                    {
                        "step": rec.step,
                        "pos": [rec.pos.x, rec.pos.y],
                        "heading": rec.heading,
                        "action": rec.action,
                        "coverage": rec.coverage,
                        "chosen_frontier": rec.chosen_frontier,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )


def result_summary(config: EpisodeConfig, result: EpisodeResult) -> dict:
    return {
        "map": config.map_file or f"gen:{config.gen_seed}",
        "seed": config.seed,
        "planner": config.planner,
        "estimator": config.estimator,
        "fov": config.fov_degrees,
        "budget": config.budget,
        "bucket": size_bucket(result.reachable_cells),
        "reachable_cells": result.reachable_cells,
        "steps_used": result.steps_used,
        "coverage": result.coverage,
        "remaining_frontier_cells": result.remaining_frontier_cells,
        "wall_clock_ms": round(result.wall_clock_ms, 3),
    }


def _run_row(config: EpisodeConfig) -> dict:
    return result_summary(config, run_episode(config))


def run_benchmark(configs: list[EpisodeConfig], parallelism: int = 1) -> dict:
    """Run a config matrix and aggregate mean coverage per planner and bucket.

    Rows come back in the input order whatever the parallelism, so serial and
    parallel runs produce identical tables.
    """
    if not configs:
        raise ConfigError("benchmark matrix is empty")
    rows: list[dict]
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            rows = list(pool.map(_run_row, configs, chunksize=1))
    else:
        rows = [_run_row(c) for c in configs]
    summary: dict[str, dict[str, dict[str, float]]] = {}
    groups: dict[tuple[str, str], list[float]] = {}
    for row in rows:
        groups.setdefault((row["planner"], row["bucket"]), []).append(row["coverage"])
    for (planner, bucket), values in sorted(groups.items()):
        summary.setdefault(planner, {})[bucket] = {
            "mean_coverage": sum(values) / len(values),
            "episodes": len(values),
        }
    return {"rows": rows, "summary": summary}


_CSV_FIELDS = [
    "map",
    "seed",
    "planner",
    "estimator",
    "fov",
    "budget",
    "bucket",
    "reachable_cells",
    "steps_used",
    "coverage",
    "remaining_frontier_cells",
    "wall_clock_ms",
]


def write_benchmark_csv(path: str | Path, table: dict) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_CSV_FIELDS)
        writer.writeheader()
        for row in table["rows"]:
            writer.writerow(row)


def write_benchmark_json(path: str | Path, table: dict) -> None:
    with open(path, "w") as fh:
        json.dump(table, fh, indent=2, sort_keys=True)
        fh.write("\n")


def expand_bench_config(doc: dict) -> tuple[list[EpisodeConfig], int]:
    """Expand a parsed TOML benchmark document into an episode matrix."""
    maps = doc.get("maps", {})
    episodes = doc.get("episodes", {})
    run = doc.get("run", {})
    gen_params = MapParams(
        width=int(maps.get("width", 96)),
        height=int(maps.get("height", 96)),
        room_count_range=tuple(maps.get("rooms", (6, 10))),
        corridor_width=int(maps.get("corridor_width", 2)),
        min_room_size=int(maps.get("min_room_size", 5)),
    )
    map_files = maps.get("files")
    count = int(maps.get("count", 50))
    seed_start = int(maps.get("seed_start", 0))
    start_seeds = int(episodes.get("start_seeds", 5))
    configs = []
    base = EpisodeConfig(
        budget=int(episodes.get("budget", DEFAULT_BUDGET)),
        range_cells=int(episodes.get("range_cells", 40)),
        step_ratio=float(episodes.get("step_ratio", DEFAULT_STEP_RATIO)),
        k=int(episodes.get("k", DEFAULT_PRUNE_WIDTH)),
        gen_params=gen_params,
    )
    sources: list[dict]
    if map_files:
        sources = [{"map_file": str(f), "gen_seed": None} for f in map_files]
    else:
        sources = [{"map_file": None, "gen_seed": seed_start + i} for i in range(count)]
    for source in sources:
        for seed in range(start_seeds):
            for planner in episodes.get("planners", ["lfe", "greedy", "nearest"]):
                for estimator in episodes.get("estimators", ["oracle"]):
                    for fov in episodes.get("fovs", [360]):
                        configs.append(
                            replace(
                                base,
                                planner=str(planner),
                                estimator=str(estimator),
                                fov_degrees=int(fov),
                                seed=seed,
                                **source,
                            )
                        )
    return configs, int(run.get("parallelism", 1))
