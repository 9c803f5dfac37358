"""Command line interface: ``explore run`` and ``explore bench``."""

from __future__ import annotations

import argparse
import json
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .grid import Cell, MapParams
from .harness import (
    ConfigError,
    EpisodeConfig,
    expand_bench_config,
    result_summary,
    run_benchmark,
    run_episode,
    write_benchmark_csv,
    write_benchmark_json,
    write_replay,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="explore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a single exploration episode")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--map", help="map file path")
    src.add_argument("--gen-seed", type=int, help="generate a map from this seed")
    run.add_argument("--gen-width", type=int, default=80)
    run.add_argument("--gen-height", type=int, default=80)
    run.add_argument("--gen-rooms", type=int, nargs=2, default=(5, 9), metavar=("LO", "HI"))
    run.add_argument("--budget", type=int, default=500)
    run.add_argument("--planner", choices=["lfe", "greedy", "nearest"], default="lfe")
    run.add_argument(
        "--estimator",
        default="oracle",
        help="oracle | oracle-noisy=SIGMA (default oracle)",
    )
    run.add_argument("--fov", type=int, choices=[360, 90], default=360)
    run.add_argument("--range", type=int, default=40, dest="range_cells")
    run.add_argument("--ratio", type=float, default=1.7)
    run.add_argument("--k", type=int, default=6)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--start", type=int, nargs=2, metavar=("X", "Y"))
    run.add_argument("--out", help="write the episode summary JSON here")
    run.add_argument("--replay", help="write a JSON-lines replay log here")

    bench = sub.add_parser("bench", help="run a benchmark matrix from a TOML config")
    bench.add_argument("--config", required=True, help="benchmark TOML file")
    bench.add_argument("--out", required=True, help="CSV output path")
    bench.add_argument("--json-out", help="optional JSON output path")
    bench.add_argument("--parallelism", type=int, help="override the config value")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = EpisodeConfig(
        map_file=args.map,
        gen_seed=args.gen_seed,
        gen_params=MapParams(
            width=args.gen_width,
            height=args.gen_height,
            room_count_range=tuple(args.gen_rooms),
        ),
        start=Cell(*args.start) if args.start else None,
        seed=args.seed,
        budget=args.budget,
        planner=args.planner,
        estimator=args.estimator,
        fov_degrees=args.fov,
        range_cells=args.range_cells,
        step_ratio=args.ratio,
        k=args.k,
    )
    result = run_episode(config)
    summary = result_summary(config, result)
    summary["coverage_trace_len"] = len(result.coverage_trace)
    summary["frontiers_visited"] = result.frontiers_visited
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.replay:
        write_replay(args.replay, result.replay)
    print(
        f"coverage {result.coverage:.4f} in {result.steps_used} steps "
        f"({summary['reachable_cells']} reachable cells, planner {config.planner})"
    )
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    try:
        with open(args.config, "rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {args.config}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {args.config}: {exc}") from None
    configs, parallelism = expand_bench_config(doc)
    if args.parallelism:
        parallelism = args.parallelism
    table = run_benchmark(configs, parallelism)
    write_benchmark_csv(args.out, table)
    if args.json_out:
        write_benchmark_json(args.json_out, table)
    for planner, buckets in table["summary"].items():
        for bucket, stats in buckets.items():
            print(
                f"{planner:8s} {bucket:6s} mean coverage "
                f"{stats['mean_coverage']:.4f} over {stats['episodes']} episodes"
            )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_bench(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
