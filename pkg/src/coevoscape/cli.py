"""Command-line entry point.

Three subcommands, all driven by a JSON config file:

    simulate    run one trajectory; write a per-generation summary
                (trajectory.csv) and, on request, landscape snapshots
    landscape   write landscape snapshot files for chosen generations
    measures    run a full batch; write the aggregated measure series

CSV is the primary output; --format json additionally writes a .json
mirror next to every CSV. Flags override config-file values, which
override built-in defaults. Single-trajectory commands seed their run
exactly like run 0 of a batch with the same master seed, so `simulate
--seed S` reproduces the first run of `measures --seed S`.

Exit code 0 means every requested file was written and re-read cleanly;
any failure prints a message to stderr and exits 1.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .evolution import CoevoState, run_trajectory
from .experiment import ConfigError, ExperimentConfig, run_batch, trajectory_seed
from .landscape import snapshot_profiles
from .substrate import Task

TRAJECTORY_HEADER = ("generation", "best_p1", "fitness_p1", "best_p2", "fitness_p2")
SNAPSHOT_HEADER = ("x", "f_obj", "f_sub_p1", "f_sub_p2")
MEASURES_HEADER = ("generation", "population", "measure", "mean", "ci_lo", "ci_hi")


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    # repr of a Python float is the shortest round-trip form
    return repr(float(value))


def _json_value(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def write_table(path: Path, header: tuple[str, ...], rows, json_mirror: bool) -> Path:
    """Write one CSV table (plus optional JSON mirror) and verify it back."""
    rows = [tuple(row) for row in rows]
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fp:
        fp.write("\n".join(lines) + "\n")
    if json_mirror:
        records = [dict(zip(header, (_json_value(v) for v in row))) for row in rows]
        with open(path.with_suffix(".json"), "w", encoding="utf-8", newline="") as fp:
            json.dump(records, fp, indent=2)
            fp.write("\n")
    _verify_table(path, header, len(rows))
    return path


def _verify_table(path: Path, header: tuple[str, ...], n_rows: int) -> None:
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != ",".join(header):
        raise RuntimeError(f"{path}: header mismatch after write")
    if len(lines) - 1 != n_rows:
        raise RuntimeError(f"{path}: expected {n_rows} data rows, found {len(lines) - 1}")
    for line in lines[1:]:
        if line.count(",") != len(header) - 1:
            raise RuntimeError(f"{path}: malformed row {line!r}")


def trajectory_rows(states: list[CoevoState]) -> list[tuple]:
    rows = []
    for state in states:
        row = [state.generation]
        for pop in (state.pop1, state.pop2):
            agg = np.max if pop.task is Task.MAXIMIZE else np.min
            row.extend([pop.best(), float(agg(pop.fitnesses))])
        rows.append(tuple(row))
    return rows


def snapshot_rows(state: CoevoState, grid: np.ndarray, kind) -> list[tuple]:
    obj, sub1, sub2 = snapshot_profiles(state, grid, kind)
    return list(zip(grid, obj.values, sub1.values, sub2.values))


def _load_config(args) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, master_seed=args.seed)
    return config


def _parse_generations(text: str, last: int) -> list[int]:
    try:
        wanted = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"--generations must be comma-separated integers, got {text!r}")
    if not wanted:
        raise ValueError("--generations lists no generations")
    out_of_range = [k for k in wanted if not 0 <= k <= last]
    if out_of_range:
        raise ValueError(f"--generations out of range 0..{last}: {out_of_range}")
    return wanted


def cmd_simulate(args) -> int:
    config = _load_config(args)
    states = run_trajectory(config, trajectory_seed(config.master_seed, 0))
    json_mirror = args.fmt == "json"
    write_table(args.out / "trajectory.csv", TRAJECTORY_HEADER,
                trajectory_rows(states), json_mirror)
    if args.generations is not None:
        wanted = _parse_generations(args.generations, config.generations)
    elif config.snapshots:
        wanted = list(range(config.generations + 1))
    else:
        wanted = []
    grid = config.grid()
    kind = config.objective_kind()
    for k in wanted:
        write_table(args.out / "snapshots" / f"landscape_k{k}.csv", SNAPSHOT_HEADER,
                    snapshot_rows(states[k], grid, kind), json_mirror)
    return 0


def cmd_landscape(args) -> int:
    config = _load_config(args)
    wanted = _parse_generations(args.generations, config.generations)
    states = run_trajectory(config, trajectory_seed(config.master_seed, 0))
    grid = config.grid()
    kind = config.objective_kind()
    for k in wanted:
        write_table(args.out / f"landscape_k{k}.csv", SNAPSHOT_HEADER,
                    snapshot_rows(states[k], grid, kind), args.fmt == "json")
    return 0


def cmd_measures(args) -> int:
    config = _load_config(args)
    json_mirror = args.fmt == "json"
    per_run = None
    if config.snapshots:
        grid = config.grid()
        kind = config.objective_kind()

        def per_run(r: int, states: list[CoevoState]) -> None:
            run_dir = args.out / "snapshots" / f"run_{r:03d}"
            for state in states:
                write_table(run_dir / f"landscape_k{state.generation}.csv",
                            SNAPSHOT_HEADER, snapshot_rows(state, grid, kind),
                            json_mirror)

    series = run_batch(config, workers=args.workers, per_run=per_run)
    write_table(args.out / "measures.csv", MEASURES_HEADER, list(series.rows()),
                json_mirror)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coevoscape",
        description="Simulate two-population coevolution and compare subjective "
                    "against objective fitness landscapes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path,
                        help="JSON config file (see README for the keys)")
    common.add_argument("--seed", type=int, default=None,
                        help="override the config's master seed")
    common.add_argument("--out", type=Path, default=Path("."),
                        help="output directory (created if missing)")
    common.add_argument("--workers", type=int, default=1,
                        help="parallel worker processes for batch runs")
    common.add_argument("--format", choices=("csv", "json"), default="csv",
                        dest="fmt",
                        help="csv only, or json to mirror every CSV as JSON")

    sim = sub.add_parser("simulate", parents=[common],
                         help="run one trajectory and write its summary")
    sim.add_argument("--generations", default=None, metavar="K,K,...",
                     help="also snapshot these generations' landscapes")
    sim.set_defaults(func=cmd_simulate)

    land = sub.add_parser("landscape", parents=[common],
                          help="write landscape snapshots for chosen generations")
    land.add_argument("--generations", default="0,3,6", metavar="K,K,...",
                      help="generations to snapshot (default 0,3,6)")
    land.set_defaults(func=cmd_landscape)

    meas = sub.add_parser("measures", parents=[common],
                          help="run a batch and write the measure series")
    meas.set_defaults(func=cmd_measures)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
