"""Experiment runner.

Expands a sweep grid (postures x strategies x rates x buffers x seeds), runs
every cell, and writes runs.csv plus aggregated.csv into the output
directory. Also exposes schedule dumps for eyeballing a posture's pruned
graph and slot map.
"""
from __future__ import annotations

import argparse
import itertools
import multiprocessing
import os
import sys
from importlib import resources
from pathlib import Path

from .channel import ChannelTableError, load_channel_table
from .engine import RunConfig, STRATEGIES, simulate
from .metrics import compute
from .results import aggregate, run_row, write_agg_csv, write_runs_csv
from .topology import format_schedule

DEFAULT_RATES = (1, 2, 5, 10, 20, 50, 100, 200, 350, 500, 1000)
DEFAULT_BUFFERS = (100, 200, 300)
DEFAULT_SEEDS = 50
DEFAULT_MESSAGES = 100
JOBS_ENV = "WBANSIM_JOBS"

_worker_table = None


def default_table_path() -> str:
    return str(resources.files("wbansim") / "data" / "synthetic.tbl")


def _parse_list(text: str, conv):
    items = [part.strip() for part in text.split(",") if part.strip()]
    if not items:
        raise ValueError(f"empty list: {text!r}")
    return [conv(part) for part in items]


def _parse_rate(text: str) -> float:
    value = float(text)
    return int(value) if value.is_integer() else value


def read_config_file(path: str) -> dict:
    """Line-oriented `key = value` settings; same keys as the flags."""
    settings = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            settings[key.replace("-", "_")] = value
    return settings


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wbansim",
        description="Broadcast strategy sweeps over posture channel tables.")
    p.add_argument("--table", help="channel table path (default: shipped fixture)")
    p.add_argument("--postures", help="comma list (default: all in table)")
    p.add_argument("--strategies", help=f"comma list from {','.join(STRATEGIES)}")
    p.add_argument("--rates", help="comma list of packets/s")
    p.add_argument("--buffers", help="comma list of buffer capacities")
    p.add_argument("--seeds", type=int, help="number of seeds (0..N-1)")
    p.add_argument("--messages", type=int, help="packets per run")
    p.add_argument("--duration", type=float,
                   help="seconds of traffic; per-run packets = round(rate x s)")
    p.add_argument("--sink", type=int, help="sink node id (default 1)")
    p.add_argument("--out", help="output directory (default results)")
    p.add_argument("--jobs", type=int,
                   help=f"parallel workers (default ${JOBS_ENV} or CPU count)")
    p.add_argument("--config", help="settings file, key = value per line")
    p.add_argument("--dry-run", action="store_true",
                   help="print the grid size and exit")
    p.add_argument("--dump-schedule", metavar="POSTURE",
                   help="print pruned graph, paths and slot map, then exit")
    return p


class ExperimentSpec:
    def __init__(self, args: argparse.Namespace):
        file_settings = read_config_file(args.config) if args.config else {}

        def pick(name):
            # Flag wins over config file; file values are strings.
            flag = getattr(args, name, None)
            return flag if flag is not None else file_settings.get(name)

        raw = {name: pick(name) for name in
               ("table", "postures", "strategies", "rates", "buffers",
                "seeds", "messages", "duration", "sink", "out", "jobs")}
        self.table = raw["table"] or default_table_path()
        self.postures = (_parse_list(raw["postures"], str)
                         if raw["postures"] else None)
        self.strategies = (_parse_list(raw["strategies"], str)
                           if raw["strategies"] else list(STRATEGIES))
        self.rates = (_parse_list(str(raw["rates"]), _parse_rate)
                      if raw["rates"] else list(DEFAULT_RATES))
        self.buffers = (_parse_list(str(raw["buffers"]), int)
                        if raw["buffers"] else list(DEFAULT_BUFFERS))
        self.seeds = int(raw["seeds"]) if raw["seeds"] is not None else DEFAULT_SEEDS
        self.messages = (int(raw["messages"]) if raw["messages"] is not None
                         else DEFAULT_MESSAGES)
        self.duration = float(raw["duration"]) if raw["duration"] is not None else None
        self.sink = int(raw["sink"]) if raw["sink"] is not None else 1
        self.out = Path(raw["out"] or "results")
        jobs = raw["jobs"]
        if jobs is None:
            jobs = int(os.environ.get(JOBS_ENV, 0)) or os.cpu_count() or 1
        self.jobs = max(1, int(jobs))
        self.validate()

    def validate(self) -> None:
        for s in self.strategies:
            if s not in STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if self.messages < 1 and self.duration is None:
            raise ValueError("messages must be >= 1")
        if self.duration is not None and self.duration <= 0:
            raise ValueError("duration must be positive")
        if not self.rates or not self.buffers:
            raise ValueError("rates and buffers must be nonempty")

    def messages_for(self, rate: float) -> int:
        if self.duration is None:
            return self.messages
        return max(1, round(rate * self.duration))

    def expand(self, table) -> list[RunConfig]:
        postures = self.postures or list(table.postures)
        configs = []
        for posture, strategy, rate, buf, seed in itertools.product(
                postures, self.strategies, self.rates, self.buffers,
                range(self.seeds)):
            configs.append(RunConfig(
                posture=posture, strategy=strategy, rate_pps=rate,
                messages=self.messages_for(rate), buffer=buf, seed=seed,
                sink=self.sink))
        return configs


def _pool_init(table_path: str) -> None:
    global _worker_table
    _worker_table = load_channel_table(table_path)


def _pool_run(config: RunConfig) -> dict:
    log = simulate(config, _worker_table)
    return run_row(config, compute(log))


def run_experiment(spec: ExperimentSpec) -> tuple[Path, Path]:
    table = load_channel_table(spec.table)
    configs = spec.expand(table)
    if spec.jobs > 1 and len(configs) > 1:
        with multiprocessing.Pool(spec.jobs, initializer=_pool_init,
                                  initargs=(spec.table,)) as pool:
            rows = pool.map(_pool_run, configs, chunksize=8)
    else:
        rows = []
        for config in configs:
            log = simulate(config, table)
            rows.append(run_row(config, compute(log)))
    spec.out.mkdir(parents=True, exist_ok=True)
    runs_path = spec.out / "runs.csv"
    agg_path = spec.out / "aggregated.csv"
    write_runs_csv(rows, runs_path)
    write_agg_csv(aggregate(rows), agg_path)
    return runs_path, agg_path


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.dump_schedule:
            table = load_channel_table(args.table or default_table_path())
            sink = args.sink if args.sink is not None else 1
            print(format_schedule(table, args.dump_schedule, sink))
            return 0
        spec = ExperimentSpec(args)
        table = load_channel_table(spec.table)
        configs = spec.expand(table)
        if args.dry_run:
            postures = spec.postures or list(table.postures)
            print(f"dry run: {len(configs)} runs = "
                  f"{len(postures)} postures x {len(spec.strategies)} strategies x "
                  f"{len(spec.rates)} rates x {len(spec.buffers)} buffers x "
                  f"{spec.seeds} seeds")
            print(f"output: {spec.out}")
            return 0
        runs_path, agg_path = run_experiment(spec)
        print(f"wrote {runs_path} and {agg_path} ({len(configs)} runs)")
        return 0
    except (ChannelTableError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
