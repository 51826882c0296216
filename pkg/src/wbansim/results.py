"""Result rows and CSV output.

One row per run in a fixed column order, plus an aggregated file with
mean/standard deviation over seeds for each (posture, strategy, rate,
buffer) cell. Formatting is pinned so identical sweeps produce
byte-identical files.
"""
from __future__ import annotations

import csv
import os
import statistics
from pathlib import Path

from .channel import NODE_IDS
from .engine import RunConfig
from .metrics import RunMetrics

BASE_COLUMNS = ("posture", "strategy", "rate_pps", "buffer", "seed",
                "coverage_pct", "deseq_pct", "delay_mean_ms",
                "delay_penalized_ms", "tx_total", "rx_total", "collisions",
                "drops")
NODE_COLUMNS = tuple(f"delay_n{i}_ms" for i in NODE_IDS) + \
    tuple(f"txrx_n{i}" for i in NODE_IDS)
RUN_COLUMNS = BASE_COLUMNS + NODE_COLUMNS

METRIC_COLUMNS = RUN_COLUMNS[5:]        # everything after the run key
KEY_COLUMNS = ("posture", "strategy", "rate_pps", "buffer")

AGG_COLUMNS = KEY_COLUMNS + ("seeds",) + tuple(
    f"{name}_{suffix}" for name in METRIC_COLUMNS for suffix in ("mean", "sd"))


def fmt_value(v) -> str:
    if isinstance(v, bool):
        raise TypeError("no boolean columns")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def fmt_rate(rate: float) -> str:
    return format(rate, "g")


def run_row(config: RunConfig, metrics: RunMetrics) -> dict:
    row = {
        "posture": config.posture,
        "strategy": config.strategy,
        "rate_pps": fmt_rate(config.rate_pps),
        "buffer": config.buffer,
        "seed": config.seed,
        "coverage_pct": metrics.coverage_pct,
        "deseq_pct": metrics.deseq_pct,
        "delay_mean_ms": metrics.delay_mean_ms,
        "delay_penalized_ms": metrics.delay_penalized_ms,
        "tx_total": metrics.tx_total,
        "rx_total": metrics.rx_total,
        "collisions": metrics.collisions,
        "drops": metrics.drops,
    }
    for i in NODE_IDS:
        row[f"delay_n{i}_ms"] = metrics.delay_node_ms[i]
        row[f"txrx_n{i}"] = metrics.txrx_node[i]
    return row


def sort_key(row: dict):
    return (row["posture"], row["strategy"], float(row["rate_pps"]),
            int(row["buffer"]), int(row["seed"]))


def _write_atomic(path: Path, header, rows_of_values) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for values in rows_of_values:
            writer.writerow(values)
    os.replace(tmp, path)


def write_runs_csv(rows: list[dict], path) -> None:
    rows = sorted(rows, key=sort_key)
    _write_atomic(Path(path), RUN_COLUMNS,
                  ([fmt_value(row[c]) for c in RUN_COLUMNS] for row in rows))


def aggregate(rows: list[dict]) -> list[dict]:
    """Mean and population sigma over seeds for each sweep cell."""
    cells: dict[tuple, list[dict]] = {}
    for row in rows:
        key = (row["posture"], row["strategy"], row["rate_pps"],
               int(row["buffer"]))
        cells.setdefault(key, []).append(row)
    out = []
    for key in sorted(cells, key=lambda k: (k[0], k[1], float(k[2]), k[3])):
        group = cells[key]
        agg = dict(zip(KEY_COLUMNS, key))
        agg["seeds"] = len(group)
        for name in METRIC_COLUMNS:
            values = [float(row[name]) for row in group]
            agg[f"{name}_mean"] = statistics.fmean(values)
            agg[f"{name}_sd"] = statistics.pstdev(values)
        out.append(agg)
    return out


def write_agg_csv(agg_rows: list[dict], path) -> None:
    _write_atomic(Path(path), AGG_COLUMNS,
                  ([fmt_value(row[c]) for c in AGG_COLUMNS]
                   for row in agg_rows))
