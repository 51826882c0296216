"""Per-run evaluation quantities.

Four families: coverage (percentage of non-sink nodes reached, averaged over
packets), de-sequencing (first receptions arriving out of send order), end to
end delay (first reception minus application arrival; missing deliveries get
the run horizon as penalty in the penalized series and are excluded from the
clean one), and energy proxied by transmission/reception counts.
"""
from __future__ import annotations

from dataclasses import dataclass

from .channel import NODE_COUNT, NODE_IDS
from .engine import RunLog


@dataclass(frozen=True)
class RunMetrics:
    coverage_pct: float
    deseq_pct: float
    delay_mean_ms: float
    delay_penalized_ms: float
    delay_node_ms: tuple[float, ...]    # clean per-node mean, 0 where empty
    tx_total: int
    rx_total: int
    txrx_node: tuple[int, ...]
    collisions: int
    drops: int

    def __post_init__(self):
        if not 0.0 <= self.coverage_pct <= 100.0:
            raise ValueError(f"coverage out of range: {self.coverage_pct}")
        if not 0.0 <= self.deseq_pct <= 100.0:
            raise ValueError(f"deseq out of range: {self.deseq_pct}")


def _deseq_node_pct(log: list[tuple[int, int]]) -> float:
    """Fraction of first receptions whose seq undercuts an earlier one."""
    if len(log) < 2:
        return 0.0
    max_seen = -1
    ooo = 0
    for seq, _t in log:
        if seq < max_seen:
            ooo += 1
        elif seq > max_seen:
            max_seen = seq
    return ooo / len(log) * 100.0


def compute(log: RunLog) -> RunMetrics:
    n = log.config.messages
    if n == 0:
        raise ValueError("metrics are undefined for a run with no messages")
    sink = log.sink
    receivers = [i for i in NODE_IDS if i != sink]
    arrivals = log.app_arrival_us

    covered = 0
    for node in receivers:
        covered += len({seq for seq, _t in log.reception_logs[node]})
    coverage = covered / (6 * n) * 100.0

    if n == 1:
        deseq = 0.0
    else:
        deseq = sum(_deseq_node_pct(log.reception_logs[node])
                    for node in receivers) / len(receivers)

    clean: list[int] = []
    node_clean: list[list[int]] = [[] for _ in range(NODE_COUNT)]
    penalized_sum = 0
    for node in receivers:
        got = set()
        for seq, t in log.reception_logs[node]:
            d = t - arrivals[seq]
            clean.append(d)
            node_clean[node].append(d)
            penalized_sum += d
            got.add(seq)
        penalized_sum += log.horizon_us * (n - len(got))
    delay_mean_ms = (sum(clean) / len(clean) / 1000.0) if clean else 0.0
    delay_penalized_ms = penalized_sum / (6 * n) / 1000.0
    delay_node_ms = tuple(
        (sum(v) / len(v) / 1000.0) if v else 0.0 for v in node_clean)

    return RunMetrics(
        coverage_pct=coverage,
        deseq_pct=deseq,
        delay_mean_ms=delay_mean_ms,
        delay_penalized_ms=delay_penalized_ms,
        delay_node_ms=delay_node_ms,
        tx_total=sum(log.tx_counts),
        rx_total=sum(log.rx_counts),
        txrx_node=tuple(log.tx_counts[i] + log.rx_counts[i] for i in NODE_IDS),
        collisions=log.collisions,
        drops=log.drops,
    )
