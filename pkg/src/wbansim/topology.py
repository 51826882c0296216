"""Connectivity preprocessing: pruned graph, best paths, sender slots.

The sink precomputes, per posture: the subgraph of links more likely than not
to deliver (success probability > 0.5), the most reliable path from itself to
every node, and from those paths the set of forwarding nodes with their TDMA
slot order.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .channel import (ChannelTable, DEFAULT_BUDGET, LinkBudget, NODE_COUNT,
                      NODE_IDS, link_success_probability)

PRUNE_THRESHOLD = 0.5


@dataclass(frozen=True)
class PrunedGraph:
    """Undirected graph over nodes 0..6 with per-edge success probability."""
    posture: str
    edges: dict[tuple[int, int], float]  # keys (i, j) with i < j

    def probability(self, i: int, j: int) -> float:
        return self.edges.get((min(i, j), max(i, j)), 0.0)

    def neighbors(self, i: int) -> list[int]:
        out = []
        for (a, b) in self.edges:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)


@dataclass(frozen=True)
class SenderSchedule:
    """Slot assignment: senders[k] owns slot k; slot 0 is the sink."""
    sink: int
    senders: tuple[int, ...]
    paths: dict[int, tuple[int, ...]] = field(compare=False)
    unreachable: frozenset[int] = frozenset()

    @property
    def n_senders(self) -> int:
        return len(self.senders)

    @property
    def relays(self) -> frozenset[int]:
        """Forwarding nodes, sink excluded."""
        return frozenset(self.senders[1:])

    def slot_of(self, node: int) -> int | None:
        try:
            return self.senders.index(node)
        except ValueError:
            return None


def build_pruned_graph(table: ChannelTable, posture: str,
                       budget: LinkBudget = DEFAULT_BUDGET) -> PrunedGraph:
    """Keep links whose success probability strictly exceeds 0.5."""
    edges: dict[tuple[int, int], float] = {}
    for i in NODE_IDS:
        for j in range(i + 1, NODE_COUNT):
            p = link_success_probability(table.stats(posture, i, j),
                                         budget.threshold_db)
            if p > PRUNE_THRESHOLD:
                edges[(i, j)] = p
    return PrunedGraph(posture, edges)


def max_reliability_paths(graph: PrunedGraph, sink: int
                          ) -> tuple[dict[int, tuple[int, ...]], frozenset[int]]:
    """Most reliable path from sink to every reachable node.

    Reliability of a path is the product of edge probabilities; maximised via
    Dijkstra on additive weights -log(p). Ties broken by fewer hops, then by
    lexicographically smallest node sequence. Returns (paths, unreachable);
    paths[sink] = (sink,).
    """
    if sink not in NODE_IDS:
        raise ValueError(f"sink must be 0..6, got {sink}")
    best: dict[int, tuple[float, int, tuple[int, ...]]] = {}
    heap: list[tuple[float, int, tuple[int, ...]]] = [(0.0, 0, (sink,))]
    while heap:
        cost, hops, path = heapq.heappop(heap)
        node = path[-1]
        if node in best:
            continue
        best[node] = (cost, hops, path)
        for nxt in graph.neighbors(node):
            if nxt in best:
                continue
            p = graph.probability(node, nxt)
            heapq.heappush(heap, (cost - math.log(p), hops + 1, path + (nxt,)))
    paths = {node: entry[2] for node, entry in best.items()}
    unreachable = frozenset(n for n in NODE_IDS if n not in paths)
    return paths, unreachable


def path_reliability(graph: PrunedGraph, path: tuple[int, ...]) -> float:
    r = 1.0
    for a, b in zip(path, path[1:]):
        r *= graph.probability(a, b)
    return r


def select_senders(paths: dict[int, tuple[int, ...]], sink: int) -> SenderSchedule:
    """Senders = non-terminal nodes over all paths (sink plus intermediates).

    Slot order: ascending hop distance from the sink along each sender's own
    path, ties by ascending node id. The sink always holds slot 0.
    """
    senders = {sink}
    for path in paths.values():
        senders.update(path[:-1])
    depth = {node: len(paths[node]) - 1 for node in senders}
    ordered = tuple(sorted(senders, key=lambda n: (depth[n], n)))
    if ordered[0] != sink:
        raise AssertionError("sink must sort to slot 0")
    unreachable = frozenset(n for n in NODE_IDS if n not in paths)
    return SenderSchedule(sink=sink, senders=ordered, paths=dict(paths),
                          unreachable=unreachable)


def build_schedule(table: ChannelTable, posture: str, sink: int,
                   budget: LinkBudget = DEFAULT_BUDGET) -> SenderSchedule:
    """Full preprocessing pipeline for one posture."""
    graph = build_pruned_graph(table, posture, budget)
    paths, _ = max_reliability_paths(graph, sink)
    return select_senders(paths, sink)


def format_schedule(table: ChannelTable, posture: str, sink: int,
                    budget: LinkBudget = DEFAULT_BUDGET) -> str:
    """Human-readable schedule block for the CLI's --dump-schedule."""
    graph = build_pruned_graph(table, posture, budget)
    paths, unreachable = max_reliability_paths(graph, sink)
    schedule = select_senders(paths, sink)
    lines = [f"posture {posture}", f"sink {sink}"]
    lines.append("edges:")
    for (i, j), p in sorted(graph.edges.items()):
        lines.append(f"  {i}-{j} p={p:.4f}")
    lines.append("slots:")
    for slot, node in enumerate(schedule.senders):
        tag = " (sink)" if node == sink else ""
        lines.append(f"  slot {slot}: node {node}{tag}")
    lines.append("paths:")
    for node in sorted(paths):
        if node == sink:
            continue
        seq = " -> ".join(str(n) for n in paths[node])
        lines.append(f"  {node}: {seq}  r={path_reliability(graph, paths[node]):.4f}")
    if unreachable:
        lines.append("unreachable: " + " ".join(str(n) for n in sorted(unreachable)))
    else:
        lines.append("unreachable: none")
    return "\n".join(lines)
