"""On-body radio channel model.

Per posture and node pair, signal attenuation in dB is modelled as a Normal
random variable (mean, std). A frame is decodable when the sampled attenuation
stays within the link budget headroom (tx power minus receiver sensitivity).
Tables are loaded from a small line-oriented text format.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

NODE_COUNT = 7
NODE_IDS = tuple(range(NODE_COUNT))
NODE_NAMES = ("navel", "chest", "head", "upper_arm", "ankle", "thigh", "wrist")
POSTURES = ("walk", "weak", "run", "sit", "wear", "sleep", "lie")


class ChannelTableError(ValueError):
    """Raised for malformed channel table files, with file/line location."""


@dataclass(frozen=True)
class LinkStats:
    """Normal attenuation parameters for one unordered node pair, in dB."""
    mean_db: float
    std_db: float

    def __post_init__(self) -> None:
        if self.std_db < 0:
            raise ValueError(f"negative std_db: {self.std_db}")


@dataclass(frozen=True)
class LinkBudget:
    """Radio link budget; headroom is the max attenuation a frame survives."""
    tx_power_dbm: float = -55.0
    sensitivity_dbm: float = -100.0

    @property
    def threshold_db(self) -> float:
        return self.tx_power_dbm - self.sensitivity_dbm

    def __post_init__(self) -> None:
        if self.tx_power_dbm <= self.sensitivity_dbm:
            raise ValueError(
                f"tx power {self.tx_power_dbm} dBm must exceed sensitivity "
                f"{self.sensitivity_dbm} dBm")


DEFAULT_BUDGET = LinkBudget()


def link_success_probability(stats: LinkStats, threshold_db: float) -> float:
    """P[attenuation < threshold] under the link's Normal model.

    std = 0 degenerates to a step: 1 if mean < threshold else 0.
    """
    if stats.std_db == 0.0:
        return 1.0 if stats.mean_db < threshold_db else 0.0
    z = (threshold_db - stats.mean_db) / stats.std_db
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


def sample_attenuation(stats: LinkStats, rng: random.Random) -> float:
    """Draw one attenuation value in dB."""
    if stats.std_db == 0.0:
        return stats.mean_db
    return rng.gauss(stats.mean_db, stats.std_db)


def frame_receivable(attenuation_db: float, budget: LinkBudget = DEFAULT_BUDGET) -> bool:
    """True when the received power clears sensitivity (boundary inclusive)."""
    return attenuation_db <= budget.threshold_db


class ChannelTable:
    """Complete symmetric per-posture link statistics for the 7-node body."""

    def __init__(self, entries: dict[str, dict[tuple[int, int], LinkStats]]):
        for posture, pairs in entries.items():
            missing = [(i, j) for i in NODE_IDS for j in NODE_IDS
                       if i < j and (i, j) not in pairs]
            if missing:
                raise ChannelTableError(
                    f"posture {posture!r}: missing pair {missing[0]}")
        self._entries = entries

    @property
    def postures(self) -> tuple[str, ...]:
        return tuple(self._entries)

    def stats(self, posture: str, i: int, j: int) -> LinkStats:
        if i == j:
            raise ValueError(f"no self link: node {i}")
        pairs = self._entries.get(posture)
        if pairs is None:
            raise ChannelTableError(f"posture {posture!r} not in table")
        return pairs[(min(i, j), max(i, j))]

    def matrices(self, posture: str) -> tuple[list[list[float]], list[list[float]]]:
        """(mean, std) 7x7 matrices for fast per-run lookup; diagonal is inf/0."""
        mean = [[math.inf] * NODE_COUNT for _ in NODE_IDS]
        std = [[0.0] * NODE_COUNT for _ in NODE_IDS]
        for i in NODE_IDS:
            for j in NODE_IDS:
                if i == j:
                    continue
                s = self.stats(posture, i, j)
                mean[i][j] = s.mean_db
                std[i][j] = s.std_db
        return mean, std


def load_channel_table(path: str) -> ChannelTable:
    """Parse a table file.

    Line format: ``posture node_i node_j mean_db std_db``. '#' starts a
    comment, blank lines are skipped. Exactly one record per unordered pair,
    written with the lower node id first. Every posture present must be
    complete (all 21 pairs).
    """
    entries: dict[str, dict[tuple[int, int], LinkStats]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            where = f"{path}:{lineno}"
            fields = line.split()
            if len(fields) != 5:
                raise ChannelTableError(
                    f"{where}: expected 5 fields, got {len(fields)}")
            posture = fields[0]
            if posture not in POSTURES:
                raise ChannelTableError(f"{where}: unknown posture {posture!r}")
            try:
                i, j = int(fields[1]), int(fields[2])
                mean_db, std_db = float(fields[3]), float(fields[4])
            except ValueError as exc:
                raise ChannelTableError(f"{where}: {exc}") from None
            if i not in NODE_IDS or j not in NODE_IDS:
                raise ChannelTableError(f"{where}: node ids must be 0..6")
            if i == j:
                raise ChannelTableError(f"{where}: self link {i}-{j}")
            if i > j:
                raise ChannelTableError(
                    f"{where}: pair ({i},{j}) must be written ({j},{i}); "
                    "one canonical record per pair")
            if std_db < 0:
                raise ChannelTableError(f"{where}: negative std {std_db}")
            pairs = entries.setdefault(posture, {})
            if (i, j) in pairs:
                raise ChannelTableError(
                    f"{where}: duplicate record for posture {posture!r} "
                    f"pair ({i},{j})")
            pairs[(i, j)] = LinkStats(mean_db, std_db)
    if not entries:
        raise ChannelTableError(f"{path}: empty table")
    return ChannelTable(entries)
