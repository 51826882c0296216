"""Discrete-event simulation core.

Virtual time is integer microseconds. A single heapq-backed event queue drives
radio activity; ties resolve by (time, priority, insertion order), so a run is
a pure function of (config, channel table, seed).

Physical model per transmission: the attenuation toward each other node is
drawn once at transmission start. A frame is delivered to a node iff the node
stayed in RX for the whole airtime, the drawn attenuation clears the link
budget, and no other receivable transmission overlapped at that node
(destructive overlap, no capture). Carrier sense uses mean attenuation only.
"""
from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field

from .channel import (ChannelTable, DEFAULT_BUDGET, LinkBudget, NODE_COUNT,
                      NODE_IDS)
from .topology import SenderSchedule, build_schedule

INF = float("inf")

STRATEGIES = ("flooding", "plain", "pruned", "probabilistic", "mbp",
              "optflood", "clpb")
FLAT_STRATEGIES = STRATEGIES[:-1]

# Radio modes.
RX, TX, SLEEP = 0, 1, 2

# Event kinds.
EV_TX_END = 0
EV_APP = 1
EV_MAC = 2
EV_MBP_TIMER = 3
EV_CLPB_CYCLE = 4
EV_CLPB_SLOT = 5
EV_CLPB_CHECK = 6

# Same-microsecond ordering: deliveries first, then radio wake/slot handling,
# then new transmissions and timers, then idle-listen checks.
PRIO_TX_END = 0
PRIO_SLOT = 1
PRIO_APP = 2
PRIO_ACT = 3
PRIO_CHECK = 4


def airtime_us(bits: int, bitrate: int) -> int:
    """Frame airtime in whole microseconds."""
    return bits * 1_000_000 // bitrate


def frames_per_slot(slot_us: int, bitrate: int, bits: int) -> int:
    """How many whole frames fit in one slot."""
    return (slot_us * bitrate) // (bits * 1_000_000)


@dataclass
class RunConfig:
    posture: str
    strategy: str
    rate_pps: float
    messages: int
    buffer: int
    seed: int
    sink: int = 1
    bitrate: int = 1_000_000
    slot_us: int = 5000
    frame_bits: int = 544
    hop_cap: int = 32
    backoff_min_us: int = 320
    backoff_max_us: int = 2560
    retry_limit: int = 4
    mbp_nh: int = 2
    mbp_delay_us: int = 5000
    pruned_k: int = 3
    prob_p0: float = 1.0
    sense_margin_db: float = 0.0
    detect_margin_db: float = 1.0
    horizon_us: int | None = None
    trace: bool = False

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not 0 < self.rate_pps <= 1_000_000:
            raise ValueError(f"rate_pps out of range: {self.rate_pps}")
        if self.messages < 0:
            raise ValueError("messages must be >= 0")
        if self.buffer <= 0:
            raise ValueError("buffer must be positive")
        if self.sink not in NODE_IDS:
            raise ValueError(f"sink must be 0..6, got {self.sink}")
        if self.frame_bits <= 0 or self.bitrate <= 0 or self.slot_us <= 0:
            raise ValueError("frame_bits, bitrate, slot_us must be positive")
        if not 0 <= self.backoff_min_us <= self.backoff_max_us:
            raise ValueError("bad backoff window")
        if not 0.0 <= self.prob_p0 <= 1.0:
            raise ValueError("prob_p0 must be in [0, 1]")

    @property
    def period_us(self) -> int:
        return max(1, round(1_000_000 / self.rate_pps))

    @property
    def airtime_us(self) -> int:
        return airtime_us(self.frame_bits, self.bitrate)


class Frame:
    __slots__ = ("seq", "hops", "bits", "addressee", "header")

    def __init__(self, seq: int, hops: int = 0, bits: int = 544,
                 addressee: int | None = None, header=None):
        self.seq = seq
        self.hops = hops
        self.bits = bits
        self.addressee = addressee
        self.header = header


class Transmission:
    __slots__ = ("node", "frame", "t_start", "t_end", "samples")

    def __init__(self, node: int, frame: Frame, t_start: int, t_end: int,
                 samples: list[float]):
        self.node = node
        self.frame = frame
        self.t_start = t_start
        self.t_end = t_end
        self.samples = samples  # indexed by receiver id; inf at self


class Node:
    __slots__ = ("id", "mode", "rx_since", "tx_until", "tx_count", "rx_count",
                 "seen", "reception_log", "buffer", "mac_busy",
                 "pruned_forwarded", "prob_p", "mbp_pending", "highest_seen",
                 "clpb_pending", "clpb_queued", "done")

    def __init__(self, node_id: int):
        self.id = node_id
        self.mode = RX
        self.rx_since = 0
        self.tx_until = 0
        self.tx_count = 0
        self.rx_count = 0
        self.seen: set[int] = set()
        self.reception_log: list[tuple[int, int]] = []
        self.buffer: list = []          # FIFO of [frame, busy_attempts]
        self.mac_busy = False
        self.pruned_forwarded: set[int] = set()
        self.prob_p = 1.0
        self.mbp_pending: dict[int, Frame] = {}
        self.highest_seen = -1
        self.clpb_pending: list[Frame] = []
        self.clpb_queued: set[int] = set()
        self.done = False


@dataclass
class RunLog:
    """Immutable-by-convention record of one finished run."""
    config: RunConfig
    horizon_us: int
    app_arrival_us: dict[int, int]
    tx_counts: list[int]
    rx_counts: list[int]
    reception_logs: list[list[tuple[int, int]]]
    collisions: int
    drops: int
    schedule: SenderSchedule | None = None
    trace: list[tuple] | None = None

    @property
    def sink(self) -> int:
        return self.config.sink


class Simulation:
    """One run of one strategy over one posture's channel."""

    def __init__(self, config: RunConfig, table: ChannelTable,
                 budget: LinkBudget = DEFAULT_BUDGET):
        self.cfg = config
        self.budget = budget
        self.threshold = budget.threshold_db
        # Carrier sensing reaches further than decoding: energy detection
        # works below the decode threshold, so CCA uses a wider budget.
        self.sense_threshold = budget.threshold_db + config.sense_margin_db
        self.mean, self.std = table.matrices(config.posture)
        self.rng = random.Random(config.seed)
        self.nodes = [Node(i) for i in NODE_IDS]
        for n in self.nodes:
            n.prob_p = config.prob_p0
        self.heap: list = []
        self.counter = 0
        self.now = 0
        self.recent: list[Transmission] = []   # transmissions, pruned lazily
        self.collisions = 0
        self.drops = 0
        self.app_arrival_us: dict[int, int] = {}
        self.trace: list[tuple] | None = [] if config.trace else None
        self.airtime = config.airtime_us
        self.is_clpb = config.strategy == "clpb"
        self.schedule: SenderSchedule | None = None
        if self.is_clpb:
            self.schedule = build_schedule(table, config.posture, config.sink,
                                           budget)
            self.cycle_us = self.schedule.n_senders * config.slot_us
            from .clpb import cycles_interleave_us
            self.interleave_us = cycles_interleave_us(
                config.period_us, config.slot_us, self.cycle_us)
            self.cycle_step = self.cycle_us + self.interleave_us
            self.capacity = frames_per_slot(config.slot_us, config.bitrate,
                                            config.frame_bits)
            self.slot_of = {n: s for s, n in enumerate(self.schedule.senders)}
            self.c0: int | None = None
            self.deadline: int | None = None
            self.sink_sent = 0
            for n in self.nodes:        # radios boot asleep under the TDMA MAC
                n.mode = SLEEP
                n.rx_since = INF

    # -- event queue -------------------------------------------------------

    def push(self, t: int, prio: int, kind: int, a=None, b=None) -> None:
        self.counter += 1
        heapq.heappush(self.heap, (t, prio, self.counter, kind, a, b))

    def run(self) -> RunLog:
        cfg = self.cfg
        for seq in range(cfg.messages):
            self.push(seq * cfg.period_us, PRIO_APP, EV_APP, seq)
        horizon = cfg.horizon_us
        if horizon is None and not self.is_clpb:
            horizon = cfg.messages * cfg.period_us + 2_000_000
        # CLPB horizon depends on the first cycle start; finalized on arrival.
        self.horizon = horizon if horizon is not None else (1 << 62)
        self._horizon_fixed = horizon is not None
        heap = self.heap
        while heap:
            t, prio, _cnt, kind, a, b = heapq.heappop(heap)
            if t > self.horizon:
                break
            self.now = t
            if kind == EV_TX_END:
                self._tx_end(a)
            elif kind == EV_MAC:
                self._mac_attempt(self.nodes[a])
            elif kind == EV_APP:
                self._app_arrival(a)
            elif kind == EV_MBP_TIMER:
                self._mbp_fire(self.nodes[a], b)
            elif kind == EV_CLPB_CYCLE:
                self._clpb_sink_cycle()
            elif kind == EV_CLPB_SLOT:
                self._clpb_slot_tick()
            elif kind == EV_CLPB_CHECK:
                self._clpb_check(a)
        return RunLog(
            config=cfg,
            horizon_us=self.horizon,
            app_arrival_us=self.app_arrival_us,
            tx_counts=[n.tx_count for n in self.nodes],
            rx_counts=[n.rx_count for n in self.nodes],
            reception_logs=[n.reception_log for n in self.nodes],
            collisions=self.collisions,
            drops=self.drops,
            schedule=self.schedule,
            trace=self.trace,
        )

    # -- radio -------------------------------------------------------------

    def begin_tx(self, node: Node, frame: Frame, t: int) -> Transmission:
        # Back-to-back burst frames (t == tx_until) are fine; overlap is not.
        if node.mode == TX and t < node.tx_until:
            raise RuntimeError(f"node {node.id} started TX while in TX")
        node.mode = TX
        node.rx_since = INF
        node.tx_count += 1
        t_end = t + airtime_us(frame.bits, self.cfg.bitrate)
        node.tx_until = max(node.tx_until, t_end)
        gauss = self.rng.gauss
        mean_row = self.mean[node.id]
        std_row = self.std[node.id]
        samples = [0.0] * NODE_COUNT
        for r in NODE_IDS:
            if r == node.id:
                samples[r] = INF
            else:
                sd = std_row[r]
                samples[r] = mean_row[r] if sd == 0.0 else gauss(mean_row[r], sd)
        tr = Transmission(node.id, frame, t, t_end, samples)
        self.recent.append(tr)
        self.push(t_end, PRIO_TX_END, EV_TX_END, tr)
        if self.trace is not None:
            self.trace.append(("tx", t, node.id, frame.seq,
                               frame.header.current_slot if frame.header else None))
        return tr

    def _tx_end(self, tr: Transmission) -> None:
        t = self.now
        threshold = self.threshold
        # Drop transmissions that cannot overlap this frame or any later one.
        self.recent = [g for g in self.recent if g.t_end > tr.t_start]
        recent = self.recent
        for r in NODE_IDS:
            if r == tr.node:
                continue
            node = self.nodes[r]
            if node.mode != RX or node.rx_since > tr.t_start:
                continue
            if tr.samples[r] > threshold:
                continue
            hit = False
            for g in recent:
                if (g is not tr and g.t_start < tr.t_end
                        and g.t_end > tr.t_start and g.samples[r] <= threshold):
                    hit = True
                    break
            if hit:
                self.collisions += 1
                continue
            self._deliver(node, tr)
        sender = self.nodes[tr.node]
        if t >= sender.tx_until:
            if self.is_clpb:
                sender.mode = SLEEP
                sender.rx_since = INF
            else:
                sender.mode = RX
                sender.rx_since = t
                if sender.buffer:
                    self._mac_attempt(sender)
                else:
                    sender.mac_busy = False

    def _deliver(self, node: Node, tr: Transmission) -> None:
        frame = tr.frame
        node.rx_count += 1
        first = frame.seq not in node.seen
        if first:
            node.seen.add(frame.seq)
            node.reception_log.append((frame.seq, self.now))
        if self.trace is not None:
            self.trace.append(("rx", self.now, node.id, frame.seq, tr.node))
        if self.is_clpb:
            self._clpb_on_receive(node, frame, first)
        else:
            self._flat_on_receive(node, frame, first)

    def medium_busy_for(self, node_id: int, t: int) -> bool:
        mean = self.mean
        for g in self.recent:
            if (g.t_start <= t < g.t_end
                    and mean[g.node][node_id] <= self.sense_threshold):
                return True
        return False

    # -- application traffic ----------------------------------------------

    def _app_arrival(self, seq: int) -> None:
        t = self.now
        self.app_arrival_us[seq] = t
        sink = self.nodes[self.cfg.sink]
        frame = Frame(seq, 0, self.cfg.frame_bits)
        if self.is_clpb:
            if len(sink.clpb_pending) >= self.cfg.buffer:
                self.drops += 1
                return
            sink.clpb_pending.append(frame)
            if self.c0 is None:
                slot = self.cfg.slot_us
                self.c0 = (t // slot + 1) * slot
                self.deadline = self.c0 + self.cfg.messages * self.cycle_step
                if not self._horizon_fixed:
                    self.horizon = self.deadline + 10 * self.cycle_step
                self.push(self.c0, PRIO_APP, EV_CLPB_CYCLE)
                self.push(self.c0, PRIO_SLOT, EV_CLPB_SLOT)
        else:
            self._enqueue(sink, frame)

    # -- flat strategies: CSMA MAC ----------------------------------------

    def _enqueue(self, node: Node, frame: Frame) -> None:
        if len(node.buffer) >= self.cfg.buffer:
            self.drops += 1
            return
        node.buffer.append([frame, 0])
        if not node.mac_busy:
            node.mac_busy = True
            self.push(self.now, PRIO_ACT, EV_MAC, node.id)

    def _mac_attempt(self, node: Node) -> None:
        t = self.now
        while True:
            if not node.buffer:
                node.mac_busy = False
                return
            entry = node.buffer[0]
            if not self.medium_busy_for(node.id, t):
                node.buffer.pop(0)
                self.begin_tx(node, entry[0], t)
                return
            if entry[1] >= self.cfg.retry_limit:
                node.buffer.pop(0)      # out of retries, drop and move on
                self.drops += 1
                continue
            entry[1] += 1
            delay = self.rng.randint(self.cfg.backoff_min_us,
                                     self.cfg.backoff_max_us)
            self.push(t + delay, PRIO_ACT, EV_MAC, node.id)
            return

    def _flat_on_receive(self, node: Node, frame: Frame, first: bool) -> None:
        if node.id == self.cfg.sink:
            return                      # the origin never re-forwards
        strategy = self.cfg.strategy
        if strategy == "flooding":
            if frame.hops < self.cfg.hop_cap:
                self._enqueue(node, Frame(frame.seq, frame.hops + 1, frame.bits))
            return
        if strategy == "plain":
            if first and frame.hops < self.cfg.hop_cap:
                self._enqueue(node, Frame(frame.seq, frame.hops + 1, frame.bits))
            return
        if strategy == "pruned":
            if frame.addressee is not None and frame.addressee != node.id:
                return
            if frame.seq in node.pruned_forwarded or frame.hops >= self.cfg.hop_cap:
                return
            node.pruned_forwarded.add(frame.seq)
            others = [i for i in NODE_IDS if i != node.id]
            for tgt in self.rng.sample(others, min(self.cfg.pruned_k, len(others))):
                self._enqueue(node, Frame(frame.seq, frame.hops + 1, frame.bits,
                                          addressee=tgt))
            return
        if strategy == "probabilistic":
            if first and frame.hops < self.cfg.hop_cap:
                if self.rng.random() < node.prob_p:
                    node.prob_p /= 2.0
                    self._enqueue(node, Frame(frame.seq, frame.hops + 1,
                                              frame.bits))
            return
        if strategy == "mbp":
            if not first:
                node.mbp_pending.pop(frame.seq, None)   # implicit ack
                return
            if frame.hops >= self.cfg.hop_cap:
                return
            if frame.hops < self.cfg.mbp_nh:
                self._enqueue(node, Frame(frame.seq, frame.hops + 1, frame.bits))
            else:
                node.mbp_pending[frame.seq] = frame
                self.push(self.now + self.cfg.mbp_delay_us, PRIO_ACT,
                          EV_MBP_TIMER, node.id, frame.seq)
            return
        if strategy == "optflood":
            if first:
                if frame.seq >= node.highest_seen and frame.hops < self.cfg.hop_cap:
                    self._enqueue(node, Frame(frame.seq, frame.hops + 1,
                                              frame.bits))
                node.highest_seen = max(node.highest_seen, frame.seq)
            return
        raise AssertionError(f"unhandled strategy {strategy}")

    def _mbp_fire(self, node: Node, seq: int) -> None:
        frame = node.mbp_pending.pop(seq, None)
        if frame is not None:
            self._enqueue(node, Frame(frame.seq, frame.hops + 1, frame.bits))

    # -- CLPB: TDMA slot scheme -------------------------------------------

    def _cycle_pos(self, t: int) -> tuple[int, int]:
        """(cycle index, offset within cycle step) for a time >= c0."""
        rel = t - self.c0
        return rel // self.cycle_step, rel % self.cycle_step

    def _clpb_header(self, current_slot: int, cycle_index: int):
        from .clpb import ClpbHeader, UNASSIGNED
        ncs = self.c0 + (cycle_index + 1) * self.cycle_step
        assignment = tuple(self.slot_of.get(i, UNASSIGNED) for i in NODE_IDS)
        return ClpbHeader(current_slot=current_slot,
                          n_senders=self.schedule.n_senders,
                          slots_assignment=assignment,
                          messages_number=self.cfg.messages,
                          next_cycle_start=ncs)

    def _clpb_sink_cycle(self) -> None:
        t = self.now
        sink = self.nodes[self.cfg.sink]
        cycle_index, _ = self._cycle_pos(t)
        if sink.clpb_pending:
            header = self._clpb_header(0, cycle_index)
            burst = sink.clpb_pending[:self.capacity]
            del sink.clpb_pending[:self.capacity]
            start = t
            for frame in burst:
                frame.header = header
                self.begin_tx(sink, frame, start)
                start += self.airtime
            self.sink_sent += len(burst)
        if sink.clpb_pending or len(self.app_arrival_us) < self.cfg.messages:
            self.push(t + self.cycle_step, PRIO_APP, EV_CLPB_CYCLE)

    def _clpb_slot_tick(self) -> None:
        t = self.now
        cycle_index, offset = self._cycle_pos(t)
        in_cycle = offset < self.cycle_us
        woken = []
        if in_cycle:
            slot_index = offset // self.cfg.slot_us
            owner = self.schedule.senders[slot_index]
            for node in self.nodes:
                if node.done or node.id == self.cfg.sink:
                    continue
                if node.id == owner and node.clpb_pending:
                    self._clpb_forward(node, slot_index, cycle_index)
                elif node.mode != TX:
                    node.mode = RX
                    node.rx_since = t
                    woken.append(node.id)
            if woken:
                self.push(t + self.cfg.slot_us // 2, PRIO_CHECK, EV_CLPB_CHECK,
                          tuple(woken))
        # Next wake point: next slot inside a cycle, else next cycle start.
        if in_cycle and offset + self.cfg.slot_us < self.cycle_us:
            nxt = t + self.cfg.slot_us
        else:
            nxt = self.c0 + (cycle_index + 1) * self.cycle_step
        if nxt < self.deadline and any(not n.done and n.id != self.cfg.sink
                                       for n in self.nodes):
            self.push(nxt, PRIO_SLOT, EV_CLPB_SLOT)

    def _clpb_forward(self, node: Node, slot_index: int, cycle_index: int) -> None:
        header = self._clpb_header(slot_index, cycle_index)
        burst = node.clpb_pending[:self.capacity]
        del node.clpb_pending[:self.capacity]
        start = self.now
        for frame in burst:
            out = Frame(frame.seq, frame.hops, frame.bits, header=header)
            self.begin_tx(node, out, start)
            start += self.airtime
        self._clpb_maybe_done(node)

    def _clpb_on_receive(self, node: Node, frame: Frame, first: bool) -> None:
        if not first or node.done:
            return
        slot = self.slot_of.get(node.id)
        if slot is not None and frame.seq not in node.clpb_queued:
            if len(node.clpb_pending) >= self.cfg.buffer:
                self.drops += 1
            else:
                node.clpb_queued.add(frame.seq)
                node.clpb_pending.append(frame)
        self._clpb_maybe_done(node)

    def _clpb_maybe_done(self, node: Node) -> None:
        if len(node.seen) >= self.cfg.messages and not node.clpb_pending:
            node.done = True
            if node.mode != TX:
                node.mode = SLEEP
                node.rx_since = INF

    def _clpb_check(self, node_ids: tuple[int, ...]) -> None:
        # Presence is judged like carrier sense (mean attenuation), not by
        # the per-frame fade draw: a faded frame still keeps the radio in RX
        # for the rest of an audible burst.  Energy detection reaches a bit
        # below the decode threshold.
        t = self.now
        threshold = self.threshold + self.cfg.detect_margin_db
        for nid in node_ids:
            node = self.nodes[nid]
            if node.mode != RX or node.done:
                continue
            extend = 0
            for g in self.recent:
                if (g.t_start >= node.rx_since and g.t_start <= t < g.t_end
                        and self.mean[g.node][nid] <= threshold):
                    extend = max(extend, g.t_end)
            if extend:
                self.push(extend, PRIO_CHECK, EV_CLPB_CHECK, (nid,))
            else:
                node.mode = SLEEP
                node.rx_since = INF


def simulate(config: RunConfig, table: ChannelTable,
             budget: LinkBudget = DEFAULT_BUDGET) -> RunLog:
    """Run one simulation to completion and return its log."""
    return Simulation(config, table, budget).run()
