"""Per-strategy forwarding semantics.

Counts on the noiseless full graph are closed-form: with retries effectively
unlimited the CSMA queue drains completely, so every forward rule leaves an
exact transmission total.
"""
import pytest

from wbansim.engine import Frame, RunConfig, Simulation, simulate
from wbansim.metrics import compute

from conftest import make_table

NO_SHED = 10**6     # retry limit high enough that nothing is ever dropped


def run(table, strategy, *, messages=1, seed=0, **kw):
    base = dict(posture="walk", strategy=strategy, rate_pps=1.0,
                messages=messages, buffer=1000, seed=seed,
                retry_limit=NO_SHED)
    base.update(kw)
    return compute(simulate(RunConfig(**base), table))


def sim_for(table, strategy, **kw) -> Simulation:
    base = dict(posture="walk", strategy=strategy, rate_pps=1.0,
                messages=0, buffer=100, seed=0, horizon_us=10_000)
    base.update(kw)
    return Simulation(RunConfig(**base), table)


class TestExactCounts:
    """One packet on the lossless full graph, sink 1 plus six receivers."""

    def test_plain_forwards_once_per_node(self, det_table):
        m = run(det_table, "plain")
        assert m.tx_total == 7          # origin + one relay each
        assert m.rx_total == 42         # every tx heard by the other six
        assert m.coverage_pct == 100.0

    def test_flooding_forwards_every_copy(self, det_table):
        # hop cap 2: 1 origin + 6 first-hop + 6*5 second-hop copies
        m = run(det_table, "flooding", hop_cap=2)
        assert m.tx_total == 37
        assert m.rx_total == 222
        assert m.drops == 0
        assert m.collisions == 0

    def test_pruned_addresses_k_copies_once(self, det_table):
        # each node forwards its first copy to k=3 addressees, then stops
        m = run(det_table, "pruned")
        assert m.tx_total == 19         # 1 + 6*3
        assert m.rx_total == 114
        assert m.coverage_pct == 100.0

    def test_probabilistic_always_relays_at_p0_one(self, det_table):
        m = run(det_table, "probabilistic")
        assert m.tx_total == 7

    def test_probabilistic_never_relays_at_p0_zero(self, det_table):
        m = run(det_table, "probabilistic", messages=2, prob_p0=0.0)
        assert m.tx_total == 2          # origin only, coverage via direct links
        assert m.coverage_pct == 100.0

    def test_optflood_single_packet_acts_like_plain(self, det_table):
        m = run(det_table, "optflood")
        assert m.tx_total == 7
        assert m.rx_total == 42

    def test_mbp_near_hops_forward_immediately(self, det_table):
        # everyone hears the origin at hop 0 < NH: no timer ever armed
        m = run(det_table, "mbp")
        assert m.tx_total == 7


class TestMbpDelayedForwarding:
    def test_line_topology_defers_far_hops(self, line_table):
        # chain 1-2-3-4-5-6 with 0 off the sink; hops >= NH=2 wait 5 ms
        # for an overheard duplicate that never comes, then forward
        m = run(line_table, "mbp", retry_limit=4, buffer=100)
        assert m.tx_total == 7
        assert m.delay_node_ms == (0.544, 0.0, 0.544, 1.088, 1.632,
                                   7.176, 12.72)
        # nodes 0 and 2 are hidden from each other and overlap at the sink
        assert m.collisions == 2
        assert m.coverage_pct == 100.0

    def test_duplicate_cancels_pending_forward(self, det_table):
        sim = sim_for(det_table, "mbp")
        node = sim.nodes[4]
        node.mbp_pending[0] = Frame(0, 2)
        node.seen.add(0)
        sim._flat_on_receive(node, Frame(0, 3), first=False)
        assert 0 not in node.mbp_pending
        sim._mbp_fire(node, 0)          # late timer finds nothing
        assert node.buffer == []

    def test_timer_fires_without_duplicate(self, det_table):
        sim = sim_for(det_table, "mbp")
        node = sim.nodes[4]
        node.mbp_pending[0] = Frame(0, 2)
        sim._mbp_fire(node, 0)
        assert len(node.buffer) == 1
        assert node.buffer[0][0].hops == 3


class TestForwardGates:
    @pytest.mark.parametrize("strategy", ["flooding", "plain",
                                          "probabilistic", "mbp"])
    def test_hop_cap_blocks_forwarding(self, det_table, strategy):
        sim = sim_for(det_table, strategy)
        node = sim.nodes[2]
        sim._flat_on_receive(node, Frame(0, 32), first=True)
        assert node.buffer == []

    def test_sink_never_forwards(self, det_table):
        sim = sim_for(det_table, "flooding")
        sink = sim.nodes[1]
        sim._flat_on_receive(sink, Frame(0, 0), first=True)
        assert sink.buffer == []

    def test_pruned_ignores_copies_addressed_elsewhere(self, det_table):
        sim = sim_for(det_table, "pruned")
        node = sim.nodes[2]
        sim._flat_on_receive(node, Frame(0, 1, addressee=5), first=True)
        assert node.buffer == []
        assert 0 not in node.pruned_forwarded

    def test_pruned_forwards_when_addressed(self, det_table):
        sim = sim_for(det_table, "pruned")
        node = sim.nodes[2]
        sim._flat_on_receive(node, Frame(0, 1, addressee=2), first=True)
        assert len(node.buffer) == 3
        for frame, _tries in node.buffer:
            assert frame.addressee is not None and frame.addressee != 2
            assert frame.hops == 2
        # later copies of the same packet are not forwarded again
        sim._flat_on_receive(node, Frame(0, 1, addressee=2), first=False)
        assert len(node.buffer) == 3

    def test_pruned_k_clamped_to_available_targets(self, det_table):
        sim = sim_for(det_table, "pruned", pruned_k=50)
        node = sim.nodes[2]
        sim._flat_on_receive(node, Frame(0, 1), first=True)
        assert len(node.buffer) == 6

    def test_optflood_drops_out_of_order_packets(self, det_table):
        sim = sim_for(det_table, "optflood")
        node = sim.nodes[2]
        sim._flat_on_receive(node, Frame(5, 1), first=True)
        assert len(node.buffer) == 1 and node.highest_seen == 5
        # an older packet arriving late is not propagated further
        sim._flat_on_receive(node, Frame(3, 1), first=True)
        assert len(node.buffer) == 1 and node.highest_seen == 5
        sim._flat_on_receive(node, Frame(7, 1), first=True)
        assert len(node.buffer) == 2 and node.highest_seen == 7

    def test_probabilistic_halves_after_each_relay(self, det_table):
        sim = sim_for(det_table, "probabilistic")
        node = sim.nodes[2]
        sim.rng.random = lambda: 0.49   # forces the comparison outcome
        for seq in range(3):
            sim._flat_on_receive(node, Frame(seq, 1), first=True)
        # forwarded at p=1.0 and p=0.5, refused at p=0.25
        assert len(node.buffer) == 2
        assert node.prob_p == 0.25
