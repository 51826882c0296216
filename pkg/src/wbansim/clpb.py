"""TDMA cycle arithmetic and the forwarded header.

Every frame sent under the slotted scheme carries a small header that lets
any receiver reconstruct the full cycle timing: which slot is active, the
slot assignment, how many messages the run carries, and the absolute start
of the next cycle. From (next_cycle_start, current_slot) a node can derive
the current cycle start and the inter-cycle gap, so one reception is enough
to sleep/wake precisely from then on.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

UNASSIGNED = 0xFF

# seq:u32  current_slot:u8  n_senders:u8  slots:7 bytes  messages:u32  ncs:u64
_TRACE_FMT = ">IBB7sIQ"
TRACE_HEADER_BYTES = struct.calcsize(_TRACE_FMT)


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def cycle_duration_us(n_senders: int, slot_us: int) -> int:
    """One cycle is one slot per sender, sink first."""
    return n_senders * slot_us

def cycles_interleave_us(period_us: int, slot_us: int, cycle_us: int) -> int:
    """Idle gap appended after each cycle.

    Zero when frames arrive faster than cycles complete; otherwise the gap
    that stretches the cycle step to the arrival period rounded up to a
    whole slot.
    """
    if period_us < cycle_us:
        return 0
    return ceil_div(period_us, slot_us) * slot_us - cycle_us


def end_of_cycles_us(first_cycle_start_us: int, messages: int,
                     cycle_us: int) -> int:
    """Nominal end of the schedule: one cycle per message."""
    return first_cycle_start_us + messages * cycle_us


@dataclass(frozen=True)
class ClpbHeader:
    current_slot: int
    n_senders: int
    slots_assignment: tuple[int, ...]   # per node id, UNASSIGNED for non-senders
    messages_number: int
    next_cycle_start: int

    def __post_init__(self):
        if len(self.slots_assignment) != 7:
            raise ValueError("slots_assignment must cover all 7 nodes")
        if not 0 <= self.current_slot < self.n_senders:
            raise ValueError(f"current_slot {self.current_slot} out of range")

    def slot_of(self, node_id: int) -> int | None:
        s = self.slots_assignment[node_id]
        return None if s == UNASSIGNED else s

    def cycle_start(self, t_rx_us: int, slot_us: int) -> int:
        """Start of the cycle this header was sent in.

        t_rx_us is the receiver's (synchronized) clock at reception; slots
        lie on the global slot_us grid, so rounding down locates the sending
        slot and current_slot rewinds to the cycle start.
        """
        slot_start = (t_rx_us // slot_us) * slot_us
        return slot_start - self.current_slot * slot_us

    def derived_interleave(self, t_rx_us: int, slot_us: int) -> int:
        """Inter-cycle gap implied by this header; one reception fixes the
        whole future timetable."""
        return (self.next_cycle_start - self.cycle_start(t_rx_us, slot_us)
                - cycle_duration_us(self.n_senders, slot_us))

    def pack_trace(self, seq: int) -> bytes:
        return struct.pack(_TRACE_FMT, seq, self.current_slot, self.n_senders,
                           bytes(self.slots_assignment), self.messages_number,
                           self.next_cycle_start)


def unpack_trace(blob: bytes) -> tuple[int, ClpbHeader]:
    seq, cur, n, slots, msgs, ncs = struct.unpack(_TRACE_FMT, blob)
    return seq, ClpbHeader(current_slot=cur, n_senders=n,
                           slots_assignment=tuple(slots), messages_number=msgs,
                           next_cycle_start=ncs)
