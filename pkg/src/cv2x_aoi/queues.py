"""Multi-priority transmit queues: arrivals, strict-priority service, aging.

This is the reference (per-object) implementation of the queue semantics.
The engine kernel keeps the same state in flat arrays; the trace-replay
tests hold the two implementations in exact agreement.

Packets record their birth slot; the in-queue age phi of a packet at slot t
is t - birth_slot, which is the closed form of the per-slot +1 recursion.
"""

from __future__ import annotations

from dataclasses import dataclass
from .config import MessageType

#: retransmission scheduling per type: (period T_n, extra copies K_n - 1)
RETRANSMITTED_TYPES = (MessageType.HPD, MessageType.DENM)


@dataclass
class Packet:
    msg_type: MessageType
    birth_slot: int
    retrans_remaining: int = 0  # copies still to be scheduled after this one

    def age(self, slot: int) -> int:
        return slot - self.birth_slot


def arrival_probability(lam: float) -> float:
    """Per-slot Bernoulli probability of one triggered arrival: lambda*e^-lambda."""
    import math

    return lam * math.exp(-lam)


def generate_arrivals(rng, slot: int, cfg, cam_phase: int = 0) -> list[Packet]:
    """Fresh packets for one vehicle at one slot.

    HPD/DENM/MHD arrive Bernoulli(lambda*e^-lambda), drawn in type order.
    CAM is periodic at (slot - phase) mod T_c == 0, or Bernoulli(1/T_c)
    when cfg.cam_mode == "bernoulli". Fresh HPD carries K_H - 1 pending
    copies, DENM K_D - 1, CAM and MHD none.
    """
    out = []
    triggered = (
        (MessageType.HPD, cfg.lambda_hpd, cfg.retrans_count_hpd - 1),
        (MessageType.DENM, cfg.lambda_denm, cfg.retrans_count_denm - 1),
        (MessageType.MHD, cfg.lambda_mhd, 0),
    )
    for msg_type, lam, copies in triggered:
        if rng.random() < arrival_probability(lam):
            out.append(Packet(msg_type, slot, copies))
    if cfg.cam_mode == "bernoulli":
        if rng.random() < 1.0 / cfg.cam_period:
            out.append(Packet(MessageType.CAM, slot, 0))
    elif (slot - cam_phase) % cfg.cam_period == 0:
        out.append(Packet(MessageType.CAM, slot, 0))
    return out


class PriorityQueueSet:
    """Four FIFO queues with strict priority, or one shared FIFO.

    In "priority" discipline each message type has its own queue of
    capacity L. In "single" discipline all types share one FIFO with
    capacity 4L (same total buffer).
    """

    def __init__(self, capacity: int, discipline: str = "priority",
                 retrans_periods: dict | None = None,
                 retrans_birth: str = "reset"):
        self.capacity = capacity
        self.discipline = discipline
        if retrans_birth not in ("reset", "inherit"):
            raise ValueError(f"unknown retrans_birth {retrans_birth!r}")
        self.retrans_birth = retrans_birth
        if discipline == "priority":
            self.queues = {t: [] for t in MessageType}
        elif discipline == "single":
            self.queues = {None: []}
        else:
            raise ValueError(f"unknown discipline {discipline!r}")
        self.retrans_periods = retrans_periods or {}
        self.pending: list[tuple[int, Packet]] = []  # (due_slot, copy)
        self.drops = 0

    def _queue_of(self, msg_type):
        return self.queues[msg_type if self.discipline == "priority" else None]

    def _cap_of(self, msg_type) -> int:
        if self.discipline == "priority":
            return self.capacity
        return self.capacity * len(MessageType)

    def length(self, msg_type) -> int:
        if self.discipline == "priority":
            return len(self.queues[msg_type])
        return sum(1 for p in self.queues[None] if p.msg_type == msg_type)

    def total_length(self) -> int:
        return sum(len(q) for q in self.queues.values())

    def enqueue(self, pkt: Packet) -> bool:
        """Append at the tail; full queue drops the packet (returns False)."""
        queue = self._queue_of(pkt.msg_type)
        if len(queue) >= self._cap_of(pkt.msg_type):
            self.drops += 1
            return False
        queue.append(pkt)
        return True

    def select_action(self) -> dict:
        """s_n = 1 for the highest-priority nonempty queue, else all zero."""
        action = {t: 0 for t in MessageType}
        if self.discipline == "single":
            queue = self.queues[None]
            if queue:
                action[queue[0].msg_type] = 1
            return action
        for msg_type in MessageType:  # enum order is the priority order
            if self.queues[msg_type]:
                action[msg_type] = 1
                break
        return action

    def age_and_dequeue(self, action: dict, slot: int) -> Packet | None:
        """Serve the selected queue's head; schedule its retransmission copy.

        Departure is unconditional on decode success (broadcast, no
        feedback). Packets in unserved queues simply age in place, which
        the birth-slot representation captures with no state change.
        """
        selected = [t for t, s in action.items() if s]
        if not selected:
            return None
        assert len(selected) == 1, "at most one queue may transmit per slot"
        msg_type = selected[0]
        queue = self._queue_of(msg_type)
        assert queue and queue[0].msg_type == msg_type, "action selected an empty queue"
        departed = queue.pop(0)
        if departed.retrans_remaining > 0:
            period = self.retrans_periods.get(departed.msg_type)
            if period:
                # the copy's in-queue age restarts at re-arrival unless it is
                # configured to carry the original observation age
                birth = (departed.birth_slot if self.retrans_birth == "inherit"
                         else slot + period)
                copy = Packet(departed.msg_type, birth,
                              departed.retrans_remaining - 1)
                self.pending.append((slot + period, copy))
        return departed

    def release_due(self, slot: int) -> list[Packet]:
        """Pending retransmission copies whose re-arrival slot is now."""
        due = [pkt for due_slot, pkt in self.pending if due_slot == slot]
        self.pending = [(d, p) for d, p in self.pending if d != slot]
        return due

    def ages(self, slot: int) -> list[int]:
        return [p.age(slot) for q in self.queues.values() for p in q]

    def ages_by_type(self, slot: int) -> dict:
        out = {t: [] for t in MessageType}
        for queue in self.queues.values():
            for pkt in queue:
                out[pkt.msg_type].append(pkt.age(slot))
        return out
