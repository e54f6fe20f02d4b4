import math

import pytest
from hypothesis import given, settings, strategies as st

from cv2x_aoi.config import MessageType
from cv2x_aoi.queues import Packet, PriorityQueueSet, arrival_probability

RETRANS = {MessageType.HPD: 100, MessageType.DENM: 500}


def test_arrival_probability():
    assert arrival_probability(0.0) == 0.0
    assert arrival_probability(1e-4) == pytest.approx(1e-4 * math.exp(-1e-4))
    assert arrival_probability(1.0) == pytest.approx(math.exp(-1.0))


def test_fifo_order_and_capacity():
    qs = PriorityQueueSet(capacity=2)
    assert qs.enqueue(Packet(MessageType.CAM, 3))
    assert qs.enqueue(Packet(MessageType.CAM, 5))
    assert not qs.enqueue(Packet(MessageType.CAM, 7))  # full -> dropped
    assert qs.drops == 1
    assert [p.birth_slot for p in qs.queues[MessageType.CAM]] == [3, 5]


def test_single_discipline_shares_one_buffer():
    qs = PriorityQueueSet(capacity=2, discipline="single")
    for k in range(8):  # cap is 4 * L = 8
        assert qs.enqueue(Packet(MessageType.MHD, k))
    assert not qs.enqueue(Packet(MessageType.HPD, 9))
    assert qs.drops == 1
    assert qs.total_length() == 8
    # service is plain FIFO: the head's type wins regardless of priority
    action = qs.select_action()
    assert action[MessageType.MHD] == 1


def test_select_action_priority():
    qs = PriorityQueueSet(capacity=5)
    assert all(v == 0 for v in qs.select_action().values())
    qs.enqueue(Packet(MessageType.MHD, 0))
    qs.enqueue(Packet(MessageType.DENM, 0))
    action = qs.select_action()
    assert action[MessageType.DENM] == 1
    assert sum(action.values()) == 1
    qs.enqueue(Packet(MessageType.HPD, 1))
    assert qs.select_action()[MessageType.HPD] == 1


def test_ages_closed_form():
    qs = PriorityQueueSet(capacity=5)
    for birth in (0, 2, 4):
        qs.enqueue(Packet(MessageType.CAM, birth))
    assert sorted(qs.ages(5)) == [1, 3, 5]
    # pure aging: one slot later every queued packet is one slot older
    assert sorted(qs.ages(6)) == [2, 4, 6]


def test_dequeue_returns_head_and_shifts():
    qs = PriorityQueueSet(capacity=5)
    for birth in (1, 2, 3):
        qs.enqueue(Packet(MessageType.CAM, birth))
    departed = qs.age_and_dequeue(qs.select_action(), slot=10)
    assert departed.birth_slot == 1
    assert [p.birth_slot for p in qs.queues[MessageType.CAM]] == [2, 3]
    assert qs.age_and_dequeue({t: 0 for t in MessageType}, slot=11) is None


def test_retransmission_copy_scheduling_reset():
    qs = PriorityQueueSet(capacity=5, retrans_periods=RETRANS)
    qs.enqueue(Packet(MessageType.HPD, 40, retrans_remaining=7))
    departed = qs.age_and_dequeue(qs.select_action(), slot=50)
    assert departed.retrans_remaining == 7
    assert qs.release_due(149) == []
    (copy,) = qs.release_due(150)
    assert copy.msg_type == MessageType.HPD
    assert copy.retrans_remaining == 6
    assert copy.birth_slot == 150  # age restarts at re-arrival
    assert qs.pending == []


def test_retransmission_copy_scheduling_inherit():
    qs = PriorityQueueSet(capacity=5, retrans_periods=RETRANS,
                          retrans_birth="inherit")
    qs.enqueue(Packet(MessageType.DENM, 40, retrans_remaining=1))
    qs.age_and_dequeue(qs.select_action(), slot=50)
    (copy,) = qs.release_due(550)
    assert copy.birth_slot == 40  # carries the original observation age
    assert copy.retrans_remaining == 0


def test_last_copy_not_rescheduled():
    qs = PriorityQueueSet(capacity=5, retrans_periods=RETRANS)
    qs.enqueue(Packet(MessageType.HPD, 0, retrans_remaining=0))
    qs.age_and_dequeue(qs.select_action(), slot=5)
    assert qs.pending == []


def test_saturation_reaches_capacity():
    # one arrival per slot, service every 20 slots: the queue pins at L
    qs = PriorityQueueSet(capacity=5)
    for slot in range(200):
        qs.enqueue(Packet(MessageType.CAM, slot))
        if slot % 20 == 0:
            qs.age_and_dequeue(qs.select_action(), slot)
    assert qs.length(MessageType.CAM) == 5


@settings(max_examples=200)
@given(st.lists(st.tuples(st.sampled_from(list(MessageType)),
                          st.booleans()), max_size=60))
def test_packet_conservation(ops):
    qs = PriorityQueueSet(capacity=3)
    enqueued = dequeued = 0
    for slot, (msg_type, do_dequeue) in enumerate(ops):
        if do_dequeue:
            if qs.age_and_dequeue(qs.select_action(), slot) is not None:
                dequeued += 1
        else:
            if qs.enqueue(Packet(msg_type, slot)):
                enqueued += 1
        for t in MessageType:
            assert 0 <= qs.length(t) <= 3
    assert qs.total_length() == enqueued - dequeued
