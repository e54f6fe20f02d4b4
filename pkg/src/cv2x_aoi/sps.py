"""Mode 4 semi-persistent scheduling: RC lifecycle and resource selection.

Reference implementation of the per-vehicle SPS state machine; the engine
kernel mirrors it over flat arrays.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Resource:
    subframe_offset: int  # 0..Gamma-1 within the selection window
    subchannel: int       # 0..num_subchannels-1


@dataclass
class SpsState:
    rc: int
    reserved: Resource
    next_tx_slot: int


def init_rc(rri: int, rng) -> int:
    """Reselection counter: 500/RRI + rand(1000/RRI) uses of the grant."""
    base = 500 // rri
    span = 1000 // rri
    return base + min(int(rng.random() * span), span - 1)


def select_resource(selection_window: int, num_subchannels: int, rng) -> Resource:
    """Uniform draw over all Gamma x num_subchannels candidates (no sensing)."""
    csr = selection_window * num_subchannels
    assert csr > 0, "empty candidate set"
    idx = min(int(rng.random() * csr), csr - 1)
    return Resource(idx // num_subchannels, idx % num_subchannels)


def first_tx_slot(offset: int, after_slot: int, rri: int) -> int:
    """First slot strictly after ``after_slot`` congruent to the offset."""
    return after_slot + 1 + (offset - (after_slot + 1)) % rri


def on_transmit_opportunity(state: SpsState, slot: int, queues_nonempty: bool,
                            rng, p_rk: float, rri: int, num_subchannels: int,
                            decrement_on_silence: bool = False) -> bool:
    """Advance the SPS state at ``slot``; True iff a transmission happens now.

    A grant slot with an empty queue does not burn the grant by default
    (the reservation stays warm); set ``decrement_on_silence`` to consume
    RC regardless. When RC reaches zero the vehicle reselects a new
    resource with probability p_rk and re-initializes RC either way.
    """
    if slot != state.next_tx_slot:
        return False
    if not queues_nonempty and not decrement_on_silence:
        state.next_tx_slot += rri
        return False
    state.rc -= 1
    state.next_tx_slot += rri
    if state.rc == 0:
        if rng.random() < p_rk:
            state.reserved = select_resource(rri, num_subchannels, rng)
            state.next_tx_slot = first_tx_slot(state.reserved.subframe_offset, slot, rri)
        state.rc = init_rc(rri, rng)
    return queues_nonempty
