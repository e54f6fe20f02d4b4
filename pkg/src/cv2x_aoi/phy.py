"""Link-level model: channel gains, decode threshold, OMA and NOMA-SIC SINR.

All functions are pure; the engine kernel mirrors the same arithmetic for
speed, and the tests hold the two in agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

MIN_DISTANCE_M = 1.0  # gains are clamped at the 1 m reference distance


@dataclass(frozen=True)
class ReceivedSignal:
    tx_id: int
    rx_power_w: float
    head_age: int = 0  # in-queue age of the transmitted packet, slots


def sinr_threshold(message_size_bits: float, bandwidth_hz: float, slot_s: float) -> float:
    """Decode threshold 2^(Q/(B*tau)) - 1.

    The Shannon rate over one slot must carry the whole message, so the
    spectral-efficiency exponent is Q/(B*tau) bits/s/Hz.
    """
    if message_size_bits <= 0:
        return 0.0
    exponent = message_size_bits / (bandwidth_hz * slot_s)
    if exponent > 60.0:
        raise ValueError(f"unphysical spectral load {exponent:.1f} bits/s/Hz")
    return 2.0 ** exponent - 1.0


def channel_gain(distance_m: float, path_loss_exponent: float,
                 rng=None, mode: str = "constant") -> float:
    """|h|^2 = c * d^(-eta); c = 1 or a unit-mean exponential fade per draw."""
    d = max(distance_m, MIN_DISTANCE_M)
    gain = d ** (-path_loss_exponent)
    if mode == "random":
        if rng is None:
            raise ValueError("random fading needs an rng")
        gain *= -math.log1p(-rng.random())
    return gain


def sinr_oma(target: ReceivedSignal, interferers: list[ReceivedSignal], noise_w: float) -> float:
    """Every co-channel signal interferes: p / (sum others + sigma^2).

    Interference is accumulated weakest-first so the partial sums match the
    SIC tails bit for bit; with monotone rounding this makes the per-signal
    dominance SINR_noma >= SINR_oma exact in floating point, not just in
    real arithmetic.
    """
    interference = 0.0
    for s in reversed(power_descending(interferers)):
        interference += s.rx_power_w
    return target.rx_power_w / (interference + noise_w)


def power_descending(signals: list[ReceivedSignal]) -> list[ReceivedSignal]:
    """SIC decode order: power descending, ties broken by ascending tx_id."""
    return sorted(signals, key=lambda s: (-s.rx_power_w, s.tx_id))


def sinr_noma_sic(signals: list[ReceivedSignal], noise_w: float) -> dict[int, float]:
    """Idealized SIC: only strictly weaker co-channel signals interfere.

    Signals are ranked by received power (descending, tie by tx_id); the
    k-th signal sees the sum of signals ranked after it as interference,
    accumulated weakest-first. Output is independent of the input ordering.
    """
    ranked = power_descending(signals)
    out = {}
    tail = 0.0
    for sig in reversed(ranked):
        out[sig.tx_id] = sig.rx_power_w / (tail + noise_w)
        tail += sig.rx_power_w
    return out


def decode(sinrs: dict[int, float], threshold: float) -> dict[int, bool]:
    """Success iff SINR >= threshold (boundary inclusive)."""
    return {tx: sinr >= threshold for tx, sinr in sinrs.items()}
