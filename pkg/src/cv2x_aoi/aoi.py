"""Age-of-Information bookkeeping: receiver AoI matrix and aggregate metrics."""

from __future__ import annotations

import numpy as np


def update_receiver_aoi(phi: np.ndarray, successes: set, head_ages: dict,
                        transmitters: set | None = None) -> np.ndarray:
    """One slot step of the receiver AoI matrix.

    For (i, j) in ``successes`` the receiver inherits the head packet age:
    phi'[i, j] = head_ages[i] + 1 (inheritance, not a minimum - the entry
    may increase). Every other entry ages by one slot. A transmitting
    vehicle cannot receive (half-duplex); passing ``transmitters`` asserts
    that upstream filtering held.
    """
    out = phi + 1
    for i, j in successes:
        if transmitters is not None:
            assert j not in transmitters, f"half-duplex violation: rx {j} transmitted"
        out[i, j] = head_ages[i] + 1
    return out


def mean_queue_aoi(ages) -> float:
    """Flat mean of in-queue ages over all occupied positions; empty -> 0.

    ``ages`` is any iterable of per-packet ages (already flattened across
    vehicles, types and positions).
    """
    ages = list(ages)
    if not ages:
        return 0.0
    return float(sum(ages)) / len(ages)


def mean_receiver_aoi(phi: np.ndarray) -> float:
    """Mean of the AoI matrix over all Nv*(Nv-1) ordered pairs."""
    n = phi.shape[0]
    if n < 2:
        raise ValueError("receiver AoI needs at least 2 vehicles")
    total = float(phi.sum() - np.trace(phi))
    return total / (n * (n - 1))


def success_rate(successes: int, attempts: int) -> float | None:
    """Fraction of reception attempts that decoded; None when undefined."""
    if attempts <= 0:
        return None
    return successes / attempts
