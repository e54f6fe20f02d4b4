"""Closed-form non-collision probability for cross-checking the scheduler.

The expression treats resource selection as uniform over the CSR candidates
and is compared against the Monte Carlo per-transmission non-collision
frequency measured by the engine.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AnalyticParams:
    pi: float            # P(vehicle is at a new-resource selection instant)
    p_rk: float          # P(new selection at RC = 0)
    csr: int             # candidate resources in the selection window
    num_vehicles: int
    selection_window: int  # Gamma, slots


def p_no_collision(params: AnalyticParams) -> float:
    """Evaluate
    [1 - (1 - prod_{i=0}^{Gamma-1}(1 - pi/(1 - pi*i))) * (1-P_rk)/(CSR-Nv+1)]^(Nv-1).

    Raises ValueError outside the expression's domain (each product factor
    must stay in [0, 1] and CSR - Nv + 1 must be positive).
    """
    pi = params.pi
    if not 0.0 <= pi <= 1.0 or not 0.0 <= params.p_rk <= 1.0:
        raise ValueError("pi and p_rk must be probabilities")
    denom = params.csr - params.num_vehicles + 1
    if denom <= 0:
        raise ValueError(f"CSR - Nv + 1 = {denom} must be positive")
    prod = 1.0
    for i in range(params.selection_window):
        scale = 1.0 - pi * i
        if scale <= 0.0:
            raise ValueError("pi * (Gamma - 1) must stay below 1")
        factor = 1.0 - pi / scale
        if -1e-12 < factor < 0.0:
            factor = 0.0  # pi/scale == 1 up to rounding
        if not 0.0 <= factor <= 1.0:
            raise ValueError(f"product factor {factor} left [0, 1]")
        prod *= factor
    per_vehicle = (1.0 - prod) * (1.0 - params.p_rk) / denom
    base = 1.0 - per_vehicle
    if not 0.0 <= base <= 1.0:
        raise ValueError(f"bracket {base} left [0, 1]")
    return base ** (params.num_vehicles - 1)


def estimate_pi(new_selection_events: int, num_vehicles: int, num_slots: int) -> float:
    """Empirical fraction of vehicle-slots at which a vehicle (with a
    nonempty queue and RC = 0) scheduled a new resource."""
    total = num_vehicles * num_slots
    if total <= 0:
        raise ValueError("telemetry covers zero vehicle-slots")
    return new_selection_events / total
