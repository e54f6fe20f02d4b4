"""Vehicle kinematics on a two-way ring road.

Positions live on [0, D) with wrap-around, which keeps the vehicle density
constant over time. Lane geometry gives each vehicle a fixed lateral
offset y = u * d_y - y0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class VehiclePose:
    x: float        # along-road position, meters in [0, D)
    lane: int       # 1..U
    direction: int  # +1 forward, -1 reverse
    y: float        # lateral offset, meters


def lane_center(lane: int, lane_width_m: float, edge_offset_m: float, num_lanes: int | None = None) -> float:
    """Lateral position of a lane: y = u * d_y - y0."""
    if lane < 1 or (num_lanes is not None and lane > num_lanes):
        raise ValueError(f"lane index {lane} out of range")
    return lane * lane_width_m - edge_offset_m


def wrap_position(x: float, road_length_m: float) -> float:
    x %= road_length_m
    # tiny negative x can round the modulo up to exactly D
    return x if x < road_length_m else 0.0


def step_position(pose: VehiclePose, speed_mps: float, slot_s: float, road_length_m: float) -> VehiclePose:
    """Advance one slot: x' = x + delta*V*tau, wrapped onto [0, D)."""
    x = wrap_position(pose.x + pose.direction * speed_mps * slot_s, road_length_m)
    return replace(pose, x=x)


def distance(a: VehiclePose, b: VehiclePose, road_length_m: float, mode: str = "2d") -> float:
    """Wrap-aware pairwise distance; symmetric and >= 0.

    dx is the shorter way around the ring; dy is the lane offset difference
    (dropped in "1d" mode).
    """
    dx = abs(a.x - b.x)
    dx = min(dx, road_length_m - dx)
    if mode == "1d":
        return dx
    dy = abs(a.y - b.y)
    return math.hypot(dx, dy)


def initial_poses(num_vehicles: int, road_length_m: float, num_lanes: int,
                  lane_width_m: float, edge_offset_m: float, rng) -> list[VehiclePose]:
    """Uniform x over [0, D), lanes round-robin, first U/2 lanes forward."""
    poses = []
    for i in range(num_vehicles):
        lane = (i % num_lanes) + 1
        direction = 1 if lane <= num_lanes // 2 else -1
        poses.append(VehiclePose(
            x=float(rng.random() * road_length_m),
            lane=lane,
            direction=direction,
            y=lane_center(lane, lane_width_m, edge_offset_m, num_lanes),
        ))
    return poses
