import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cv2x_aoi.mobility import (VehiclePose, distance, initial_poses,
                               lane_center, step_position, wrap_position)


def pose(x, lane=1, direction=1, y=2.0):
    return VehiclePose(x=x, lane=lane, direction=direction, y=y)


def test_lane_centers():
    # y = u * d_y - y0 with d_y = 4, y0 = 2
    assert [lane_center(u, 4.0, 2.0, 4) for u in (1, 2, 3, 4)] == [2.0, 6.0, 10.0, 14.0]
    with pytest.raises(ValueError):
        lane_center(0, 4.0, 2.0, 4)
    with pytest.raises(ValueError):
        lane_center(5, 4.0, 2.0, 4)


def test_step_wraps_both_directions():
    fwd = step_position(pose(499.99), 100.0 / 3.0, 1e-3, 500.0)
    assert 0.0 <= fwd.x < 500.0
    assert fwd.x == pytest.approx((499.99 + 100.0 / 3.0 * 1e-3) % 500.0)
    rev = step_position(pose(0.01, direction=-1), 100.0 / 3.0, 1e-3, 500.0)
    assert 0.0 <= rev.x < 500.0
    assert rev.x == pytest.approx((0.01 - 100.0 / 3.0 * 1e-3) % 500.0)


def test_distance_wrap_shortcut():
    a, b = pose(1.0), pose(499.0)
    assert distance(a, b, 500.0, mode="1d") == pytest.approx(2.0)
    assert distance(a, b, 500.0) == pytest.approx(2.0)  # same lane: dy = 0


def test_distance_modes():
    a = pose(0.0, y=2.0)
    b = pose(3.0, y=6.0)
    assert distance(a, b, 500.0, mode="1d") == pytest.approx(3.0)
    assert distance(a, b, 500.0, mode="2d") == pytest.approx(5.0)


@given(
    st.floats(min_value=0.0, max_value=499.999),
    st.floats(min_value=0.0, max_value=499.999),
    st.floats(min_value=0.0, max_value=20.0),
    st.floats(min_value=0.0, max_value=20.0),
)
def test_distance_symmetric_and_bounded(xa, xb, ya, yb):
    a, b = pose(xa, y=ya), pose(xb, y=yb)
    d_ab = distance(a, b, 500.0)
    assert d_ab == distance(b, a, 500.0)
    assert d_ab >= 0.0
    assert d_ab <= math.hypot(250.0, 20.0) + 1e-9
    assert distance(a, a, 500.0) == 0.0


@given(st.floats(min_value=-1e4, max_value=1e4))
def test_wrap_position_range(x):
    assert 0.0 <= wrap_position(x, 500.0) < 500.0


def test_initial_poses_layout():
    rng = np.random.default_rng(0)
    poses = initial_poses(10, 500.0, 4, 4.0, 2.0, rng)
    assert len(poses) == 10
    for i, p in enumerate(poses):
        assert 0.0 <= p.x < 500.0
        assert p.lane == (i % 4) + 1
        assert p.direction == (1 if p.lane <= 2 else -1)
        assert p.y == lane_center(p.lane, 4.0, 2.0, 4)
