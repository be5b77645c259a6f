"""Road geometry and scenario document tests."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drivesim.world import (
    Obstacle,
    OffRoadError,
    Road,
    RoadSegment,
    ScenarioError,
    lateral_offset,
    load_scenario,
    road_frame_at,
    wrap_angle,
)


def make_road(segments, lane_width=3.5, num_lanes=2, origin=(0.0, 0.0, 0.0)):
    return Road(segments=tuple(segments), lane_width=lane_width,
                num_lanes=num_lanes, origin=origin)


STRAIGHT = make_road([RoadSegment("straight", 500.0)])
MIXED = make_road([
    RoadSegment("straight", 100.0),
    RoadSegment("arc", 120.0, 0.01),
    RoadSegment("straight", 50.0),
    RoadSegment("arc", 80.0, -0.02),
])


def integrate_center_line(road, s, ds=1e-4):
    """Independent oracle: midpoint-rule integration of the center line.

    Heading is exact on the grid (curvature is piecewise constant); x and y
    come from integrating cos/sin of the midpoint heading at step ds.
    """
    x, y, h = road.origin
    remaining = s
    for seg in road.segments:
        span = min(seg.length, remaining)
        if span <= 0:
            break
        n = max(1, int(round(span / ds)))
        step = span / n
        u = (np.arange(n) + 0.5) * step
        h_mid = h + seg.signed_curvature * u
        x += float(np.sum(np.cos(h_mid))) * step
        y += float(np.sum(np.sin(h_mid))) * step
        h += seg.signed_curvature * span
        remaining -= span
    return x, y, h


def dense_center_line(road, grid=1e-3):
    """Independent oracle support: the center line sampled on a fine grid."""
    pts = []
    all_s = []
    x, y, h = road.origin
    s0 = 0.0
    for seg in road.segments:
        n = int(np.ceil(seg.length / grid)) + 1
        u = np.linspace(0.0, seg.length, n)
        if seg.signed_curvature == 0.0:
            xs = x + u * np.cos(h)
            ys = y + u * np.sin(h)
            h_end = h
        else:
            k = seg.signed_curvature
            hs = h + k * u
            xs = x + (np.sin(hs) - np.sin(h)) / k
            ys = y - (np.cos(hs) - np.cos(h)) / k
            h_end = h + k * seg.length
        pts.append(np.column_stack([xs, ys]))
        all_s.append(s0 + u)
        x, y, h = float(xs[-1]), float(ys[-1]), h_end
        s0 += seg.length
    return np.vstack(pts), np.concatenate(all_s)


def brute_force_nearest(dense, px, py):
    """Independent oracle: argmin over the dense center-line samples."""
    xy, s = dense
    d2 = (xy[:, 0] - px) ** 2 + (xy[:, 1] - py) ** 2
    i = int(np.argmin(d2))
    return float(math.sqrt(d2[i])), float(s[i])


class TestLoadScenario:
    def test_minimal_document(self):
        doc = json.dumps({"road": {"segments": [{"kind": "straight", "length": 500}],
                                   "lane_width": 3.5, "num_lanes": 2}})
        scn = load_scenario(doc)
        assert scn.road.total_length == 500.0
        assert scn.road.num_lanes == 2
        assert scn.obstacles == ()
        assert scn.seed == 0

    def test_zero_lane_width_rejected(self):
        doc = json.dumps({"road": {"segments": [{"kind": "straight", "length": 500}],
                                   "lane_width": 0, "num_lanes": 2}})
        with pytest.raises(ScenarioError, match="lane_width"):
            load_scenario(doc)

    def test_preview_distances_default(self):
        doc = json.dumps({"road": {"segments": [{"kind": "straight", "length": 500}],
                                   "lane_width": 3.5, "num_lanes": 2}})
        assert load_scenario(doc).preview_distances == (10.0, 20.0, 30.0)

    def test_unknown_top_level_key_rejected(self):
        doc = json.dumps({"road": {"segments": [{"kind": "straight", "length": 500}],
                                   "lane_width": 3.5, "num_lanes": 2}, "wheather": 1})
        with pytest.raises(ScenarioError, match="wheather"):
            load_scenario(doc)

    def test_parse_error_reports_line(self):
        with pytest.raises(ScenarioError, match="line"):
            load_scenario('{"road": \n !}')

    def test_duplicate_obstacle_ids_rejected(self):
        doc = json.dumps({
            "road": {"segments": [{"kind": "straight", "length": 500}],
                     "lane_width": 3.5, "num_lanes": 2},
            "obstacles": [{"id": 3, "x": 1, "y": 0, "heading": 0},
                          {"id": 3, "x": 9, "y": 0, "heading": 0}],
        })
        with pytest.raises(ScenarioError, match="duplicate"):
            load_scenario(doc)

    def test_decreasing_preview_rejected(self):
        doc = json.dumps({
            "road": {"segments": [{"kind": "straight", "length": 500}],
                     "lane_width": 3.5, "num_lanes": 2},
            "preview_distances": [30, 20, 10],
        })
        with pytest.raises(ScenarioError, match="preview"):
            load_scenario(doc)

    def test_vehicle_start_off_road_rejected(self):
        doc = json.dumps({
            "road": {"segments": [{"kind": "straight", "length": 500}],
                     "lane_width": 3.5, "num_lanes": 2},
            "vehicle_start": [0, 8.0, 0, 0],
        })
        with pytest.raises(ScenarioError, match="vehicle_start"):
            load_scenario(doc)

    def test_arc_needs_nonzero_curvature(self):
        doc = json.dumps({"road": {"segments": [{"kind": "arc", "length": 50}],
                                   "lane_width": 3.5, "num_lanes": 2}})
        with pytest.raises(ScenarioError, match="curvature"):
            load_scenario(doc)


class TestRoadFrame:
    def test_straight_along_x(self):
        (x, y, h), k = road_frame_at(STRAIGHT, 10.0)
        assert (x, y, h, k) == (10.0, 0.0, 0.0, 0.0)

    def test_arc_reports_curvature(self):
        road = make_road([RoadSegment("arc", 100.0, 0.02)])
        _, k = road_frame_at(road, 0.0)
        assert k == 0.02

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            road_frame_at(STRAIGHT, 500.1)
        with pytest.raises(ValueError):
            road_frame_at(STRAIGHT, -0.1)

    @pytest.mark.parametrize("s", [0.0, 50.0, 100.0, 137.0, 220.0, 260.0, 305.0, 350.0])
    def test_matches_numeric_integration(self, s):
        (x, y, h), _ = road_frame_at(MIXED, s)
        ox, oy, oh = integrate_center_line(MIXED, s)
        assert math.hypot(x - ox, y - oy) < 1e-6
        assert abs(wrap_angle(h - oh)) < 1e-6

    def test_curvature_equals_segment_exactly(self):
        for s, expected in [(0.0, 0.0), (99.0, 0.0), (101.0, 0.01),
                            (219.0, 0.01), (221.0, 0.0), (271.0, -0.02)]:
            _, k = road_frame_at(MIXED, s)
            assert k == expected

    def test_straight_heading_constant(self):
        road = make_road([RoadSegment("straight", 100.0), RoadSegment("straight", 50.0)],
                         origin=(3.0, -2.0, 0.7))
        for s in [0.0, 10.0, 99.0, 100.0, 149.0]:
            (_, _, h), _ = road_frame_at(road, s)
            assert h == pytest.approx(0.7, abs=1e-12)


class TestLateralOffset:
    def test_perpendicular_drop(self):
        assert lateral_offset(STRAIGHT, 10.0, 0.5) == (10.0, 0.5)

    def test_on_center_line(self):
        s, off = lateral_offset(STRAIGHT, 25.0, 0.0)
        assert (s, off) == (25.0, 0.0)

    def test_right_side_negative(self):
        _, off = lateral_offset(STRAIGHT, 10.0, -1.2)
        assert off == -1.2

    def test_too_far_raises(self):
        with pytest.raises(OffRoadError):
            lateral_offset(STRAIGHT, 10.0, 50.0)

    def test_matches_dense_sampling(self):
        rng = np.random.default_rng(7)
        road = MIXED
        dense = dense_center_line(road)
        for _ in range(25):
            s_true = float(rng.uniform(0.0, road.total_length))
            d = float(rng.uniform(-6.0, 6.0))
            (cx, cy, h), _ = road_frame_at(road, s_true)
            px = cx - math.sin(h) * d
            py = cy + math.cos(h) * d
            s, off = lateral_offset(road, px, py)
            bf_dist, bf_s = brute_force_nearest(dense, px, py)
            assert abs(abs(off) - bf_dist) < 2e-3
            assert abs(s - bf_s) < 2e-3

    def test_round_trip_center_line(self):
        for road in (STRAIGHT, MIXED):
            for frac in np.linspace(0.0, 1.0, 41):
                s_true = float(frac) * road.total_length
                (x, y, _), _ = road_frame_at(road, s_true)
                s, off = lateral_offset(road, x, y)
                assert abs(s - s_true) < 1e-6
                assert abs(off) < 1e-6

    @given(
        s_frac=st.floats(0.0, 1.0),
        d=st.floats(-8.0, 8.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_left_normal_displacement_returns_offset(self, s_frac, d):
        road = MIXED
        s_true = s_frac * road.total_length
        (x, y, h), k = road_frame_at(road, s_true)
        # keep clear of arc centers, where the perpendicular foot flips
        if k != 0.0 and abs(d) >= 1.0 / abs(k):
            return
        px = x - math.sin(h) * d
        py = y + math.cos(h) * d
        s, off = lateral_offset(road, px, py)
        assert off == pytest.approx(d, abs=1e-9)


class TestObstacle:
    def test_moves_along_heading(self):
        o = Obstacle(id=1, x=0.0, y=0.0, heading=math.pi / 2.0, speed=2.0)
        m = o.moved(0.5)
        assert m.x == pytest.approx(0.0, abs=1e-15)
        assert m.y == pytest.approx(1.0)

    def test_stationary_is_identity(self):
        o = Obstacle(id=1, x=3.0, y=4.0, heading=1.0, speed=0.0)
        assert o.moved(10.0) is o

    def test_negative_speed_rejected(self):
        with pytest.raises(ScenarioError):
            Obstacle(id=1, x=0.0, y=0.0, heading=0.0, speed=-1.0)
