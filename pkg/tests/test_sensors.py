"""Radar and lane-marker sensor tests."""

import math

import numpy as np
import pytest

from drivesim.dynamics import VehicleState
from drivesim.sensors import (
    DEFAULT_RADARS,
    FRONT_RADAR,
    LEFT_RADAR,
    RadarConfig,
    lane_scan,
    radar_scan,
)
from drivesim.world import Obstacle, Road, RoadSegment


def radar_oracle(config, vehicle, obstacles):
    """Brute-force oracle: rigid-transform every obstacle into the body frame
    with an explicit rotation matrix, then filter by angle and range."""
    if not obstacles:
        return []
    c, s = np.cos(vehicle.rot_z), np.sin(vehicle.rot_z)
    world_to_body = np.array([[c, s], [-s, c]])
    pos = np.array([[o.x - vehicle.x, o.y - vehicle.y] for o in obstacles])
    body = pos @ world_to_body.T
    rng = np.hypot(body[:, 0], body[:, 1])
    az = np.arctan2(body[:, 1], body[:, 0])
    rel = np.mod(az - config.boresight + np.pi, 2.0 * np.pi) - np.pi
    keep = (rng <= config.max_range) & (np.abs(rel) <= config.fov / 2.0)
    rows = [
        (float(rng[i]), obstacles[i].id, float(az[i]),
         obstacles[i].speed, obstacles[i].heading)
        for i in range(len(obstacles)) if keep[i]
    ]
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def make_road(segments, lane_width=3.5, num_lanes=2):
    return Road(segments=tuple(segments), lane_width=lane_width, num_lanes=num_lanes)


class TestRadarScan:
    def test_boresight_target(self):
        readings = radar_scan(
            FRONT_RADAR, VehicleState(),
            (Obstacle(id=5, x=10.0, y=0.0, heading=0.0),),
        )
        assert len(readings) == 1
        r = readings[0]
        assert (r.object_id, r.azimuth, r.elevation, r.range_m) == (5, 0.0, 0.0, 10.0)

    def test_left_sensor_excludes_front_target(self):
        readings = radar_scan(
            LEFT_RADAR, VehicleState(),
            (Obstacle(id=5, x=10.0, y=0.0, heading=0.0),),
        )
        assert readings == []

    def test_target_left_of_vehicle(self):
        readings = radar_scan(
            LEFT_RADAR, VehicleState(),
            (Obstacle(id=2, x=0.0, y=8.0, heading=1.0, speed=3.0),),
        )
        assert len(readings) == 1
        assert readings[0].azimuth == pytest.approx(math.pi / 2.0)
        assert readings[0].object_speed == 3.0
        assert readings[0].object_heading == 1.0

    def test_beyond_range_excluded(self):
        readings = radar_scan(
            FRONT_RADAR, VehicleState(),
            (Obstacle(id=1, x=150.5, y=0.0, heading=0.0),),
        )
        assert readings == []

    def test_output_sorted_by_range_then_id(self):
        obstacles = (
            Obstacle(id=9, x=10.0, y=0.0, heading=0.0),
            Obstacle(id=2, x=5.0, y=0.0, heading=0.0),
            Obstacle(id=1, x=10.0, y=0.0, heading=0.0),
        )
        readings = radar_scan(FRONT_RADAR, VehicleState(), obstacles)
        assert [r.object_id for r in readings] == [2, 1, 9]

    def test_matches_oracle_on_randomized_instances(self):
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            vehicle = VehicleState(
                x=float(rng.uniform(-50, 50)),
                y=float(rng.uniform(-50, 50)),
                rot_z=float(rng.uniform(-math.pi, math.pi)),
            )
            config = RadarConfig(
                mount="front",
                boresight=float(rng.uniform(-math.pi, math.pi)),
                fov=float(rng.uniform(0.3, math.pi)),
                max_range=float(rng.uniform(10.0, 200.0)),
            )
            obstacles = tuple(
                Obstacle(
                    id=i + 1,
                    x=float(rng.uniform(-150, 150)),
                    y=float(rng.uniform(-150, 150)),
                    heading=float(rng.uniform(-math.pi, math.pi)),
                    speed=float(rng.uniform(0, 30)),
                )
                for i in range(int(rng.integers(0, 8)))
            )
            got = radar_scan(config, vehicle, obstacles)
            expected = radar_oracle(config, vehicle, obstacles)
            assert len(got) == len(expected), f"trial {trial}"
            for r, (erng, eid, eaz, espeed, eheading) in zip(got, expected):
                assert r.object_id == eid
                assert abs(r.range_m - erng) <= 1e-9
                assert abs(r.azimuth - eaz) <= 1e-9
                assert abs(r.object_speed - espeed) <= 1e-9
                assert abs(r.object_heading - eheading) <= 1e-9

    def test_readings_satisfy_own_invariants(self):
        rng = np.random.default_rng(11)
        for config in DEFAULT_RADARS:
            for _ in range(200):
                vehicle = VehicleState(rot_z=float(rng.uniform(-math.pi, math.pi)))
                obstacles = tuple(
                    Obstacle(id=i + 1, x=float(rng.uniform(-80, 80)),
                             y=float(rng.uniform(-80, 80)), heading=0.0)
                    for i in range(5)
                )
                for r in radar_scan(config, vehicle, obstacles):
                    assert r.range_m <= config.max_range
                    rel = math.remainder(r.azimuth - config.boresight, 2.0 * math.pi)
                    assert abs(rel) <= config.fov / 2.0 + 1e-12
                    assert r.elevation == 0.0


class TestLaneScan:
    def test_lane0_centered_boundaries(self):
        road = make_road([RoadSegment("straight", 200.0)])
        vehicle = VehicleState(x=50.0, y=-1.75)
        reading = lane_scan(road, vehicle, (10.0, 20.0, 30.0))
        # brute force from the boundary-offset enumeration: offsets +3.5, 0, -3.5
        boundaries = [3.5, 0.0, -3.5]
        off = -1.75
        left_marker = min(b for b in boundaries if b >= off) - off
        right_marker = off - max(b for b in boundaries if b <= off)
        st0 = reading.stations[0]
        assert st0.left_marker == pytest.approx(left_marker) == pytest.approx(1.75)
        assert st0.right_marker == pytest.approx(right_marker) == pytest.approx(1.75)
        assert st0.right_curb == pytest.approx(1.75)
        assert st0.left_curb == pytest.approx(5.25)

    def test_straight_curvature_zero_at_all_stations(self):
        road = make_road([RoadSegment("straight", 200.0)])
        reading = lane_scan(road, VehicleState(x=10.0), (10.0, 20.0, 30.0))
        assert len(reading.stations) == 4
        assert all(st.curvature == 0.0 for st in reading.stations)

    def test_arc_curvature_at_all_stations(self):
        road = make_road([RoadSegment("arc", 300.0, 0.01)])
        reading = lane_scan(road, VehicleState(x=0.0), (10.0, 20.0, 30.0))
        assert all(st.curvature == 0.01 for st in reading.stations)

    def test_markers_sum_to_lane_width_in_lane(self):
        road = make_road([RoadSegment("straight", 200.0)], num_lanes=3)
        for y in (-4.0, -1.0, 0.3, 2.2, 5.0):
            reading = lane_scan(road, VehicleState(x=50.0, y=y), (10.0, 20.0, 30.0))
            st0 = reading.stations[0]
            assert st0.left_marker + st0.right_marker == pytest.approx(3.5, abs=1e-9)
            assert st0.left_marker >= 0.0
            assert st0.right_marker >= 0.0
            assert st0.left_curb >= st0.left_marker
            assert st0.right_curb >= st0.right_marker

    def test_preview_clamps_at_road_end(self):
        road = make_road([RoadSegment("straight", 100.0)])
        reading = lane_scan(road, VehicleState(x=95.0), (10.0, 20.0, 30.0))
        # stations beyond the end all sit at the final arc length
        assert reading.stations[1].curvature == 0.0
        assert len({(st.left_curb, st.right_curb) for st in reading.stations}) == 1

    def test_station_offsets_follow_arc(self):
        # vehicle on the center line of a gentle left arc: relative to a
        # preview station's tangent the arc bends left, so the vehicle
        # projects left of the station and the left margin widens
        road = make_road([RoadSegment("arc", 500.0, 0.002)], num_lanes=2)
        reading = lane_scan(road, VehicleState(x=0.0, y=0.0), (10.0, 20.0, 30.0))
        st0, st3 = reading.stations[0], reading.stations[3]
        assert st0.left_marker == pytest.approx(0.0, abs=1e-12)
        assert st3.left_marker > st0.left_marker
