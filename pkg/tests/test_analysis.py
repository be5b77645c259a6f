"""Lane indicators, nearest-object reduction, and plot rendering tests."""

import hashlib
import math
import json

import pytest

from drivesim.analysis import (
    BLACK,
    BLUE,
    OFF_ROAD,
    RED,
    YELLOW,
    analyze,
    derive_nearest_objects,
    lane_index,
    nearest_objects,
    render_plot,
)
from drivesim.telemetry import LoopConfig, constant_input, read_log, run, scripted_inputs, write_log
from drivesim.world import Road, RoadSegment, load_scenario

ROAD_2 = Road(segments=(RoadSegment("straight", 100.0),), lane_width=3.5, num_lanes=2)

PLOT_DOC = json.dumps({
    "road": {"segments": [{"kind": "straight", "length": 300.0}],
             "lane_width": 3.5, "num_lanes": 2, "origin": [0, 0, 0]},
    "obstacles": [
        {"id": 1, "x": 40.0, "y": -1.75, "heading": 0.0, "speed": 0.0},
        {"id": 2, "x": 20.0, "y": 30.0, "heading": 0.0, "speed": 0.0},
    ],
    "vehicle_start": [0.0, -1.75, 0.0, 20.0],
    "seed": 7,
})


class TestLaneIndex:
    def test_centered_right_lane(self):
        assert lane_index(-1.75, ROAD_2) == 0

    def test_centered_left_lane(self):
        assert lane_index(1.75, ROAD_2) == 1

    def test_off_road(self):
        assert lane_index(-4.0, ROAD_2) == OFF_ROAD
        assert lane_index(3.6, ROAD_2) == OFF_ROAD

    def test_boundary_assigns_right_lane(self):
        # exactly on the middle marker: the smaller index wins
        assert lane_index(0.0, ROAD_2) == 0

    def test_curb_edges_stay_on_road(self):
        assert lane_index(3.5, ROAD_2) == 1
        assert lane_index(-3.5, ROAD_2) == 0

    def test_three_lane_road(self):
        road = Road(segments=(RoadSegment("straight", 100.0),),
                    lane_width=3.0, num_lanes=3)
        assert lane_index(-3.0, road) == 0
        assert lane_index(0.0, road) == 1
        assert lane_index(3.0, road) == 2

    def test_constant_along_lane_center(self):
        from drivesim.world import lateral_offset, road_frame_at

        road = Road(segments=(RoadSegment("straight", 50.0),
                              RoadSegment("arc", 100.0, 0.01)),
                    lane_width=3.5, num_lanes=2)
        # traverse the lane-0 center line: index never changes
        for i in range(60):
            s = road.total_length * i / 59.0
            (x, y, h), _ = road_frame_at(road, s)
            px = x - math.sin(h) * -1.75
            py = y + math.cos(h) * -1.75
            _, off = lateral_offset(road, px, py)
            assert lane_index(off, road) == 0


class TestNearestObjects:
    def rows(self, entries):
        return [(1000, sensor, oid, 0.1, 0.0, rng, 0.0, 0.0)
                for sensor, oid, rng in entries]

    def test_min_range_wins(self):
        near = nearest_objects(self.rows([("front", 3, 12.0), ("front", 7, 8.0)]))
        assert near.front.object_id == 7
        assert near.front.range_m == 8.0

    def test_tie_smaller_id(self):
        near = nearest_objects(self.rows([("front", 9, 10.0), ("front", 4, 10.0)]))
        assert near.front.object_id == 4

    def test_absent_sensor_empty(self):
        near = nearest_objects(self.rows([("front", 1, 5.0)]))
        assert near.left is None and near.right is None

    def test_dominance(self):
        rows = self.rows([("front", i, 5.0 + i) for i in range(1, 9)])
        near = nearest_objects(rows)
        assert all(near.front.range_m <= r[5] for r in rows)


class TestRenderPlot:
    def make_run(self, doc=PLOT_DOC, duration=10.0):
        scn = load_scenario(doc)
        log = run(scn, LoopConfig(duration=duration), constant_input())
        return log, scn

    def test_element_inventory(self):
        log, scn = self.make_run()
        svg = render_plot(log, scn)
        assert svg.count(f'stroke="{BLACK}"') >= 2  # two curbs (plus box outline)
        assert svg.count(f'stroke="{YELLOW}"') >= 1  # interior lane boundary
        assert svg.count(f'<polyline fill="none" stroke="{BLUE}"') == 1  # path
        assert svg.count(f'fill="{RED}"') >= 1  # front-detected obstacle
        assert "<line" in svg  # detection rays

    def test_no_obstacles_no_detections(self):
        doc = json.loads(PLOT_DOC)
        doc["obstacles"] = []
        log, scn = self.make_run(json.dumps(doc))
        svg = render_plot(log, scn)
        assert f'fill="{RED}"' not in svg
        assert "<line" not in svg

    def test_deterministic_bytes(self):
        log, scn = self.make_run()
        a = render_plot(log, scn)
        b = render_plot(log, scn)
        assert hashlib.sha256(a.encode()).hexdigest() == hashlib.sha256(b.encode()).hexdigest()

    def test_empty_log_rejected(self):
        _, scn = self.make_run(duration=0.005)
        from drivesim.telemetry import RunLog
        with pytest.raises(ValueError, match="empty"):
            render_plot(RunLog(header={}), scn)


class TestAnalyze:
    def run_dir(self, tmp_path):
        scn = load_scenario(PLOT_DOC)
        steering = [(0.0, 0.4, 0.0)] * 2000
        log = run(scn, LoopConfig(duration=10.0), scripted_inputs(steering))
        d = tmp_path / "run"
        write_log(log, d)
        return d

    def test_outputs_written(self, tmp_path):
        d = self.run_dir(tmp_path)
        written = analyze(d)
        names = {p.name for p in written}
        assert names == {"lane_indicators.csv", "nearest_objects.csv", "plot.svg"}
        lanes = (d / "lane_indicators.csv").read_text().splitlines()
        assert lanes[0] == "t_us,lane_index,center_offset"
        assert len(lanes) == 2001
        first = lanes[1].split(",")
        assert first[1] == "0"  # starts centered in lane 0

    def test_nearest_objects_schema(self, tmp_path):
        d = self.run_dir(tmp_path)
        analyze(d)
        rows = (d / "nearest_objects.csv").read_text().splitlines()
        assert rows[0] == "t_us,sensor,object_id,range,azimuth"
        assert any(",front," in r for r in rows[1:])

    def test_idempotent(self, tmp_path):
        d = self.run_dir(tmp_path)
        analyze(d)
        digest = hashlib.sha256((d / "plot.svg").read_bytes()
                                + (d / "lane_indicators.csv").read_bytes()
                                + (d / "nearest_objects.csv").read_bytes()).hexdigest()
        analyze(d)
        again = hashlib.sha256((d / "plot.svg").read_bytes()
                               + (d / "lane_indicators.csv").read_bytes()
                               + (d / "nearest_objects.csv").read_bytes()).hexdigest()
        assert digest == again

    def test_plot_only(self, tmp_path):
        d = self.run_dir(tmp_path)
        out = tmp_path / "out"
        written = analyze(d, out_dir=out, plot_only=True)
        assert [p.name for p in written] == ["plot.svg"]
        assert not (out / "lane_indicators.csv").exists()

    def test_missing_table_reported(self, tmp_path):
        d = self.run_dir(tmp_path)
        (d / "lane.csv").unlink()
        with pytest.raises(Exception, match="lane.csv"):
            analyze(d)

    def test_derive_nearest_matches_radar_minimum(self, tmp_path):
        d = self.run_dir(tmp_path)
        log = read_log(d)
        rows = derive_nearest_objects(log)
        by_tick_sensor = {}
        for r in log.radar:
            key = (r[0], r[1])
            by_tick_sensor.setdefault(key, []).append(r[5])
        for t_us, sensor, _, rng, _ in rows:
            assert rng == min(by_tick_sensor[(t_us, sensor)])
