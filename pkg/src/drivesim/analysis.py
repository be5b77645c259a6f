"""Log post-processing: lane indicators, nearest objects, and the run plot.

`analyze` unpacks a run directory into derived tables and a plan-view SVG:
road curbs in black, lane boundaries in yellow, the driven path as a blue
polyline, the vehicle box colored by its final lane, and obstacles colored
by which radar detected them (front red, left blue, right light blue) with
detection rays from the vehicle. Output is deterministic byte-for-byte for
a fixed input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .telemetry import RunLog, read_log
from .world import Road, Scenario, lateral_offset, load_scenario, road_frame_at

OFF_ROAD = -1  # lane_index value when outside the curbs

BLACK = "#000000"
YELLOW = "#E6C800"
BLUE = "#1F4FFF"
LIGHT_BLUE = "#7FB2FF"
RED = "#D62728"
GRAY = "#888888"  # obstacles no sensor ever detected

SENSOR_COLORS = {"front": RED, "left": BLUE, "right": LIGHT_BLUE}
SENSOR_PRIORITY = ("front", "left", "right")


@dataclass(frozen=True)
class NearestEntry:
    object_id: int
    range_m: float
    azimuth: float


@dataclass(frozen=True)
class NearestObjects:
    t_us: int
    front: NearestEntry | None = None
    left: NearestEntry | None = None
    right: NearestEntry | None = None


def lane_index(offset: float, road: Road) -> int:
    """Lane containing a center-line offset; lane 0 is rightmost.

    Returns OFF_ROAD outside the curbs. An offset exactly on a boundary
    belongs to the lane on its right (the smaller index).
    """
    half = road.half_width
    if abs(offset) > half:
        return OFF_ROAD
    k = road.num_lanes - 1 - math.floor((half - offset) / road.lane_width)
    return max(0, min(road.num_lanes - 1, k))


def nearest_objects(rows) -> NearestObjects:
    """Reduce one tick's radar rows to the closest object per sensor.

    Rows follow the radar table schema and must share t_us. Range ties
    resolve to the smaller object id.
    """
    if not rows:
        raise ValueError("no radar rows given")
    t_us = rows[0][0]
    best = {}
    for row in rows:
        _, sensor, object_id, azimuth, _, rng, _, _ = row
        key = (rng, object_id)
        if sensor not in best or key < best[sensor][0]:
            best[sensor] = (key, NearestEntry(object_id, rng, azimuth))
    return NearestObjects(
        t_us=t_us,
        front=best.get("front", (None, None))[1],
        left=best.get("left", (None, None))[1],
        right=best.get("right", (None, None))[1],
    )


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _polyline_points(pts) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in pts)


def _offset_polyline(road: Road, offset: float, ds: float = 0.5):
    pts = []
    n = max(2, int(math.ceil(road.total_length / ds)) + 1)
    for i in range(n):
        s = road.total_length * i / (n - 1)
        (x, y, h), _ = road_frame_at(road, s)
        pts.append((x - math.sin(h) * offset, y + math.cos(h) * offset))
    return pts


def render_plot(log: RunLog, scenario: Scenario) -> str:
    """Plan-view SVG of a run. Raises ValueError on an empty log."""
    if not log.vehicle:
        raise ValueError("empty log: no vehicle rows to plot")
    road = scenario.road
    half = road.half_width

    parts = []
    xs, ys = [], []

    def track(pts):
        for x, y in pts:
            xs.append(x)
            ys.append(y)
        return pts

    # road boundaries: interior markers yellow, curbs black (drawn last, on top)
    boundary_lines = []
    for j, off in enumerate(road.boundary_offsets()):
        pts = track(_offset_polyline(road, off))
        color = BLACK if j in (0, road.num_lanes) else YELLOW
        width = "0.4" if color == BLACK else "0.15"
        boundary_lines.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="{width}" '
            f'points="{_polyline_points(pts)}" />'
        )
    parts.extend(sorted(boundary_lines, key=lambda s: BLACK in s))

    # driven path
    path_pts = track([(row[1], row[2]) for row in log.vehicle])
    parts.append(
        f'<polyline fill="none" stroke="{BLUE}" stroke-width="0.3" '
        f'points="{_polyline_points(path_pts)}" />'
    )

    # detections: first tick each sensor saw each object
    first_seen = {}  # (sensor, object_id) -> (t_us, azimuth, range)
    for row in log.radar:
        t_us, sensor, object_id, azimuth, _, rng, _, _ = row
        key = (sensor, object_id)
        if key not in first_seen:
            first_seen[key] = (t_us, azimuth, rng)
    vehicle_at = {row[0]: row for row in log.vehicle}

    detected_by = {}  # object_id -> set of sensors
    rays = []
    markers = []
    for (sensor, object_id), (t_us, azimuth, rng) in sorted(first_seen.items()):
        detected_by.setdefault(object_id, set()).add(sensor)
        vrow = vehicle_at[t_us]
        vx, vy, heading = vrow[1], vrow[2], vrow[6]
        ox = vx + rng * math.cos(heading + azimuth)
        oy = vy + rng * math.sin(heading + azimuth)
        track([(ox, oy)])
        color = SENSOR_COLORS[sensor]
        rays.append(
            f'<line stroke="{color}" stroke-width="0.12" stroke-dasharray="0.6,0.4" '
            f'x1="{_fmt(vx)}" y1="{_fmt(-vy)}" x2="{_fmt(ox)}" y2="{_fmt(-oy)}" />'
        )
        markers.append((object_id, sensor, ox, oy))
    parts.extend(rays)

    # obstacle markers: color by highest-priority detecting sensor
    drawn = set()
    for priority in SENSOR_PRIORITY:
        for object_id, sensor, ox, oy in markers:
            if sensor == priority and object_id not in drawn:
                drawn.add(object_id)
                parts.append(
                    f'<circle fill="{SENSOR_COLORS[sensor]}" r="1.0" '
                    f'cx="{_fmt(ox)}" cy="{_fmt(-oy)}" />'
                )
    for o in scenario.obstacles:
        track([(o.x, o.y)])
        if o.id not in drawn:
            parts.append(f'<circle fill="{GRAY}" r="1.0" cx="{_fmt(o.x)}" cy="{_fmt(-o.y)}" />')

    # vehicle box at the final pose, colored by final lane (even blue, odd light)
    last = log.vehicle[-1]
    vx, vy, heading = last[1], last[2], last[6]
    _, off = lateral_offset(road, vx, vy)
    idx = lane_index(off, road)
    box_color = BLUE if idx == OFF_ROAD or idx % 2 == 0 else LIGHT_BLUE
    parts.append(
        f'<g transform="translate({_fmt(vx)} {_fmt(-vy)}) rotate({_fmt(-math.degrees(heading))})">'
        f'<rect fill="{box_color}" stroke="{BLACK}" stroke-width="0.1" '
        f'x="-2.25" y="-0.9" width="4.5" height="1.8" /></g>'
    )

    margin = half + 5.0
    x0, x1 = min(xs) - margin, max(xs) + margin
    y0, y1 = min(ys) - margin, max(ys) + margin
    header = (
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(x1 - x0)} {_fmt(y1 - y0)}" '
        f'width="900" height="{_fmt(900 * (y1 - y0) / (x1 - x0))}">'
    )
    return header + "".join(parts) + "</svg>\n"


def derive_lane_indicators(log: RunLog, scenario: Scenario) -> list:
    """lane_indicators rows (t_us, lane_index, center_offset) per tick."""
    rows = []
    for row in log.vehicle:
        _, off = lateral_offset(scenario.road, row[1], row[2])
        rows.append((row[0], lane_index(off, scenario.road), off))
    return rows


def derive_nearest_objects(log: RunLog) -> list:
    """nearest_objects rows (t_us, sensor, object_id, range, azimuth)."""
    by_tick = {}
    for row in log.radar:
        by_tick.setdefault(row[0], []).append(row)
    rows = []
    for t_us in sorted(by_tick):
        near = nearest_objects(by_tick[t_us])
        for sensor in SENSOR_PRIORITY:
            entry = getattr(near, sensor)
            if entry is not None:
                rows.append((t_us, sensor, entry.object_id, entry.range_m, entry.azimuth))
    return rows


def analyze(run_dir, out_dir=None, plot_only: bool = False) -> list[Path]:
    """Unpack a run directory into derived CSVs and plot.svg.

    Missing input tables are named explicitly by read_log. Re-running on the
    same input produces byte-identical outputs.
    """
    import csv

    run_dir = Path(run_dir)
    out_dir = Path(out_dir) if out_dir is not None else run_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    log = read_log(run_dir)
    if not log.scenario_text:
        raise FileNotFoundError(f"missing scenario document: {run_dir / 'scenario.json'}")
    scenario = load_scenario(log.scenario_text)

    written = []
    if not plot_only:
        from .telemetry import _format_cell

        for name, columns, rows in (
            ("lane_indicators", ("t_us", "lane_index", "center_offset"),
             derive_lane_indicators(log, scenario)),
            ("nearest_objects", ("t_us", "sensor", "object_id", "range", "azimuth"),
             derive_nearest_objects(log)),
        ):
            path = out_dir / f"{name}.csv"
            with open(path, "w", newline="", encoding="utf-8") as f:
                w = csv.writer(f, lineterminator="\n")
                w.writerow(columns)
                for row in rows:
                    w.writerow([_format_cell(v) for v in row])
            written.append(path)

    plot_path = out_dir / "plot.svg"
    plot_path.write_text(render_plot(log, scenario), encoding="utf-8")
    written.append(plot_path)
    return written
