"""Road geometry and scenario definitions.

Conventions, used everywhere in this package:
  - 2D world plane, z up, headings in radians measured counter-clockwise
    from +x and wrapped to (-pi, pi].
  - Left of the travel direction is the positive lateral direction.
  - A road is a chain of constant-curvature segments (straights and arcs)
    laid end to end from an origin pose, so center-line poses and curvature
    have closed forms.
  - Lane 0 is the rightmost lane. Lane centers sit at offset
    (num_lanes/2 - k - 0.5) * lane_width from the center line; curbs at
    +/- (num_lanes/2) * lane_width.

Scenario documents are JSON (see `load_scenario`); unknown keys are
rejected so typos fail loudly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .motion import CueingGains

TWO_PI = 2.0 * math.pi

DEFAULT_PREVIEW_DISTANCES = (10.0, 20.0, 30.0)


def wrap_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    return -((-a + math.pi) % TWO_PI - math.pi) + 0.0  # + 0.0 normalizes -0.0


class ScenarioError(ValueError):
    """Scenario document is malformed or violates an invariant."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class OffRoadError(ValueError):
    """Query point is too far from the road center line."""


@dataclass(frozen=True)
class RoadSegment:
    kind: str  # "straight" | "arc"
    length: float  # arc length, m
    signed_curvature: float = 0.0  # 1/m; 0 for straight, positive curves left

    def __post_init__(self):
        if self.kind not in ("straight", "arc"):
            raise ScenarioError("segment.kind", f"unknown kind {self.kind!r}")
        if not self.length > 0:
            raise ScenarioError("segment.length", "must be > 0")
        if not abs(self.signed_curvature) < 1.0:
            raise ScenarioError("segment.curvature", "|curvature| must be < 1")
        if (self.kind == "arc") != (self.signed_curvature != 0.0):
            raise ScenarioError(
                "segment.curvature",
                "arc segments need nonzero curvature, straights need zero",
            )


@dataclass(frozen=True)
class Road:
    segments: tuple[RoadSegment, ...]
    lane_width: float
    num_lanes: int
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)  # x, y, heading
    # start frame (s, x, y, heading) of each segment, derived
    _frames: tuple[tuple[float, float, float, float], ...] = field(
        init=False, repr=False, compare=False
    )
    total_length: float = field(init=False, compare=False)

    def __post_init__(self):
        if self.num_lanes < 1:
            raise ScenarioError("road.num_lanes", "must be >= 1")
        if not self.lane_width > 0:
            raise ScenarioError("road.lane_width", "must be > 0")
        if not self.segments:
            raise ScenarioError("road.segments", "must not be empty")
        frames = []
        s, x, y, h = 0.0, self.origin[0], self.origin[1], wrap_angle(self.origin[2])
        for seg in self.segments:
            frames.append((s, x, y, h))
            x, y, h = _advance_pose(x, y, h, seg.signed_curvature, seg.length)
            s += seg.length
        object.__setattr__(self, "_frames", tuple(frames))
        object.__setattr__(self, "total_length", s)

    @property
    def half_width(self) -> float:
        return self.num_lanes * self.lane_width / 2.0

    def boundary_offsets(self) -> tuple[float, ...]:
        """Lateral offsets of all lane boundaries, leftmost (curb) first."""
        return tuple(
            (self.num_lanes / 2.0 - j) * self.lane_width for j in range(self.num_lanes + 1)
        )


def _advance_pose(x: float, y: float, h: float, curvature: float, ds: float):
    """Pose after following a constant-curvature path for arc length ds."""
    if curvature == 0.0:
        return x + ds * math.cos(h), y + ds * math.sin(h), h
    h1 = h + curvature * ds
    x1 = x + (math.sin(h1) - math.sin(h)) / curvature
    y1 = y - (math.cos(h1) - math.cos(h)) / curvature
    return x1, y1, wrap_angle(h1)


def road_frame_at(road: Road, s: float):
    """Center-line pose and curvature at arc length s.

    Returns ((x, y, heading), curvature). At segment joints the earlier
    segment is the containing one.
    """
    if not 0.0 <= s <= road.total_length:
        raise ValueError(f"s={s} outside [0, {road.total_length}]")
    for seg, (s0, x0, y0, h0) in zip(road.segments, road._frames):
        if s <= s0 + seg.length:
            u = s - s0
            if seg.signed_curvature == 0.0:
                return (x0 + u * math.cos(h0), y0 + u * math.sin(h0), h0), 0.0
            k = seg.signed_curvature
            h = h0 + k * u
            x = x0 + (math.sin(h) - math.sin(h0)) / k
            y = y0 - (math.cos(h) - math.cos(h0)) / k
            return (x, y, wrap_angle(h)), k
    # s == total_length with accumulated rounding can fall through
    seg = road.segments[-1]
    s0, x0, y0, h0 = road._frames[-1]
    x, y, h = _advance_pose(x0, y0, h0, seg.signed_curvature, s - s0)
    return (x, y, h), seg.signed_curvature


def _segment_candidates(seg: RoadSegment, frame, px: float, py: float):
    """Nearest-point candidates (local arc length values) on one segment."""
    s0, x0, y0, h0 = frame
    cands = [0.0, seg.length]
    if seg.signed_curvature == 0.0:
        dx, dy = px - x0, py - y0
        u = dx * math.cos(h0) + dy * math.sin(h0)
        if 0.0 < u < seg.length:
            cands.append(u)
        return cands
    k = seg.signed_curvature
    cx = x0 - math.sin(h0) / k
    cy = y0 + math.cos(h0) / k
    if px == cx and py == cy:
        return cands  # arc center: every point equidistant, endpoints suffice
    alpha = math.atan2(py - cy, px - cx)
    beta0 = math.atan2(y0 - cy, x0 - cx)
    delta = alpha - beta0
    # point angle advances by k per unit arc length; normalize the angle
    # difference into the first period travelled away from s=0
    if k > 0:
        delta = delta % TWO_PI
    else:
        delta = -((-delta) % TWO_PI)
    u = delta / k
    if 0.0 < u < seg.length:
        cands.append(u)
    return cands


def _offset_at(seg: RoadSegment, frame, u: float, px: float, py: float):
    """(distance, signed offset, local pose) of point vs. segment station u."""
    s0, x0, y0, h0 = frame
    if seg.signed_curvature == 0.0:
        fx, fy, fh = x0 + u * math.cos(h0), y0 + u * math.sin(h0), h0
    else:
        k = seg.signed_curvature
        fh = h0 + k * u
        fx = x0 + (math.sin(fh) - math.sin(h0)) / k
        fy = y0 - (math.cos(fh) - math.cos(h0)) / k
    dx, dy = px - fx, py - fy
    offset = -math.sin(fh) * dx + math.cos(fh) * dy  # left-normal component
    return math.hypot(dx, dy), offset


def lateral_offset(road: Road, x: float, y: float) -> tuple[float, float]:
    """Arc length and signed lateral offset of the nearest center-line point.

    Offset is positive to the left of the travel direction. The global
    minimizer wins; exact distance ties resolve to the smallest arc length.
    Raises OffRoadError if the point is more than
    num_lanes * lane_width + 10 m away from the center line.
    """
    best = None  # (distance, s_global, offset)
    for seg, frame in zip(road.segments, road._frames):
        for u in _segment_candidates(seg, frame, x, y):
            dist, off = _offset_at(seg, frame, u, x, y)
            key = (dist, frame[0] + u)
            if best is None or key < (best[0], best[1]):
                best = (dist, frame[0] + u, off)
    dist, s, off = best
    if dist > road.num_lanes * road.lane_width + 10.0:
        raise OffRoadError(
            f"point ({x}, {y}) is {dist:.1f} m from the center line"
        )
    return s, off


@dataclass(frozen=True)
class Obstacle:
    id: int
    x: float
    y: float
    heading: float
    speed: float = 0.0

    def __post_init__(self):
        if self.id <= 0:
            raise ScenarioError("obstacle.id", "must be a positive integer")
        if self.speed < 0:
            raise ScenarioError("obstacle.speed", "must be >= 0")

    def moved(self, dt: float) -> "Obstacle":
        """Obstacle after dt seconds of constant-speed straight-line motion."""
        if self.speed == 0.0:
            return self
        return replace(
            self,
            x=self.x + self.speed * math.cos(self.heading) * dt,
            y=self.y + self.speed * math.sin(self.heading) * dt,
        )


@dataclass(frozen=True)
class Scenario:
    road: Road
    obstacles: tuple[Obstacle, ...] = ()
    vehicle_start: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    seed: int = 0
    gains: CueingGains = CueingGains()
    preview_distances: tuple[float, float, float] = DEFAULT_PREVIEW_DISTANCES
    source: str = ""  # original document text, "" for programmatic scenarios


_ROAD_KEYS = {"segments", "lane_width", "num_lanes", "origin"}
_SEGMENT_KEYS = {"kind", "length", "curvature"}
_OBSTACLE_KEYS = {"id", "x", "y", "heading", "speed"}
_SCENARIO_KEYS = {"road", "obstacles", "vehicle_start", "seed", "preview_distances", "gains"}
_GAINS_KEYS = {
    "k_pitch", "k_roll", "k_yaw", "k_heave",
    "shake_magnitude", "shake_frequency", "shake_duration",
}


def _reject_unknown(obj: dict, allowed: set, where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(where, f"unknown key(s): {', '.join(sorted(unknown))}")


def _number(obj: dict, key: str, where: str, default=None):
    if key not in obj:
        if default is None:
            raise ScenarioError(f"{where}.{key}", "missing")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{where}.{key}", f"expected a number, got {v!r}")
    return float(v)


def load_scenario(text: str) -> Scenario:
    """Parse and validate a JSON scenario document.

    Raises ScenarioError with the offending field (or the parse position for
    malformed JSON). Optional fields get defaults: no obstacles, seed 0,
    vehicle_start at the road origin at rest, preview distances 10/20/30 m,
    identity cueing gains.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError("document", f"parse error at line {e.lineno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ScenarioError("document", "top level must be a JSON object")
    _reject_unknown(doc, _SCENARIO_KEYS, "document")

    if "road" not in doc:
        raise ScenarioError("road", "missing")
    road_doc = doc["road"]
    if not isinstance(road_doc, dict):
        raise ScenarioError("road", "must be an object")
    _reject_unknown(road_doc, _ROAD_KEYS, "road")
    seg_docs = road_doc.get("segments")
    if not isinstance(seg_docs, list) or not seg_docs:
        raise ScenarioError("road.segments", "must be a non-empty array")
    segments = []
    for i, sd in enumerate(seg_docs):
        where = f"road.segments[{i}]"
        if not isinstance(sd, dict):
            raise ScenarioError(where, "must be an object")
        _reject_unknown(sd, _SEGMENT_KEYS, where)
        kind = sd.get("kind")
        if kind not in ("straight", "arc"):
            raise ScenarioError(f"{where}.kind", f"must be 'straight' or 'arc', got {kind!r}")
        length = _number(sd, "length", where)
        curvature = _number(sd, "curvature", where, default=0.0)
        try:
            segments.append(RoadSegment(kind, length, curvature))
        except ScenarioError as e:
            raise ScenarioError(f"{where}.{e.field.split('.', 1)[1]}", str(e).split(": ", 1)[1])

    origin = road_doc.get("origin", [0.0, 0.0, 0.0])
    if not (isinstance(origin, list) and len(origin) == 3):
        raise ScenarioError("road.origin", "must be [x, y, heading]")
    num_lanes = road_doc.get("num_lanes")
    if not isinstance(num_lanes, int) or isinstance(num_lanes, bool):
        raise ScenarioError("road.num_lanes", "must be an integer")
    road = Road(
        segments=tuple(segments),
        lane_width=_number(road_doc, "lane_width", "road"),
        num_lanes=num_lanes,
        origin=tuple(float(v) for v in origin),
    )

    obstacles = []
    seen_ids = set()
    for i, od in enumerate(doc.get("obstacles", [])):
        where = f"obstacles[{i}]"
        if not isinstance(od, dict):
            raise ScenarioError(where, "must be an object")
        _reject_unknown(od, _OBSTACLE_KEYS, where)
        oid = od.get("id")
        if not isinstance(oid, int) or isinstance(oid, bool) or oid <= 0:
            raise ScenarioError(f"{where}.id", "must be a positive integer")
        if oid in seen_ids:
            raise ScenarioError(f"{where}.id", f"duplicate obstacle id {oid}")
        seen_ids.add(oid)
        obstacles.append(
            Obstacle(
                id=oid,
                x=_number(od, "x", where),
                y=_number(od, "y", where),
                heading=_number(od, "heading", where),
                speed=_number(od, "speed", where, default=0.0),
            )
        )

    start = doc.get("vehicle_start", [road.origin[0], road.origin[1], road.origin[2], 0.0])
    if not (isinstance(start, list) and len(start) == 4):
        raise ScenarioError("vehicle_start", "must be [x, y, heading, speed]")
    start = tuple(float(v) for v in start)
    if start[3] < 0:
        raise ScenarioError("vehicle_start", "speed must be >= 0")
    try:
        _, off = lateral_offset(road, start[0], start[1])
    except OffRoadError as e:
        raise ScenarioError("vehicle_start", str(e))
    if abs(off) > road.num_lanes * road.lane_width:
        raise ScenarioError("vehicle_start", f"{abs(off):.1f} m off the road center")

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ScenarioError("seed", "must be an unsigned 64-bit integer")

    preview = doc.get("preview_distances", list(DEFAULT_PREVIEW_DISTANCES))
    if not (isinstance(preview, list) and len(preview) == 3):
        raise ScenarioError("preview_distances", "must be 3 distances")
    preview = tuple(float(v) for v in preview)
    if not (0 < preview[0] < preview[1] < preview[2]):
        raise ScenarioError("preview_distances", "must be strictly increasing and > 0")

    gains_doc = doc.get("gains", {})
    if not isinstance(gains_doc, dict):
        raise ScenarioError("gains", "must be an object")
    _reject_unknown(gains_doc, _GAINS_KEYS, "gains")
    for k in gains_doc:
        _number(gains_doc, k, "gains")
    try:
        gains = CueingGains(**{k: float(v) for k, v in gains_doc.items()})
    except ValueError as e:
        raise ScenarioError("gains", str(e))

    return Scenario(
        road=road,
        obstacles=tuple(obstacles),
        vehicle_start=start,
        seed=seed,
        gains=gains,
        preview_distances=preview,
        source=text,
    )
