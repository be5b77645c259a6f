"""Idealized radar and lane-marker sensor emulation.

Both sensors return exact geometric ground truth: no noise, no occlusion,
no detection probability. The radar reports every obstacle inside its
angular sector and range; the lane-marker sensor reports boundary distances
and road curvature at the vehicle and at three preview stations ahead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import VehicleState
from .world import Road, lateral_offset, road_frame_at, wrap_angle


@dataclass(frozen=True)
class RadarConfig:
    mount: str  # "front" | "left" | "right"
    boresight: float  # rad, body frame
    fov: float  # rad, full width
    max_range: float  # m

    def __post_init__(self):
        if not 0 < self.fov <= math.pi:
            raise ValueError("fov must be in (0, pi]")
        if not self.max_range > 0:
            raise ValueError("max_range must be > 0")


FRONT_RADAR = RadarConfig("front", 0.0, math.radians(90.0), 150.0)
LEFT_RADAR = RadarConfig("left", math.pi / 2.0, math.radians(90.0), 50.0)
RIGHT_RADAR = RadarConfig("right", -math.pi / 2.0, math.radians(90.0), 50.0)
DEFAULT_RADARS = (FRONT_RADAR, LEFT_RADAR, RIGHT_RADAR)


@dataclass(frozen=True)
class RadarReading:
    object_id: int
    azimuth: float  # rad, body frame, positive left
    elevation: float  # rad, always 0 in the planar world
    range_m: float
    object_speed: float  # m/s, world-frame scalar speed
    object_heading: float  # rad, world frame


@dataclass(frozen=True)
class LaneStation:
    left_marker: float  # m to nearest boundary on the left
    right_marker: float  # m to nearest boundary on the right
    left_curb: float  # m to the leftmost boundary
    right_curb: float  # m to the rightmost boundary
    curvature: float  # 1/m


@dataclass(frozen=True)
class LaneMarkerReading:
    stations: tuple[LaneStation, LaneStation, LaneStation, LaneStation]


def radar_scan(config: RadarConfig, vehicle: VehicleState, obstacles) -> list[RadarReading]:
    """All obstacles inside the sensor sector, nearest first (ties by id)."""
    cos_h = math.cos(vehicle.rot_z)
    sin_h = math.sin(vehicle.rot_z)
    out = []
    for o in obstacles:
        dx = o.x - vehicle.x
        dy = o.y - vehicle.y
        bx = cos_h * dx + sin_h * dy
        by = -sin_h * dx + cos_h * dy
        rng = math.hypot(bx, by)
        if rng > config.max_range:
            continue
        azimuth = math.atan2(by, bx)
        if abs(wrap_angle(azimuth - config.boresight)) > config.fov / 2.0:
            continue
        out.append(RadarReading(o.id, azimuth, 0.0, rng, o.speed, o.heading))
    out.sort(key=lambda r: (r.range_m, r.object_id))
    return out


def _station(road: Road, s: float, px: float, py: float) -> LaneStation:
    (cx, cy, ch), curvature = road_frame_at(road, s)
    # vehicle offset projected on this station's left normal
    off = -math.sin(ch) * (px - cx) + math.cos(ch) * (py - cy)
    boundaries = road.boundary_offsets()
    left = [b for b in boundaries if b >= off]
    right = [b for b in boundaries if b <= off]
    return LaneStation(
        left_marker=(min(left) if left else max(boundaries)) - off,
        right_marker=off - (max(right) if right else min(boundaries)),
        left_curb=max(boundaries) - off,
        right_curb=off - min(boundaries),
        curvature=curvature,
    )


def lane_scan(road: Road, vehicle: VehicleState, preview) -> LaneMarkerReading:
    """Boundary distances and curvature at the vehicle and 3 preview stations.

    Station k sits on the center line at arc length s_vehicle + preview[k-1]
    (station 0 at the vehicle), clamped to the road end. Raises OffRoadError
    if the vehicle is outside the lateral_offset query band.
    """
    s0, _ = lateral_offset(road, vehicle.x, vehicle.y)
    stations = [_station(road, s0, vehicle.x, vehicle.y)]
    for d in preview:
        s = min(s0 + d, road.total_length)
        stations.append(_station(road, s, vehicle.x, vehicle.y))
    return LaneMarkerReading(stations=tuple(stations))
