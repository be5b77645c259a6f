"""Fixed-step kinematic vehicle model and collision detection.

Longitudinal behavior is tuned exactly to the two published targets: full
throttle accelerates 0-60 mph in 12 s, full brake decelerates 60-0 mph in
4 s. There is deliberately no drag or rolling resistance, so both targets
hold exactly under the constant-acceleration model rather than
approximately.

Lateral behavior is a kinematic bicycle (wheelbase 2.7 m, 30 deg max road
wheel angle) integrated with explicit Euler. The planar model has no native
roll or pitch, so the cue-source rotations are synthesized: roll from
lateral acceleration (speed * yaw_rate) and pitch from longitudinal
acceleration. Steering-related constants are configuration, not tuned
reproductions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .world import Obstacle, wrap_angle

MPH_60 = 26.8224  # 60 mph in m/s
ACCEL_MAX = MPH_60 / 12.0  # m/s^2, full throttle
BRAKE_MAX = MPH_60 / 4.0  # m/s^2, full brake
WHEELBASE = 2.7  # m
STEER_MAX = math.radians(30.0)  # rad, road wheel angle at full steering input
ROLL_GAIN = 0.03  # rad per m/s^2 of lateral acceleration
PITCH_GAIN = -0.02  # rad per m/s^2 of longitudinal acceleration

VEHICLE_RADIUS = 2.0  # m, collision disc
OBSTACLE_RADIUS = 1.0
CONTACT_RANGE = VEHICLE_RADIUS + OBSTACLE_RADIUS
REARM_MARGIN = 0.5  # m past contact range before a new episode can fire


def _clamp(v: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, v))


@dataclass(frozen=True)
class DriverInput:
    steering: float = 0.0  # [-1, 1], positive = left
    throttle: float = 0.0  # [0, 1]
    brake: float = 0.0  # [0, 1]

    @classmethod
    def clamped(cls, steering: float, throttle: float, brake: float) -> "DriverInput":
        """Build an input with every channel clamped into range."""
        return cls(
            steering=_clamp(steering, -1.0, 1.0),
            throttle=_clamp(throttle, 0.0, 1.0),
            brake=_clamp(brake, 0.0, 1.0),
        )


ZERO_INPUT = DriverInput()


@dataclass(frozen=True)
class VehicleState:
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0  # always 0 in this planar model
    rot_x: float = 0.0  # roll cue source, rad
    rot_y: float = 0.0  # pitch cue source, rad
    rot_z: float = 0.0  # yaw/heading, rad, wrapped to (-pi, pi]
    speed: float = 0.0  # m/s, never negative
    yaw_rate: float = 0.0  # rad/s
    t: float = 0.0  # virtual seconds

    @classmethod
    def from_start(cls, start: tuple[float, float, float, float]) -> "VehicleState":
        x, y, heading, speed = start
        return cls(x=x, y=y, rot_z=wrap_angle(heading), speed=speed)


@dataclass(frozen=True)
class CollisionEvent:
    obstacle_id: int
    t: float
    relative_speed: float


def longitudinal_accel(inp: DriverInput, speed: float) -> float:
    """Throttle/brake acceleration. The non-negativity clamp lives in step."""
    return ACCEL_MAX * inp.throttle - BRAKE_MAX * inp.brake


def check_collision(vehicle: VehicleState, obstacles) -> CollisionEvent | None:
    """Stateless disc-overlap test; reports the nearest overlapping obstacle.

    Distance ties resolve to the smaller obstacle id.
    """
    hit = None
    for o in obstacles:
        d = math.hypot(o.x - vehicle.x, o.y - vehicle.y)
        if d < CONTACT_RANGE and (hit is None or (d, o.id) < hit[:2]):
            hit = (d, o.id, o)
    if hit is None:
        return None
    o = hit[2]
    vx = vehicle.speed * math.cos(vehicle.rot_z) - o.speed * math.cos(o.heading)
    vy = vehicle.speed * math.sin(vehicle.rot_z) - o.speed * math.sin(o.heading)
    return CollisionEvent(
        obstacle_id=o.id, t=vehicle.t, relative_speed=math.hypot(vx, vy)
    )


class CollisionTracker:
    """Per-obstacle contact-episode hysteresis.

    A contact fires exactly one event; the obstacle re-arms only once the
    separation exceeds the contact range by REARM_MARGIN.
    """

    def __init__(self):
        self._disarmed: set[int] = set()

    def update(self, vehicle: VehicleState, obstacles) -> CollisionEvent | None:
        for o in obstacles:
            if o.id in self._disarmed:
                d = math.hypot(o.x - vehicle.x, o.y - vehicle.y)
                if d > CONTACT_RANGE + REARM_MARGIN:
                    self._disarmed.discard(o.id)
        armed = [o for o in obstacles if o.id not in self._disarmed]
        event = check_collision(vehicle, armed)
        if event is not None:
            self._disarmed.add(event.obstacle_id)
        return event


def step(
    state: VehicleState,
    inp: DriverInput,
    obstacles,
    dt: float,
    tracker: CollisionTracker | None = None,
):
    """Advance one tick: vehicle kinematics, obstacle motion, collision test.

    Explicit Euler on the kinematic bicycle: derivatives are evaluated at
    the pre-step state, then speed is clamped at zero so braking never
    produces reverse motion. Returns (new_state, moved_obstacles, event);
    with a tracker the event stream is episode-deduplicated, without one
    every overlapping tick reports.
    """
    if dt <= 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    accel = longitudinal_accel(inp, state.speed)
    delta = STEER_MAX * inp.steering
    yaw_rate = state.speed * math.tan(delta) / WHEELBASE
    new = VehicleState(
        x=state.x + state.speed * math.cos(state.rot_z) * dt,
        y=state.y + state.speed * math.sin(state.rot_z) * dt,
        z=0.0,
        rot_x=ROLL_GAIN * state.speed * yaw_rate,
        rot_y=PITCH_GAIN * accel,
        rot_z=wrap_angle(state.rot_z + yaw_rate * dt),
        speed=max(0.0, state.speed + accel * dt),
        yaw_rate=yaw_rate,
        t=state.t + dt,
    )
    moved = tuple(o.moved(dt) for o in obstacles)
    if tracker is not None:
        event = tracker.update(new, moved)
    else:
        event = check_collision(new, moved)
    return new, moved, event
