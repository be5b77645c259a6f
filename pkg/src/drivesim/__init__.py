"""Desk-scale human-in-the-loop driving simulator testbed.

A deterministic 200 Hz vehicle/motion-cueing loop speaking a packed UDP
protocol to a simulated motion platform, with emulated driver-monitoring
sensors (steering-wheel touch quadrants, texting distraction), per-component
CSV logging, deterministic replay, and an analysis/plotting pipeline.
"""

__version__ = "0.1.0"

from .world import Road, RoadSegment, Obstacle, Scenario, load_scenario
from .dynamics import DriverInput, VehicleState, CollisionEvent
from .motion import CueingGains, PlatformCommand, SafetyState, ShakeState, PlatformEndpoint
from .telemetry import LoopConfig, RunLog, run, write_log, read_log, replay

__all__ = [
    "Road",
    "RoadSegment",
    "Obstacle",
    "Scenario",
    "load_scenario",
    "DriverInput",
    "VehicleState",
    "CollisionEvent",
    "CueingGains",
    "PlatformCommand",
    "SafetyState",
    "ShakeState",
    "PlatformEndpoint",
    "LoopConfig",
    "RunLog",
    "run",
    "write_log",
    "read_log",
    "replay",
    "__version__",
]
