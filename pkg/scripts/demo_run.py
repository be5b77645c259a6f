"""End-to-end demo: lane-keeping drive with a lane change, logged and plotted.

A closed-loop pre-pass steers the kinematic model down the road (with one
lane change halfway) and records the per-tick inputs; the recorded script
then drives the real instrumented run, exactly reproducing the trajectory.

    python scripts/demo_run.py [OUT_DIR]
"""

import json
import math
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from drivesim.analysis import analyze
from drivesim.dynamics import STEER_MAX, WHEELBASE, DriverInput, VehicleState, step
from drivesim.motion import PlatformEndpoint
from drivesim.telemetry import LoopConfig, run, scripted_inputs, write_log
from drivesim.world import lateral_offset, load_scenario, road_frame_at, wrap_angle

SCENARIO = {
    "road": {
        "segments": [
            {"kind": "straight", "length": 300.0},
            {"kind": "arc", "length": 250.0, "curvature": 0.004},
            {"kind": "straight", "length": 150.0},
        ],
        "lane_width": 3.5,
        "num_lanes": 2,
        "origin": [0, 0, 0],
    },
    "obstacles": [
        {"id": 1, "x": 120.0, "y": -1.75, "heading": 0.0, "speed": 0.0},
        {"id": 2, "x": 5.0, "y": 18.0, "heading": 0.0, "speed": 0.0},
        {"id": 3, "x": 60.0, "y": -22.0, "heading": 0.0, "speed": 1.5},
    ],
    "vehicle_start": [0.0, -1.75, 0.0, 0.0],
    "seed": 2026,
    "gains": {"shake_magnitude": 0.05, "shake_frequency": 8.0, "shake_duration": 1.0},
}

DURATION = 40.0
LANE_CHANGE_AT = 18.0  # s: move from lane 0 to lane 1


def lane_keeping_script(scenario, config):
    """Pre-pass: record inputs from a simple lane-keeping steering law."""
    road = scenario.road
    state = VehicleState.from_start(scenario.vehicle_start)
    obstacles = scenario.obstacles
    triples = []
    for i in range(config.ticks):
        t = i * config.tick
        throttle = 1.0 if state.speed < 14.0 else 0.0  # no drag: coasting holds speed
        target = -road.lane_width / 2.0 if t < LANE_CHANGE_AT else road.lane_width / 2.0
        s, off = lateral_offset(road, state.x, state.y)
        (_, _, road_heading), curvature = road_frame_at(road, s)
        heading_error = wrap_angle(state.rot_z - road_heading)
        # curvature feedforward plus offset/heading feedback on the wheel angle
        delta = math.atan(WHEELBASE * curvature) - 0.05 * (off - target) - 0.9 * heading_error
        steering = max(-1.0, min(1.0, delta / STEER_MAX))
        triples.append((steering, throttle, 0.0))
        inp = DriverInput.clamped(steering, throttle, 0.0)
        state, obstacles, _ = step(state, inp, obstacles, config.tick)
    return triples


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "demo_out"
    doc = json.dumps(SCENARIO, indent=2)
    scenario = load_scenario(doc)
    config = LoopConfig(duration=DURATION)
    endpoint = PlatformEndpoint()

    script = lane_keeping_script(scenario, config)
    log = run(scenario, config, scripted_inputs(script), endpoint=endpoint)
    write_log(log, out)
    analyze(out)

    final = log.vehicle[-1]
    print(f"run: {DURATION:.0f} s virtual, {len(log.vehicle)} ticks")
    print(f"final pose: x={final[1]:.1f} m, y={final[2]:.1f} m, speed={final[7]:.1f} m/s")
    print(f"radar rows: {len(log.radar)}, phone events: {len(log.phone)}")
    print(f"platform endpoint: {endpoint.report()}")
    print(f"outputs in {out}/ (open plot.svg for the plan-view run plot)")


if __name__ == "__main__":
    main()
