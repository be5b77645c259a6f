"""The 200 Hz orchestration loop, per-component recording, and replay.

Virtual time is the source of truth: each tick advances exactly 5 ms and
every record carries the tick's integer microsecond timestamp, so a run is
a pure function of (scenario, config, input script). Wall-clock pacing
(realtime=True) only inserts sleeps and never affects state.

A run logs one table per component:
    input      t_us,steering,throttle,brake          one row per tick
    vehicle    t_us,x,y,z,rot_x,rot_y,rot_z,speed,heading,yaw_rate
    radar      long format, one row per reading per sensor per tick
    lane       one row per station (0..3) per tick
    touch      every second tick (the 10 ms grid)
    phone      event rows as they fire
    platform   the emitted command stream, one row per tick

`write_log`/`read_log` round-trip a RunLog through CSV files plus a JSON
header; `replay` turns a log back into an input source.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .dynamics import CollisionTracker, DriverInput, VehicleState, step
from .monitor import (
    DEFAULT_HAND_DISTANCES,
    PhoneSource,
    TouchCalibration,
    encode_phone,
    encode_touch,
    sample_touch,
)
from .motion import (
    FLAG_ESTOP,
    FLAG_MOTION,
    FLAG_SHAKE,
    INACTIVE_SHAKE,
    PlatformEndpoint,
    SafetyState,
    cue,
    encode_command,
    trigger_shake,
)
from .sensors import DEFAULT_RADARS, lane_scan, radar_scan
from .world import OffRoadError, Scenario, lateral_offset

TICK_SECONDS = 0.005  # 200 Hz
TICK_US = 5000
TOUCH_EVERY = 2  # touch stream runs at half rate: every 10 ms
SNAPSHOT_EVERY = 10  # cockpit snapshots at 20 Hz

SCHEMAS = {
    "input": ("t_us", "steering", "throttle", "brake"),
    "vehicle": ("t_us", "x", "y", "z", "rot_x", "rot_y", "rot_z", "speed", "heading", "yaw_rate"),
    "radar": ("t_us", "sensor", "object_id", "azimuth", "elevation", "range", "object_speed", "object_heading"),
    "lane": ("t_us", "station", "left_marker", "right_marker", "left_curb", "right_curb", "curvature"),
    "touch": ("t_us", "q1", "q2", "q3", "q4"),
    "phone": ("t_us", "kind", "question"),
    "platform": ("t_us", "seq", "pitch", "roll", "yaw", "heave", "flags"),
}

# CSV cell parsers, by column
_INT_COLUMNS = {"t_us", "station", "object_id", "seq", "flags", "q1", "q2", "q3", "q4"}
_STR_COLUMNS = {"sensor", "kind", "question"}


class SimulationError(RuntimeError):
    pass


class InputExhausted(SimulationError):
    def __init__(self, tick: int):
        self.tick = tick
        super().__init__(f"input source exhausted at tick {tick}")


class SchemaError(ValueError):
    pass


def scenario_checksum(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class LoopConfig:
    duration: float  # virtual seconds
    tick: float = TICK_SECONDS
    realtime: bool = False
    seed: int | None = None  # None: use the scenario seed

    def __post_init__(self):
        if self.tick != TICK_SECONDS:
            raise ValueError(f"tick is fixed at {TICK_SECONDS} s by the 200 Hz loop contract")
        if not self.duration > 0:
            raise ValueError("duration must be > 0")

    @property
    def ticks(self) -> int:
        return round(self.duration / self.tick)


@dataclass
class RunLog:
    header: dict
    scenario_text: str = ""
    input: list = field(default_factory=list)
    vehicle: list = field(default_factory=list)
    radar: list = field(default_factory=list)
    lane: list = field(default_factory=list)
    touch: list = field(default_factory=list)
    phone: list = field(default_factory=list)
    platform: list = field(default_factory=list)

    def table(self, name: str) -> list:
        return getattr(self, name)


@dataclass(frozen=True)
class LoopView:
    """Raw per-tick state handed to the cockpit bridge for snapshots."""

    t_us: int
    state: VehicleState
    attitude: tuple[float, float, float, float]
    safety: SafetyState
    motion_enabled: bool
    shake_active: bool
    radar_by_sensor: dict
    lane_offset: float
    lane_index: int
    touch_quadrants: tuple[bool, bool, bool, bool]
    last_phone_kind: str | None
    pending_question: str | None


def scripted_inputs(rows):
    """Input source from (steering, throttle, brake) triples, clamped."""
    for r in rows:
        yield DriverInput.clamped(r[0], r[1], r[2])


def constant_input(inp: DriverInput = DriverInput()):
    """Endless input source holding one value (default: hands off)."""
    while True:
        yield inp


class ReplaySource:
    """Input source reproducing a logged input table tick-exactly.

    Out-of-range values in a tampered log are re-clamped; `reclamped`
    counts how many rows needed it.
    """

    def __init__(self, log: RunLog):
        self._rows = log.input
        self._i = 0
        self.reclamped = 0

    def __iter__(self):
        return self

    def __next__(self) -> DriverInput:
        if self._i >= len(self._rows):
            raise StopIteration
        _, steering, throttle, brake = self._rows[self._i]
        self._i += 1
        inp = DriverInput.clamped(steering, throttle, brake)
        if (inp.steering, inp.throttle, inp.brake) != (steering, throttle, brake):
            self.reclamped += 1
        return inp


def replay(log: RunLog) -> ReplaySource:
    return ReplaySource(log)


def run(
    scenario: Scenario,
    config: LoopConfig,
    driver=None,
    *,
    bridge=None,
    endpoint: PlatformEndpoint | None = None,
    radars=DEFAULT_RADARS,
    touch_cal: TouchCalibration = TouchCalibration(),
    hand_distances=DEFAULT_HAND_DISTANCES,
    command_sink=None,
    touch_sink=None,
    phone_sink=None,
) -> RunLog:
    """Run the fixed-step loop and return the complete RunLog.

    Exactly one of `driver` (an iterator of DriverInput, one per tick) or
    `bridge` (a live cockpit bridge) supplies inputs. Platform commands are
    always ingested by the simulated `endpoint` (a fresh one if not given);
    the optional sinks additionally receive the encoded datagrams.
    """
    if (driver is None) == (bridge is None):
        raise ValueError("provide exactly one of driver or bridge")
    if bridge is not None:
        from .analysis import lane_index  # deferred: analysis sits above telemetry
    seed = scenario.seed if config.seed is None else config.seed
    endpoint = endpoint if endpoint is not None else PlatformEndpoint()
    log = RunLog(
        header={
            "scenario_sha256": scenario_checksum(scenario.source),
            "seed": seed,
            "tick": config.tick,
            "version": __version__,
        },
        scenario_text=scenario.source,
    )

    state = VehicleState.from_start(scenario.vehicle_start)
    obstacles = scenario.obstacles
    gains = scenario.gains
    tracker = CollisionTracker()
    shake = INACTIVE_SHAKE
    safety = SafetyState()
    phone = PhoneSource(seed, interactive=bridge is not None)
    hands = hand_distances if callable(hand_distances) else (lambda t: hand_distances)
    src = iter(driver) if driver is not None else None
    touch_seq = 0
    phone_seq = 0
    last_touch = (False, False, False, False)

    wall_start = time.perf_counter()
    for i in range(config.ticks):
        t_us = i * TICK_US
        t_s = t_us / 1e6
        if config.realtime:
            lag = wall_start + t_s - time.perf_counter()
            if lag > 0:
                time.sleep(lag)

        if bridge is not None:
            inp = bridge.tick_input()
            safety = bridge.current_safety()
            for kind in bridge.drain_phone_acks():
                ack = phone.acknowledge(kind, t_us)
                if ack is not None:
                    log.phone.append((t_us, ack.kind, ack.question))
                    if phone_sink is not None:
                        phone_sink(encode_phone(ack, phone_seq))
                    phone_seq += 1
        else:
            try:
                inp = next(src)
            except StopIteration:
                raise InputExhausted(i) from None
        log.input.append((t_us, inp.steering, inp.throttle, inp.brake))

        try:
            state, obstacles, event = step(state, inp, obstacles, config.tick, tracker)
        except OffRoadError as e:
            raise SimulationError(f"tick {i}: {e}") from e
        if event is not None:
            shake = trigger_shake(gains, t_s)

        cmd = cue(state, gains, shake, safety, seq=i, t_us=t_us)
        packet = encode_command(cmd)
        endpoint.ingest(packet)
        if command_sink is not None:
            command_sink(packet)
        flags = (
            (FLAG_SHAKE if cmd.shake_active else 0)
            | (FLAG_ESTOP if cmd.estop else 0)
            | (FLAG_MOTION if cmd.motion_enabled else 0)
        )
        log.platform.append((t_us, cmd.seq, cmd.pitch, cmd.roll, cmd.yaw, cmd.heave, flags))

        readings_by_sensor = {}
        for radar in radars:
            readings = radar_scan(radar, state, obstacles)
            readings_by_sensor[radar.mount] = readings
            for r in readings:
                log.radar.append(
                    (t_us, radar.mount, r.object_id, r.azimuth, r.elevation,
                     r.range_m, r.object_speed, r.object_heading)
                )

        try:
            lane = lane_scan(scenario.road, state, scenario.preview_distances)
        except OffRoadError as e:
            raise SimulationError(f"tick {i}: {e}") from e
        for k, st in enumerate(lane.stations):
            log.lane.append(
                (t_us, k, st.left_marker, st.right_marker, st.left_curb, st.right_curb, st.curvature)
            )

        log.vehicle.append(
            (t_us, state.x, state.y, state.z, state.rot_x, state.rot_y, state.rot_z,
             state.speed, state.rot_z, state.yaw_rate)
        )

        if i % TOUCH_EVERY == 0:
            sample = sample_touch(hands(t_s), touch_cal, t_us)
            last_touch = sample.quadrants
            log.touch.append((t_us, *(int(q) for q in sample.quadrants)))
            if touch_sink is not None:
                touch_sink(encode_touch(sample, touch_seq))
            touch_seq += 1

        for ev in phone.poll(t_us):
            log.phone.append((t_us, ev.kind, ev.question))
            if phone_sink is not None:
                phone_sink(encode_phone(ev, phone_seq))
            phone_seq += 1

        if bridge is not None and i % SNAPSHOT_EVERY == 0:
            _, offset = lateral_offset(scenario.road, state.x, state.y)
            bridge.publish(
                LoopView(
                    t_us=t_us,
                    state=state,
                    attitude=tuple(endpoint.report()["attitude"]),
                    safety=safety,
                    motion_enabled=cmd.motion_enabled,
                    shake_active=cmd.shake_active,
                    radar_by_sensor=readings_by_sensor,
                    lane_offset=offset,
                    lane_index=lane_index(offset, scenario.road),
                    touch_quadrants=last_touch,
                    last_phone_kind=phone.last_kind,
                    pending_question=phone.pending_question,
                )
            )
    return log


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_log(log: RunLog, directory) -> list[Path]:
    """Write one CSV per table plus header.json (and the scenario document).

    Overwrites idempotently; float cells use repr so values round-trip
    exactly through read_log.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, columns in SCHEMAS.items():
        path = directory / f"{name}.csv"
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(columns)
            for row in log.table(name):
                w.writerow([_format_cell(v) for v in row])
        written.append(path)
    header_path = directory / "header.json"
    header_path.write_text(json.dumps(log.header) + "\n", encoding="utf-8")
    written.append(header_path)
    if log.scenario_text:
        scn_path = directory / "scenario.json"
        scn_path.write_text(log.scenario_text, encoding="utf-8")
        written.append(scn_path)
    return written


def _parse_row(columns, raw, path):
    if len(raw) != len(columns):
        raise SchemaError(f"{path}: expected {len(columns)} cells, got {len(raw)}")
    out = []
    for col, cell in zip(columns, raw):
        if col in _STR_COLUMNS:
            out.append(cell)
        elif col in _INT_COLUMNS:
            out.append(int(cell))
        else:
            out.append(float(cell))
    return tuple(out)


def read_log(directory) -> RunLog:
    """Read a directory written by write_log back into an equal RunLog.

    Raises SchemaError naming any missing table or column; warns if the
    stored scenario document no longer matches the header checksum.
    """
    directory = Path(directory)
    header_path = directory / "header.json"
    if not header_path.exists():
        raise SchemaError(f"missing table file: {header_path}")
    header = json.loads(header_path.read_text(encoding="utf-8"))
    scenario_text = ""
    scn_path = directory / "scenario.json"
    if scn_path.exists():
        scenario_text = scn_path.read_text(encoding="utf-8")
        if scenario_checksum(scenario_text) != header.get("scenario_sha256"):
            warnings.warn(
                f"{scn_path} does not match the header checksum; "
                "the log may not belong to this scenario"
            )
    log = RunLog(header=header, scenario_text=scenario_text)
    for name, columns in SCHEMAS.items():
        path = directory / f"{name}.csv"
        if not path.exists():
            raise SchemaError(f"missing table file: {path}")
        with open(path, newline="", encoding="utf-8") as f:
            reader = csv.reader(f)
            try:
                got = tuple(next(reader))
            except StopIteration:
                raise SchemaError(f"{path}: empty file, expected header row") from None
            if got != columns:
                missing = set(columns) - set(got)
                extra = set(got) - set(columns)
                parts = []
                if missing:
                    parts.append(f"missing column(s): {', '.join(sorted(missing))}")
                if extra:
                    parts.append(f"unexpected column(s): {', '.join(sorted(extra))}")
                if not parts:
                    parts.append(f"column order {got} != {columns}")
                raise SchemaError(f"{path}: " + "; ".join(parts))
            table = log.table(name)
            for raw in reader:
                table.append(_parse_row(columns, raw, path))
    return log
