"""Live-input gateway between the 200 Hz loop and a browser cockpit.

The bridge serves JSON snapshot frames (20 Hz, every 10th tick) over a
WebSocket at ws://HOST:PORT/drive and ingests input frames from the
cockpit. Inputs land in a single-slot mailbox with last-writer-wins
semantics: the freshest message before a tick becomes that tick's driver
input, and silence holds the previous input. Safety toggles latch until a
message explicitly changes them. The loop never blocks on the bridge.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass

from .dynamics import DriverInput
from .motion import SafetyState
from .telemetry import LoopView

DEFAULT_WS_PORT = 47010
WS_PATH = "/drive"

PHONE_ACKS = ("pickup", "touchscreen", "putdown")

_INPUT_KEYS = {
    "type", "steering", "throttle", "brake",
    "gate_closed", "seatbelt_on", "estop_local", "estop_remote",
    "phone_ack",
}
_TOGGLE_KEYS = ("gate_closed", "seatbelt_on", "estop_local", "estop_remote")


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class ParsedInput:
    input: DriverInput
    toggles: dict  # subset of _TOGGLE_KEYS
    phone_ack: str | None = None


def parse_input_message(obj) -> ParsedInput:
    """Validate one input frame; unknown fields and bad types are rejected."""
    if not isinstance(obj, dict):
        raise InputError("input frame must be a JSON object")
    if obj.get("type") != "input":
        raise InputError(f"unexpected frame type {obj.get('type')!r}")
    unknown = set(obj) - _INPUT_KEYS
    if unknown:
        raise InputError(f"unknown field(s): {', '.join(sorted(unknown))}")
    channels = {}
    for key in ("steering", "throttle", "brake"):
        v = obj.get(key, 0.0)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InputError(f"{key} must be a number")
        channels[key] = float(v)
    toggles = {}
    for key in _TOGGLE_KEYS:
        if key in obj:
            if not isinstance(obj[key], bool):
                raise InputError(f"{key} must be a boolean")
            toggles[key] = obj[key]
    ack = obj.get("phone_ack")
    if ack is not None and ack not in PHONE_ACKS:
        raise InputError(f"phone_ack must be one of {PHONE_ACKS}")
    return ParsedInput(input=DriverInput.clamped(**channels), toggles=toggles, phone_ack=ack)


def snapshot_frame(view: LoopView) -> dict:
    """JSON-ready snapshot of one tick for the cockpit."""
    nearest = {}
    for sensor in ("front", "left", "right"):
        readings = view.radar_by_sensor.get(sensor, [])
        if readings:
            r = readings[0]  # scans are sorted nearest-first
            nearest[sensor] = {"object_id": r.object_id, "range": r.range_m, "azimuth": r.azimuth}
        else:
            nearest[sensor] = None
    return {
        "type": "snapshot",
        "t_us": view.t_us,
        "vehicle": {
            "x": view.state.x,
            "y": view.state.y,
            "heading": view.state.rot_z,
            "speed": view.state.speed,
        },
        "attitude": {
            "pitch": view.attitude[0],
            "roll": view.attitude[1],
            "yaw": view.attitude[2],
            "heave": view.attitude[3],
        },
        "safety": {
            "gate_closed": view.safety.gate_closed,
            "seatbelt_on": view.safety.seatbelt_on,
            "estop_local": view.safety.estop_local,
            "estop_remote": view.safety.estop_remote,
            "motion_enabled": view.motion_enabled,
        },
        "shake_active": view.shake_active,
        "nearest": nearest,
        "lane_index": view.lane_index,
        "center_offset": view.lane_offset,
        "touch": list(view.touch_quadrants),
        "phone": {
            "last_kind": view.last_phone_kind,
            "pending_question": view.pending_question,
        },
    }


class CockpitBridge:
    """Mailbox and snapshot fan-out between the loop and cockpit clients.

    Loop-side hooks (called from the simulation thread):
        tick_input, current_safety, drain_phone_acks, publish
    Network side: handle_frame applies one received text frame and returns
    an error frame to send back, or None.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._input = DriverInput()
        self._safety = SafetyState()
        self._acks: list[str] = []
        self._clients: set = set()
        self.last_snapshot: dict | None = None

    # ---- loop side ----

    def tick_input(self) -> DriverInput:
        with self._lock:
            return self._input

    def current_safety(self) -> SafetyState:
        with self._lock:
            return self._safety

    def drain_phone_acks(self) -> list[str]:
        with self._lock:
            acks, self._acks = self._acks, []
            return acks

    def publish(self, view: LoopView) -> None:
        frame = snapshot_frame(view)
        text = json.dumps(frame)
        with self._lock:
            self.last_snapshot = frame
            clients = list(self._clients)
        for conn in clients:
            try:
                conn.send(text)
            except Exception:
                self._unregister(conn)

    # ---- network side ----

    def apply(self, parsed: ParsedInput) -> None:
        with self._lock:
            self._input = parsed.input
            if parsed.toggles:
                current = self._safety
                merged = {
                    key: parsed.toggles.get(key, getattr(current, key))
                    for key in _TOGGLE_KEYS
                }
                self._safety = SafetyState(**merged)
            if parsed.phone_ack is not None:
                self._acks.append(parsed.phone_ack)

    def handle_frame(self, text: str) -> str | None:
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            return json.dumps({"type": "error", "reason": f"bad JSON: {e.msg}"})
        try:
            parsed = parse_input_message(obj)
        except InputError as e:
            return json.dumps({"type": "error", "reason": str(e)})
        self.apply(parsed)
        return None

    def _register(self, conn) -> None:
        with self._lock:
            self._clients.add(conn)

    def _unregister(self, conn) -> None:
        with self._lock:
            self._clients.discard(conn)


class BridgeServer:
    """Threaded WebSocket server exposing a CockpitBridge at /drive."""

    def __init__(self, bridge: CockpitBridge, host: str = "127.0.0.1", port: int = DEFAULT_WS_PORT):
        from websockets.sync.server import serve

        self.bridge = bridge
        self._server = serve(self._handler, host, port)
        self.address = self._server.socket.getsockname()[:2]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    def _handler(self, conn):
        if conn.request.path != WS_PATH:
            conn.close(code=1008, reason=f"connect to {WS_PATH}")
            return
        self.bridge._register(conn)
        try:
            for message in conn:
                reply = self.bridge.handle_frame(message)
                if reply is not None:
                    conn.send(reply)
        except Exception:
            pass
        finally:
            self.bridge._unregister(conn)

    def start(self) -> "BridgeServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._thread.join(timeout=2.0)
