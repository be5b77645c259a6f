"""Driver-monitoring emulation: steering-wheel touch sensor and texting app.

The steering wheel is divided into four quadrants, each a capacitive
sensor sampled every 10 ms of virtual time. The response model is a
Lorentzian decay with distance, scaled by the sense resistor, except the
13 kOhm calibration which is modeled as purely boolean: full response at
contact, nothing otherwise. All counts values are model constants.

The texting app rings at Uniform[30, 60] s intervals with a question; each
episode then runs ring -> pickup -> touchscreen* -> putdown. In scripted
runs the whole episode is generated from the seeded stream; in interactive
runs only rings are scheduled and the pickup/touchscreen/putdown events
come from driver acknowledgments.

Both streams can be carried over local UDP (ports 47002/47003 by default):
  touch: "TS01" + seq u32 + t_us u64 + quadrant bitmask u8  (17 bytes, LE)
  phone: "PH01" + seq u32 + t_us u64 + kind u8 + question_len u16 + UTF-8
"""

from __future__ import annotations

import math
import random
import struct
from dataclasses import dataclass

RESISTOR_VALUES = (5100, 13000, 22000, 51000, 100000)
BOOLEAN_RESISTOR = 13000  # gives no response unless the hand is in contact
TOUCH_PERIOD_US = 10_000

RING_GAP_RANGE = (30.0, 60.0)  # s between rings
PICKUP_DELAY_RANGE = (1.0, 3.0)  # s from ring to pickup
TOUCH_COUNT_RANGE = (2, 6)  # touchscreen events per episode
TOUCH_SPACING_RANGE = (0.5, 1.5)  # s between touchscreen events / putdown

PHONE_KINDS = ("ring", "pickup", "touchscreen", "putdown")

QUESTIONS = (
    "What time does the meeting start tomorrow?",
    "Can you pick up groceries on the way home?",
    "What was the name of that restaurant downtown?",
    "Did you watch the game last night?",
    "What should we get mom for her birthday?",
    "Are you free for lunch on Thursday?",
    "What's the wifi password again?",
    "How far along is the report?",
    "Which movie do you want to see this weekend?",
    "When does your flight land?",
    "Did you feed the cat this morning?",
    "What's the address for the party?",
)

TOUCH_MAGIC = b"TS01"
PHONE_MAGIC = b"PH01"
_TOUCH_STRUCT = struct.Struct("<4sIQB")  # magic, seq, t_us, quadrant bitmask
_PHONE_HEAD = struct.Struct("<4sIQBH")  # magic, seq, t_us, kind, question_len

DEFAULT_TOUCH_ADDR = ("127.0.0.1", 47002)
DEFAULT_PHONE_ADDR = ("127.0.0.1", 47003)

# both hands on the wheel, on quadrants 1 and 2
DEFAULT_HAND_DISTANCES = (0.0, 0.0, math.inf, math.inf)


@dataclass(frozen=True)
class TouchCalibration:
    resistor_ohms: int = BOOLEAN_RESISTOR
    c0: int = 1000  # counts at contact
    d_half: float = 0.02  # m, half-response distance
    threshold: int = 500  # counts, trigger level

    def __post_init__(self):
        if self.resistor_ohms not in RESISTOR_VALUES:
            raise ValueError(f"resistor_ohms must be one of {RESISTOR_VALUES}")
        if not self.c0 > self.threshold > 0:
            raise ValueError("need c0 > threshold > 0")
        if not self.d_half > 0:
            raise ValueError("d_half must be > 0")


@dataclass(frozen=True)
class TouchSample:
    t_us: int
    quadrants: tuple[bool, bool, bool, bool]


@dataclass(frozen=True)
class PhoneEvent:
    t_us: int
    kind: str
    question: str = ""


def touch_response(distance: float, cal: TouchCalibration) -> int:
    """Sensor counts for a hand at the given distance from the pad."""
    if distance < 0:
        raise ValueError("distance must be >= 0")
    if cal.resistor_ohms == BOOLEAN_RESISTOR:
        return cal.c0 if distance == 0.0 else 0
    scale = cal.resistor_ohms / BOOLEAN_RESISTOR
    return round(cal.c0 * scale / (1.0 + (distance / cal.d_half) ** 2))


def sample_touch(hand_distances, cal: TouchCalibration, t_us: int) -> TouchSample:
    """One 10 ms sample: quadrant k triggers when its counts reach threshold."""
    if t_us % TOUCH_PERIOD_US != 0:
        raise ValueError(f"t_us={t_us} is off the 10 ms sample grid")
    return TouchSample(
        t_us=t_us,
        quadrants=tuple(touch_response(d, cal) >= cal.threshold for d in hand_distances),
    )


class PhoneSource:
    """Deterministic texting-distraction event source.

    Scheduled event times are continuous; `poll` releases events whose
    scheduled time has passed, stamped with the polling tick's t_us.
    `ring_times` accumulates the scheduled ring times for inspection.
    """

    def __init__(self, seed: int, interactive: bool = False):
        self._rng = random.Random(seed)
        self.interactive = interactive
        self.ring_times: list[float] = []
        self._pending: list[tuple[float, str, str]] = []  # (sched_s, kind, question)
        self._next_ring = self._rng.uniform(*RING_GAP_RANGE)
        # interactive episode state: kind of the last event in the episode
        self._episode_stage = "idle"
        self.pending_question: str | None = None
        self.last_kind: str | None = None

    def _generate_until(self, t: float) -> None:
        while self._next_ring <= t:
            ring_t = self._next_ring
            self.ring_times.append(ring_t)
            question = self._rng.choice(QUESTIONS)
            self._pending.append((ring_t, "ring", question))
            if not self.interactive:
                at = ring_t + self._rng.uniform(*PICKUP_DELAY_RANGE)
                self._pending.append((at, "pickup", ""))
                for _ in range(self._rng.randint(*TOUCH_COUNT_RANGE)):
                    at += self._rng.uniform(*TOUCH_SPACING_RANGE)
                    self._pending.append((at, "touchscreen", ""))
                at += self._rng.uniform(*TOUCH_SPACING_RANGE)
                self._pending.append((at, "putdown", ""))
            self._next_ring = ring_t + self._rng.uniform(*RING_GAP_RANGE)

    def poll(self, t_us: int) -> list[PhoneEvent]:
        """Events due by t_us, stamped on the tick boundary."""
        t = t_us / 1e6
        self._generate_until(t)
        out = []
        while self._pending and self._pending[0][0] <= t:
            _, kind, question = self._pending.pop(0)
            out.append(PhoneEvent(t_us=t_us, kind=kind, question=question))
            self.last_kind = kind
            if kind == "ring":
                self._episode_stage = "ringing"
                self.pending_question = question
            elif kind == "putdown":
                self._episode_stage = "idle"
                self.pending_question = None
        return out

    def acknowledge(self, kind: str, t_us: int) -> PhoneEvent | None:
        """Interactive driver response; out-of-order acks are ignored."""
        allowed = {
            "ringing": ("pickup",),
            "picked": ("touchscreen", "putdown"),
            "touching": ("touchscreen", "putdown"),
        }.get(self._episode_stage, ())
        if kind not in allowed:
            return None
        self._episode_stage = {
            "pickup": "picked",
            "touchscreen": "touching",
            "putdown": "idle",
        }[kind]
        if kind == "putdown":
            self.pending_question = None
        self.last_kind = kind
        return PhoneEvent(t_us=t_us, kind=kind)


def encode_touch(sample: TouchSample, seq: int) -> bytes:
    mask = sum(1 << i for i, q in enumerate(sample.quadrants) if q)
    return _TOUCH_STRUCT.pack(TOUCH_MAGIC, seq, sample.t_us, mask)


def decode_touch(data: bytes) -> tuple[int, TouchSample]:
    if len(data) != _TOUCH_STRUCT.size:
        raise ValueError(f"touch datagram must be {_TOUCH_STRUCT.size} bytes")
    magic, seq, t_us, mask = _TOUCH_STRUCT.unpack(data)
    if magic != TOUCH_MAGIC:
        raise ValueError(f"bad touch magic {magic!r}")
    quadrants = tuple(bool(mask & (1 << i)) for i in range(4))
    return seq, TouchSample(t_us=t_us, quadrants=quadrants)


def encode_phone(event: PhoneEvent, seq: int) -> bytes:
    q = event.question.encode("utf-8")
    kind = PHONE_KINDS.index(event.kind)
    return _PHONE_HEAD.pack(PHONE_MAGIC, seq, event.t_us, kind, len(q)) + q


def decode_phone(data: bytes) -> tuple[int, PhoneEvent]:
    if len(data) < _PHONE_HEAD.size:
        raise ValueError(f"phone datagram must be >= {_PHONE_HEAD.size} bytes")
    magic, seq, t_us, kind, qlen = _PHONE_HEAD.unpack(data[: _PHONE_HEAD.size])
    if magic != PHONE_MAGIC:
        raise ValueError(f"bad phone magic {magic!r}")
    if kind >= len(PHONE_KINDS):
        raise ValueError(f"unknown phone event kind {kind}")
    q = data[_PHONE_HEAD.size :]
    if len(q) != qlen:
        raise ValueError(f"question length mismatch: header says {qlen}, got {len(q)}")
    return seq, PhoneEvent(t_us=t_us, kind=PHONE_KINDS[kind], question=q.decode("utf-8"))
