"""Motion cueing, safety interlocks, and the platform command wire protocol.

The platform has four axes: pitch, roll, yaw, and heave. Commands are
packed into fixed 38-byte little-endian datagrams:

    offset  size  field
    0       4     magic "FD01"
    4       1     version (0x01)
    5       1     flags: bit0 shake_active, bit1 estop, bit2 motion_enabled
    6       4     seq, u32
    10      8     t_us, u64 (virtual microseconds)
    18      16    pitch, roll, yaw (rad), heave (m) as IEEE-754 float32
    34      4     CRC-32 (IEEE polynomial, reflected) over bytes 0..33

Pitch/roll clamp to +/-0.3491 rad (20 deg) and heave to +/-0.1 m; yaw is a
continuous-rotation axis and is never clamped.

`PlatformEndpoint` is the simulated platform-control computer: it validates
the stream, tracks sequence gaps and CRC errors, and latches to neutral on
an emergency stop until an explicit all-clear command arrives.
"""

from __future__ import annotations

import json
import math
import socket
import struct
import threading
import zlib
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .dynamics import VehicleState

PITCH_LIMIT = 0.3491  # rad (20 deg)
ROLL_LIMIT = 0.3491
HEAVE_LIMIT = 0.1  # m

MAGIC = b"FD01"
VERSION = 1
PACKET_LEN = 38
_BODY = struct.Struct("<4sBBIQ4f")  # magic, version, flags, seq, t_us, 4 axes
_CRC = struct.Struct("<I")

FLAG_SHAKE = 0x01
FLAG_ESTOP = 0x02
FLAG_MOTION = 0x04

DEFAULT_PLATFORM_ADDR = ("127.0.0.1", 47001)


@dataclass(frozen=True)
class CueingGains:
    """Axis gains plus the collision-shake envelope parameters."""

    k_pitch: float = 1.0
    k_roll: float = 1.0
    k_yaw: float = 1.0
    k_heave: float = 1.0
    shake_magnitude: float = 0.05  # rad, peak
    shake_frequency: float = 8.0  # Hz
    shake_duration: float = 1.0  # s

    def __post_init__(self):
        if not self.shake_duration > 0:
            raise ValueError("shake_duration must be > 0")
        if not self.shake_frequency > 0:
            raise ValueError("shake_frequency must be > 0")
        for name in ("k_pitch", "k_roll", "k_yaw", "k_heave", "shake_magnitude"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class SafetyState:
    """Interlock inputs. Motion is permitted only with every condition OK."""

    gate_closed: bool = True
    seatbelt_on: bool = True
    estop_local: bool = False
    estop_remote: bool = False

    @property
    def motion_permitted(self) -> bool:
        return (
            self.gate_closed
            and self.seatbelt_on
            and not self.estop_local
            and not self.estop_remote
        )

    @property
    def estop_active(self) -> bool:
        return self.estop_local or self.estop_remote


@dataclass(frozen=True)
class ShakeState:
    active: bool = False
    t_start: float = 0.0
    magnitude: float = 0.0


INACTIVE_SHAKE = ShakeState()


@dataclass(frozen=True)
class PlatformCommand:
    seq: int
    t_us: int
    pitch: float = 0.0
    roll: float = 0.0
    yaw: float = 0.0
    heave: float = 0.0
    shake_active: bool = False
    estop: bool = False
    motion_enabled: bool = False


def trigger_shake(gains: CueingGains, t: float) -> ShakeState:
    """Start (or restart) the collision shake at time t."""
    return ShakeState(active=True, t_start=t, magnitude=gains.shake_magnitude)


def shake_offset(shake: ShakeState, gains: CueingGains, t: float) -> tuple[float, float]:
    """Pitch and heave additions from the shake envelope at time t.

    A decaying sinusoid: magnitude * exp(-3*tau/duration) * sin(2*pi*f*tau),
    exactly zero once tau reaches the shake duration. Heave follows the
    pitch waveform scaled to a 0.05 m peak.
    """
    if not shake.active:
        return 0.0, 0.0
    tau = t - shake.t_start
    if tau < 0.0 or tau >= gains.shake_duration:
        return 0.0, 0.0
    pitch_off = (
        shake.magnitude
        * math.exp(-3.0 * tau / gains.shake_duration)
        * math.sin(2.0 * math.pi * gains.shake_frequency * tau)
    )
    heave_off = 0.05 * (pitch_off / max(shake.magnitude, 1e-12))
    return pitch_off, heave_off


def _clamp(v: float, limit: float) -> float:
    return max(-limit, min(limit, v))


def cue(
    vstate: "VehicleState",
    gains: CueingGains,
    shake: ShakeState,
    safety: SafetyState,
    seq: int,
    t_us: int | None = None,
) -> PlatformCommand:
    """Map a vehicle state to a platform command.

    If the interlock fails every axis is neutral and motion_enabled is
    clear; the estop flag mirrors the estop inputs either way.
    """
    if t_us is None:
        t_us = round(vstate.t * 1e6)
    if not safety.motion_permitted:
        return PlatformCommand(
            seq=seq,
            t_us=t_us,
            estop=safety.estop_active,
            motion_enabled=False,
        )
    pitch_off, heave_off = shake_offset(shake, gains, t_us / 1e6)
    shake_live = shake.active and (t_us / 1e6 - shake.t_start) < gains.shake_duration
    return PlatformCommand(
        seq=seq,
        t_us=t_us,
        pitch=_clamp(gains.k_pitch * vstate.rot_y + pitch_off, PITCH_LIMIT),
        roll=_clamp(gains.k_roll * vstate.rot_x, ROLL_LIMIT),
        yaw=gains.k_yaw * vstate.rot_z,
        heave=_clamp(gains.k_heave * 0.0 + heave_off, HEAVE_LIMIT),
        shake_active=shake_live,
        estop=False,
        motion_enabled=True,
    )


class DecodeError(ValueError):
    """A platform command datagram failed validation."""


class BadLength(DecodeError):
    pass


class BadMagic(DecodeError):
    pass


class BadVersion(DecodeError):
    pass


class BadCrc(DecodeError):
    pass


def encode_command(cmd: PlatformCommand) -> bytes:
    """Pack a command into its 38-byte datagram. Axes narrow to float32."""
    flags = (
        (FLAG_SHAKE if cmd.shake_active else 0)
        | (FLAG_ESTOP if cmd.estop else 0)
        | (FLAG_MOTION if cmd.motion_enabled else 0)
    )
    body = _BODY.pack(
        MAGIC, VERSION, flags, cmd.seq, cmd.t_us,
        cmd.pitch, cmd.roll, cmd.yaw, cmd.heave,
    )
    return body + _CRC.pack(zlib.crc32(body))


def decode_command(data: bytes) -> PlatformCommand:
    """Unpack a datagram, validating length, magic, version, and CRC."""
    if len(data) != PACKET_LEN:
        raise BadLength(f"expected {PACKET_LEN} bytes, got {len(data)}")
    body, (crc,) = data[:-4], _CRC.unpack(data[-4:])
    magic, version, flags, seq, t_us, pitch, roll, yaw, heave = _BODY.unpack(body)
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}")
    if zlib.crc32(body) != crc:
        raise BadCrc("checksum mismatch")
    return PlatformCommand(
        seq=seq,
        t_us=t_us,
        pitch=pitch,
        roll=roll,
        yaw=yaw,
        heave=heave,
        shake_active=bool(flags & FLAG_SHAKE),
        estop=bool(flags & FLAG_ESTOP),
        motion_enabled=bool(flags & FLAG_MOTION),
    )


class PlatformEndpoint:
    """Simulated platform-control computer consuming the command stream.

    Tracks the last commanded attitude, counts packets and sequence gaps,
    and latches to neutral on estop until a command with estop clear and
    motion_enabled set arrives. Thread-safe; `report` returns a snapshot.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.received = 0
        self.gaps = 0
        self.crc_errors = 0
        self.decode_errors = 0  # non-CRC decode failures
        self.estopped = False
        self.attitude = (0.0, 0.0, 0.0, 0.0)
        self._last_seq = None

    def ingest(self, data: bytes) -> None:
        with self._lock:
            try:
                cmd = decode_command(data)
            except BadCrc:
                self.crc_errors += 1
                return
            except DecodeError:
                self.decode_errors += 1
                return
            self.received += 1
            if self._last_seq is not None and cmd.seq > self._last_seq + 1:
                self.gaps += cmd.seq - self._last_seq - 1
            self._last_seq = cmd.seq
            if cmd.estop:
                self.estopped = True
                self.attitude = (0.0, 0.0, 0.0, 0.0)
            elif self.estopped:
                if cmd.motion_enabled:
                    self.estopped = False
                    self.attitude = (cmd.pitch, cmd.roll, cmd.yaw, cmd.heave)
                # else: stay latched at neutral
            else:
                self.attitude = (cmd.pitch, cmd.roll, cmd.yaw, cmd.heave)

    def report(self) -> dict:
        with self._lock:
            return {
                "received": self.received,
                "gaps": self.gaps,
                "crc_errors": self.crc_errors,
                "attitude": list(self.attitude),
                "estopped": self.estopped,
            }

    def report_json(self) -> str:
        return json.dumps(self.report())


class UdpCommandSender:
    """Fire-and-forget UDP emitter for encoded command datagrams."""

    def __init__(self, addr=DEFAULT_PLATFORM_ADDR):
        self.addr = addr
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)

    def send(self, data: bytes) -> None:
        self._sock.sendto(data, self.addr)

    def close(self) -> None:
        self._sock.close()


class UdpPlatformServer:
    """Background UDP listener feeding a PlatformEndpoint."""

    def __init__(self, endpoint: PlatformEndpoint, addr=DEFAULT_PLATFORM_ADDR):
        self.endpoint = endpoint
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.bind(addr)
        self._sock.settimeout(0.2)
        self.addr = self._sock.getsockname()
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._serve, daemon=True)

    def start(self) -> "UdpPlatformServer":
        self._thread.start()
        return self

    def _serve(self):
        while not self._stop.is_set():
            try:
                data, _ = self._sock.recvfrom(2048)
            except socket.timeout:
                continue
            except OSError:
                break
            self.endpoint.ingest(data)

    def stop(self):
        self._stop.set()
        self._thread.join(timeout=2.0)
        self._sock.close()
