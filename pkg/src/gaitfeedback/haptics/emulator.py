"""Deterministic software stand-in for the vibrotactile armband.

The emulator speaks the same datagram protocol as the hardware and logs
motor on/off transitions against an injected clock, so closed-loop tests
never read wall time. A double_pulse command drives both motors through
2 x (150 ms on, 100 ms off); a retrigger mid-pulse restarts the profile
(pending transitions are dropped, never interleaved).
"""

from __future__ import annotations

import socket
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .protocol import (
    BadMagic,
    CommandKind,
    HapticCommand,
    decode_command,
    encode_ack,
    encode_command,
)

MOTOR_COUNT = 2
PULSES_PER_COMMAND = 2
PULSE_ON_US = 150_000
PULSE_GAP_US = 100_000


@dataclass(frozen=True)
class MotorTransition:
    """One logged motor state change."""

    timestamp_us: int
    motor: int
    on: bool


class EmulatedDevice:
    """Two-motor armband emulator keyed entirely by caller-supplied time."""

    def __init__(self):
        self._log: List[List[MotorTransition]] = [[] for _ in range(MOTOR_COUNT)]

    def handle_datagram(self, data: bytes, now_us: int) -> bytes:
        """Apply one command datagram at the given time; returns the ack."""
        cmd = decode_command(data)
        if cmd.kind is CommandKind.DOUBLE_PULSE:
            self._start_profile(now_us)
        elif cmd.kind is CommandKind.STOP:
            self._stop(now_us)
        # PING acks without touching the motors.
        return encode_ack(cmd.seq)

    def transitions(self, motor: Optional[int] = None) -> Tuple[MotorTransition, ...]:
        """Logged transitions for one motor, or all motors merged in time order."""
        if motor is not None:
            self._check_motor(motor)
            return tuple(self._log[motor])
        merged = [t for per_motor in self._log for t in per_motor]
        merged.sort(key=lambda t: (t.timestamp_us, t.motor))
        return tuple(merged)

    def motor_state(self, motor: int, t_us: int) -> bool:
        """Whether a motor is vibrating at time t (False before any command)."""
        self._check_motor(motor)
        state = False
        for tr in self._log[motor]:
            if tr.timestamp_us > t_us:
                break
            state = tr.on
        return state

    def _check_motor(self, motor: int) -> None:
        if not (0 <= motor < MOTOR_COUNT):
            raise ValueError(f"motor must be in [0, {MOTOR_COUNT}), got {motor}")

    def _drop_pending(self, now_us: int) -> None:
        # Transitions scheduled beyond `now` have not happened yet; a new
        # command replaces them rather than interleaving with them.
        for motor in range(MOTOR_COUNT):
            self._log[motor] = [t for t in self._log[motor] if t.timestamp_us <= now_us]

    def _start_profile(self, now_us: int) -> None:
        self._drop_pending(now_us)
        period_us = PULSE_ON_US + PULSE_GAP_US
        for motor in range(MOTOR_COUNT):
            for pulse in range(PULSES_PER_COMMAND):
                start = now_us + pulse * period_us
                self._log[motor].append(MotorTransition(start, motor, True))
                self._log[motor].append(MotorTransition(start + PULSE_ON_US, motor, False))

    def _stop(self, now_us: int) -> None:
        self._drop_pending(now_us)
        for motor in range(MOTOR_COUNT):
            if self.motor_state(motor, now_us):
                self._log[motor].append(MotorTransition(now_us, motor, False))


class UdpDeviceServer:
    """Loopback datagram front for an EmulatedDevice.

    Binds a UDP socket so the engine talks to the emulator exactly as it
    would to the physical armband. The caller pumps it with explicit time;
    undecodable datagrams are dropped, matching lossy-transport semantics.
    """

    def __init__(self, device: Optional[EmulatedDevice] = None,
                 host: str = "127.0.0.1", port: int = 0):
        self.device = device if device is not None else EmulatedDevice()
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        self._sock.setblocking(False)
        self._sock.bind((host, port))

    @property
    def address(self) -> Tuple[str, int]:
        return self._sock.getsockname()

    def pump(self, now_us: int) -> int:
        """Handle all queued datagrams at the given time; returns count."""
        handled = 0
        while True:
            try:
                data, sender = self._sock.recvfrom(64)
            except (BlockingIOError, InterruptedError):
                return handled
            except OSError:
                return handled
            try:
                ack = self.device.handle_datagram(data, now_us)
            except BadMagic:
                continue
            try:
                self._sock.sendto(ack, sender)
            except OSError:
                pass
            handled += 1

    def close(self) -> None:
        self._sock.close()

    def __enter__(self) -> "UdpDeviceServer":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


class DirectDeviceLink:
    """Socket-free command sink wired straight into an emulated device.

    Deterministic closed-loop runs need the device clock to follow the
    session's frame clock exactly, with no transport in between: the
    pipeline calls advance_clock(t) each frame, and send_trigger() delivers
    the encoded command at that instant. The wire encoding still runs, so
    the bytes exercised are the same ones the UDP path carries.
    """

    def __init__(self, device: Optional[EmulatedDevice] = None):
        self.device = device if device is not None else EmulatedDevice()
        self.now_us = 0
        self.pulse_count = 0
        self.acks: List[bytes] = []

    def advance_clock(self, now_us: int) -> None:
        self.now_us = int(now_us)

    def send_trigger(self, command: HapticCommand) -> HapticCommand:
        ack = self.device.handle_datagram(encode_command(command), self.now_us)
        self.acks.append(ack)
        if command.kind is CommandKind.DOUBLE_PULSE:
            self.pulse_count += 1
        return command
