"""Fire-and-forget UDP command sender for the armband.

Datagram transport is lossy by design: the engine never blocks on acks.
Every sent command is logged immediately with delivered=None (delivery
unknown); a later ack flips the matching record to delivered=True. Pulse
timing therefore never depends on a network round-trip.
"""

from __future__ import annotations

import socket
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from .protocol import (
    BadAck,
    CommandKind,
    HapticCommand,
    SequenceCounter,
    decode_ack,
    encode_command,
)


def _monotonic_us() -> int:
    return time.monotonic_ns() // 1_000


@dataclass
class CommandRecord:
    """Bookkeeping for one sent command; delivered=None means no ack yet."""

    command: HapticCommand
    sent_at_us: int
    delivered: Optional[bool] = None


@dataclass
class UdpCommandSender:
    """Owns one UDP socket and a strictly increasing command sequence."""

    host: str = "127.0.0.1"
    port: int = 9750
    clock_us: Callable[[], int] = _monotonic_us
    _sock: Optional[socket.socket] = field(default=None, repr=False)
    _seq: SequenceCounter = field(default_factory=SequenceCounter, repr=False)
    log: List[CommandRecord] = field(default_factory=list)

    def __post_init__(self):
        if self._sock is None:
            self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
            self._sock.setblocking(False)

    def send(self, kind: CommandKind) -> HapticCommand:
        """Encode and send one command; returns it with its assigned seq."""
        cmd = HapticCommand(kind, self._seq.take())
        self._sock.sendto(encode_command(cmd), (self.host, self.port))
        self.log.append(CommandRecord(cmd, self.clock_us()))
        self.poll_acks()
        return cmd

    def send_trigger(self, cmd: HapticCommand) -> None:
        """Send a command whose seq was assigned upstream (feedback layer)."""
        self._sock.sendto(encode_command(cmd), (self.host, self.port))
        self.log.append(CommandRecord(cmd, self.clock_us()))
        self.poll_acks()

    def poll_acks(self) -> int:
        """Drain any pending ack datagrams without blocking; returns count."""
        seen = 0
        while True:
            try:
                data, _ = self._sock.recvfrom(64)
            except (BlockingIOError, InterruptedError):
                return seen
            except OSError:
                return seen
            try:
                seq = decode_ack(data)
            except BadAck:
                continue
            for record in reversed(self.log):
                if record.command.seq == seq and record.delivered is None:
                    record.delivered = True
                    seen += 1
                    break

    def unacked(self) -> Tuple[CommandRecord, ...]:
        """Records still in delivery-unknown state."""
        return tuple(r for r in self.log if r.delivered is None)

    def local_address(self) -> Tuple[str, int]:
        return self._sock.getsockname()

    def close(self) -> None:
        if self._sock is not None:
            self._sock.close()
            self._sock = None

    def __enter__(self) -> "UdpCommandSender":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
