"""Wire protocol for the vibrotactile armband.

Commands are 4-byte datagrams ``[0xA5, kind, seq_lo, seq_hi]``; device acks
are 3-byte datagrams ``[0x5A, seq_lo, seq_hi]``. The sequence number is a
u16 wrapping counter so lost or reordered datagrams are attributable.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

from ..errors import GaitFeedbackError

COMMAND_MAGIC = 0xA5
ACK_MAGIC = 0x5A
COMMAND_SIZE = 4
ACK_SIZE = 3
SEQ_MODULUS = 0x10000

_COMMAND_STRUCT = struct.Struct("<BBH")
_ACK_STRUCT = struct.Struct("<BH")


class BadAck(GaitFeedbackError):
    """An ack datagram had the wrong size or magic byte."""


class BadMagic(GaitFeedbackError):
    """A command datagram had the wrong size, magic byte, or kind."""


class CommandKind(IntEnum):
    """What the armband should do on receipt."""

    DOUBLE_PULSE = 0x01
    STOP = 0x02
    PING = 0x03


@dataclass(frozen=True)
class HapticCommand:
    """One command on the wire: a kind plus its u16 sequence number."""

    kind: CommandKind
    seq: int

    def __post_init__(self):
        if not isinstance(self.kind, CommandKind):
            object.__setattr__(self, "kind", CommandKind(self.kind))
        if not (0 <= self.seq < SEQ_MODULUS):
            raise ValueError(f"seq must be a u16, got {self.seq}")


# The feedback layer emits these to trigger the armband; same wire object.
TriggerCommand = HapticCommand


class SequenceCounter:
    """Strictly incrementing u16 counter; wraps at 65536."""

    def __init__(self, start: int = 0):
        if not (0 <= start < SEQ_MODULUS):
            raise ValueError(f"start must be a u16, got {start}")
        self._next = start

    def take(self) -> int:
        value = self._next
        self._next = (self._next + 1) % SEQ_MODULUS
        return value

    @property
    def peek(self) -> int:
        return self._next


def encode_command(cmd: HapticCommand) -> bytes:
    """Serialize a command to its 4-byte little-endian datagram."""
    return _COMMAND_STRUCT.pack(COMMAND_MAGIC, int(cmd.kind), cmd.seq)


def decode_command(data: bytes) -> HapticCommand:
    """Parse a 4-byte command datagram; raises BadMagic on anything else."""
    if len(data) != COMMAND_SIZE:
        raise BadMagic(f"command datagram must be {COMMAND_SIZE} bytes, got {len(data)}")
    magic, kind, seq = _COMMAND_STRUCT.unpack(data)
    if magic != COMMAND_MAGIC:
        raise BadMagic(f"bad command magic 0x{magic:02X}")
    try:
        parsed = CommandKind(kind)
    except ValueError:
        raise BadMagic(f"unknown command kind 0x{kind:02X}") from None
    return HapticCommand(parsed, seq)


def encode_ack(seq: int) -> bytes:
    """Serialize a device ack for the given sequence number."""
    if not (0 <= seq < SEQ_MODULUS):
        raise ValueError(f"seq must be a u16, got {seq}")
    return _ACK_STRUCT.pack(ACK_MAGIC, seq)


def decode_ack(data: bytes) -> int:
    """Parse a 3-byte ack datagram and return the acknowledged seq."""
    if len(data) != ACK_SIZE:
        raise BadAck(f"ack datagram must be {ACK_SIZE} bytes, got {len(data)}")
    magic, seq = _ACK_STRUCT.unpack(data)
    if magic != ACK_MAGIC:
        raise BadAck(f"bad ack magic 0x{magic:02X}")
    return seq
