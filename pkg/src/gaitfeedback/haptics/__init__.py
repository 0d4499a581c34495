"""Armband wire protocol, UDP sender, and deterministic device emulator."""

from .emulator import (
    MOTOR_COUNT,
    PULSE_GAP_US,
    PULSE_ON_US,
    PULSES_PER_COMMAND,
    DirectDeviceLink,
    EmulatedDevice,
    MotorTransition,
    UdpDeviceServer,
)
from .protocol import (
    ACK_MAGIC,
    ACK_SIZE,
    COMMAND_MAGIC,
    COMMAND_SIZE,
    SEQ_MODULUS,
    BadAck,
    BadMagic,
    CommandKind,
    HapticCommand,
    SequenceCounter,
    TriggerCommand,
    decode_ack,
    decode_command,
    encode_ack,
    encode_command,
)
from .sender import CommandRecord, UdpCommandSender

__all__ = [
    "ACK_MAGIC",
    "ACK_SIZE",
    "COMMAND_MAGIC",
    "COMMAND_SIZE",
    "SEQ_MODULUS",
    "MOTOR_COUNT",
    "PULSE_GAP_US",
    "PULSE_ON_US",
    "PULSES_PER_COMMAND",
    "BadAck",
    "BadMagic",
    "CommandKind",
    "CommandRecord",
    "DirectDeviceLink",
    "EmulatedDevice",
    "HapticCommand",
    "MotorTransition",
    "SequenceCounter",
    "TriggerCommand",
    "UdpCommandSender",
    "UdpDeviceServer",
    "decode_ack",
    "decode_command",
    "encode_ack",
    "encode_command",
]
