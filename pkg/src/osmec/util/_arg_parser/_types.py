from __future__ import annotations

from argparse import ArgumentTypeError
from enum import StrEnum
from pathlib import Path

from osmec.util._console_io import join_choices
from osmec.util._enum import ExportFormat, Mode, ProtocolKind

INSPECT_TARGETS = ("templates", "instance", "node")


def _choice[E: StrEnum](enum: type[E], value: str) -> E:
    value = value.strip().lower()
    if value not in enum:
        msg = f"expected value from {join_choices(enum)}"
        raise ArgumentTypeError(msg)
    return enum(value)


def mode(value: str) -> Mode:
    return _choice(Mode, value)


def protocol(value: str) -> ProtocolKind:
    return _choice(ProtocolKind, value)


def export_format(value: str) -> ExportFormat:
    return _choice(ExportFormat, value)


def service_class(value: str) -> str:
    # Unknown classes are left for MANO to reject so the request still reaches the event log.
    return value.strip().lower()


def seed(value: str) -> int:
    try:
        ret = int(value)
    except ValueError as ve:
        msg = f"expected a non-negative `int`, got <ylw>{value}</ylw>"
        raise ArgumentTypeError(msg) from ve
    if ret < 0:
        msg = f"expected a non-negative `int`, got <ylw>{value}</ylw>"
        raise ArgumentTypeError(msg)
    return ret


def directory(value: str) -> Path:
    return Path(value)


def file_path(value: str) -> Path:
    return Path(value)


def identifier(value: str) -> int:
    try:
        ret = int(value)
    except ValueError as ve:
        msg = f"expected a positive `int`, got <ylw>{value}</ylw>"
        raise ArgumentTypeError(msg) from ve
    if ret < 1:
        msg = f"expected a positive `int`, got <ylw>{value}</ylw>"
        raise ArgumentTypeError(msg)
    return ret


def inspect_target(value: str) -> str:
    value = value.strip().lower()
    if value not in INSPECT_TARGETS:
        msg = f"expected value from {join_choices(INSPECT_TARGETS)}"
        raise ArgumentTypeError(msg)
    return value
