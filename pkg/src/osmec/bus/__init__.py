from __future__ import annotations

from osmec.bus._bus import ERROR_HEADER, BusEvent, Handler, MessageBus, error_response, is_absent, raise_for_status
from osmec.bus._codec import parse_message, serialize_message
from osmec.bus._message import RESERVED_HEADERS, Headers, Message

__all__ = [
    "ERROR_HEADER",
    "RESERVED_HEADERS",
    "BusEvent",
    "Handler",
    "Headers",
    "Message",
    "MessageBus",
    "error_response",
    "is_absent",
    "parse_message",
    "raise_for_status",
    "serialize_message",
]
