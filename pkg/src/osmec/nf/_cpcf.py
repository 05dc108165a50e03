from __future__ import annotations

import json
import struct
from typing import TYPE_CHECKING, Any

from osmec.bus import Message, parse_message
from osmec.util import (
    Constant,
    EventKind,
    MalformedFrame,
    Method,
    Origin,
    ProtocolKind,
    UnrecognizedProtocol,
    canonical_json,
    pdebug,
)

if TYPE_CHECKING:
    from osmec.bus import MessageBus
    from osmec.simkit._events import EventLog
    from osmec.util import Proc

MANO_REQUESTS_PATH = "/ebi/mano/requests"

# tag -> field; `input` travels as JSON text
LEGACY_TAGS: dict[int, str] = {1: "service_class", 2: "service_name", 3: "input", 4: "mode", 5: "origin"}
_TAG_OF = {name: tag for tag, name in LEGACY_TAGS.items()}
_TLV_HEAD = struct.Struct(">BH")


def encode_legacy(fields: dict[str, Any]) -> bytes:
    """`XMEC1` followed by (tag:u8, length:u16be, value) records in tag order."""

    out = bytearray(Constant.legacy_magic)
    for name in sorted(fields, key=lambda n: _TAG_OF.get(n, 0)):
        if name not in _TAG_OF:
            msg = f"no legacy tag for field `{name}`"
            raise UnrecognizedProtocol(msg)
        value = fields[name]
        if value is None:
            continue
        raw = (canonical_json(value) if name == "input" else str(value)).encode("utf-8")
        if len(raw) > 0xFFFF:  # noqa: PLR2004
            msg = f"legacy field `{name}` is longer than 65535 bytes"
            raise UnrecognizedProtocol(msg)
        out += _TLV_HEAD.pack(_TAG_OF[name], len(raw)) + raw
    return bytes(out)


def decode_legacy(payload: bytes) -> dict[str, Any]:
    if not payload.startswith(Constant.legacy_magic):
        msg = "missing XMEC1 magic"
        raise UnrecognizedProtocol(msg)

    fields: dict[str, Any] = {}
    view = memoryview(payload)[len(Constant.legacy_magic) :]
    while view:
        if len(view) < _TLV_HEAD.size:
            msg = "truncated TLV header"
            raise UnrecognizedProtocol(msg)
        tag, length = _TLV_HEAD.unpack_from(view)
        value = bytes(view[_TLV_HEAD.size : _TLV_HEAD.size + length])
        if len(value) != length:
            msg = f"TLV tag {tag} is shorter than its length {length}"
            raise UnrecognizedProtocol(msg)
        if (name := LEGACY_TAGS.get(tag)) is None:
            msg = f"unknown TLV tag {tag}"
            raise UnrecognizedProtocol(msg)

        try:
            text = value.decode("utf-8")
            fields[name] = json.loads(text) if name == "input" else text
        except ValueError:
            msg = f"TLV tag {tag} does not hold valid text"
            raise UnrecognizedProtocol(msg) from None
        view = view[_TLV_HEAD.size + length :]

    return fields


def identify_protocol(payload: bytes) -> ProtocolKind:
    if not payload:
        msg = "empty service request"
        raise UnrecognizedProtocol(msg)

    if payload.startswith(Constant.legacy_magic):
        return ProtocolKind.LEGACY

    try:
        parsed = parse_message(payload)
    except MalformedFrame:
        parsed = None

    if parsed is not None and parsed.is_request:
        return ProtocolKind.HTTP

    msg = f"payload matches neither SBM/1 nor XMEC1 ({payload[:8]!r}...)"
    raise UnrecognizedProtocol(msg)


def convert(payload: bytes) -> Message:
    """HTTP requests pass through untouched; legacy ones are re-encapsulated for MANO."""

    if identify_protocol(payload) is ProtocolKind.HTTP:
        return parse_message(payload)

    fields = decode_legacy(payload)
    return Message.request(
        Method.POST,
        MANO_REQUESTS_PATH,
        headers=[("x-origin-protocol", str(ProtocolKind.LEGACY))],
        json=fields,
    )


class Cpcf:
    """Front door for user requests: identifies the protocol, converts legacy frames and hands off to MANO."""

    name = "cpcf"

    def __init__(self, bus: MessageBus, log: EventLog, mano: str = "mano") -> None:
        self.bus = bus
        self.log = log
        self.mano = mano

    # /sbi/cpcf/ingest
    def handle(self, request: Message) -> Proc[Message]:
        if request.method is not Method.POST or request.segments != ("cpcf", "ingest"):
            msg = f"cpcf does not support {request.method} {request.path}"
            raise MalformedFrame(msg)

        request_id = request.header("x-request-id", "0")
        subject = f"req-{request_id}"
        rid = int(request_id or 0)
        origin = request.header("x-origin", Origin.CLI)
        self.log.emit(
            EventKind.REQUEST_RECEIVED,
            subject,
            request_id=rid,
            origin=origin,
            service_class=request.header("x-service-class", ""),
            size=len(request.body),
        )

        protocol = identify_protocol(request.body)
        self.log.emit(EventKind.PROTOCOL_IDENTIFIED, subject, request_id=rid, protocol=protocol)

        converted = convert(request.body)
        if protocol is ProtocolKind.LEGACY:
            self.log.emit(EventKind.CONVERTED, subject, request_id=rid, path=converted.path)
        pdebug(f"cpcf: {subject} arrived as <mag>{protocol}</mag>")

        forwarded = converted.with_header("x-request-id", str(rid)).with_header("x-origin", str(origin))
        response = yield from self.bus.send_request(self.mano, forwarded)
        return response
