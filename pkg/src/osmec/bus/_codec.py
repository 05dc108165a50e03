from __future__ import annotations

from osmec.bus._message import RESERVED_HEADERS, Message
from osmec.util import Constant, MalformedFrame, MessageKind, Method

CRLF = b"\r\n"
_WIRE = Constant.wire_version


def serialize_message(m: Message) -> bytes:
    """SBM/1 framing. `correlation-id` and `content-length` always lead the header block."""

    if m.kind is MessageKind.REQUEST:
        start = f"{m.method} {m.path} {_WIRE}"
    else:
        start = f"{_WIRE} {m.status:03d}"

    lines = [start, f"correlation-id: {m.correlation_id}", f"content-length: {len(m.body)}"]
    lines.extend(f"{k}: {v}" for k, v in m.headers)

    head = "\r\n".join(lines).encode("ascii")
    return head + CRLF + CRLF + m.body


def _fail(msg: str) -> MalformedFrame:
    return MalformedFrame(msg)


def _parse_start(line: str) -> tuple[MessageKind, Method | None, str | None, int | None]:
    parts = line.split(" ")

    if len(parts) == 2 and parts[0] == _WIRE:  # noqa: PLR2004
        status = parts[1]
        if len(status) != 3 or not status.isdigit():  # noqa: PLR2004
            raise _fail(f"bad status {status!r}")
        return MessageKind.RESPONSE, None, None, int(status)

    if len(parts) == 3 and parts[2] == _WIRE and parts[0] in Method:  # noqa: PLR2004
        return MessageKind.REQUEST, Method(parts[0]), parts[1], None

    raise _fail(f"bad start line {line[:40]!r}")


def _parse_uint(key: str, value: str | None) -> int:
    if value is None:
        raise _fail(f"missing `{key}` header")
    if not value.isdigit() or not value.isascii():
        raise _fail(f"`{key}` is not an unsigned integer: {value!r}")
    return int(value)


def parse_message(b: bytes) -> Message:
    """Inverse of `serialize_message`; header order other than the two codec headers is preserved."""

    head, sep, body = b.partition(CRLF + CRLF)
    if not sep:
        raise _fail("missing blank line after headers")

    try:
        text = head.decode("ascii")
    except UnicodeDecodeError:
        raise _fail("non-ASCII bytes in frame head") from None

    start, *header_lines = text.split("\r\n")
    kind, method, path, status = _parse_start(start)

    reserved: dict[str, str] = {}
    headers: list[tuple[str, str]] = []
    seen: set[str] = set()

    for line in header_lines:
        raw_key, sep, value = line.partition(": ")
        if not sep or not raw_key:
            raise _fail(f"bad header line {line[:40]!r}")
        key = raw_key.lower()
        if key in seen:
            raise _fail(f"duplicate header `{key}`")
        seen.add(key)
        if key in RESERVED_HEADERS:
            reserved[key] = value
        else:
            headers.append((key, value))

    cid = _parse_uint("correlation-id", reserved.get("correlation-id"))
    length = _parse_uint("content-length", reserved.get("content-length"))

    if len(body) < length:
        raise _fail(f"body shorter than content-length ({len(body)} < {length})")
    if len(body) > length:
        raise _fail(f"{len(body) - length} trailing byte(s) after body")

    return Message(
        kind=kind,
        method=method,
        path=path,
        headers=tuple(headers),
        body=body,
        correlation_id=cid,
        status=status,
    )
