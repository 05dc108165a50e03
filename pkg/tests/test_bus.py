from __future__ import annotations

import random
from typing import TYPE_CHECKING, Any

import pytest

from osmec.bus import ERROR_HEADER, Message, MessageBus, parse_message, raise_for_status, serialize_message
from osmec.util import (
    BusSettings,
    DuplicateEndpoint,
    Interface,
    KeyNotFound,
    MalformedFrame,
    MessageKind,
    Method,
    RequestTimeout,
    UnknownEndpoint,
    UnknownNamespace,
)

if TYPE_CHECKING:
    import simpy


def test_request_frame_layout() -> None:
    m = Message.request(Method.POST, "/sbi/udm/apps/x", headers=[("X-Trace", "a b")], body=b"hi")
    raw = serialize_message(m)

    assert raw == (
        b"POST /sbi/udm/apps/x SBM/1\r\n"
        b"correlation-id: 0\r\n"
        b"content-length: 2\r\n"
        b"x-trace: a b\r\n"
        b"\r\n"
        b"hi"
    )
    assert parse_message(raw) == m


def test_response_frame_keeps_header_order() -> None:
    m = Message.response(404, headers=[("b", "2"), ("a", "1")], correlation_id=7)
    back = parse_message(serialize_message(m))

    assert back.headers == (("b", "2"), ("a", "1"))
    assert back.correlation_id == 7
    assert back.status == 404
    assert back.method is None
    assert back.path is None


_TOKEN = "!#$%&'*+-.^_`|~0123456789abcdefghijklmnopqrstuvwxyz"
_PRINTABLE = "".join(map(chr, range(0x20, 0x7F)))
_PATH_CHARS = "".join(map(chr, range(0x21, 0x7F)))


def _random_headers(rng: random.Random) -> list[tuple[str, str]]:
    ret: list[tuple[str, str]] = []
    seen = {"correlation-id", "content-length"}
    for _ in range(rng.randint(0, 6)):
        key = "".join(rng.choices(_TOKEN, k=rng.randint(1, 12)))
        if key in seen:
            continue
        seen.add(key)
        # names are case-insensitive on the way in
        raw = "".join(c.upper() if rng.random() < 0.3 else c for c in key)
        ret.append((raw, "".join(rng.choices(_PRINTABLE, k=rng.randint(0, 30)))))
    return ret


def _random_message(rng: random.Random) -> Message:
    body = rng.randbytes(rng.randint(0, 512))
    if rng.random() < 0.2:
        body += b"\r\n\r\n" + rng.randbytes(8)
    common: dict[str, Any] = {
        "headers": tuple(_random_headers(rng)),
        "body": body,
        "correlation_id": rng.randint(0, 2**64 - 1),
    }

    if rng.random() < 0.5:
        ns = rng.choice(list(Interface))
        path = f"/{ns}/" + "".join(rng.choices(_PATH_CHARS, k=rng.randint(0, 40)))
        return Message(kind=MessageKind.REQUEST, method=Method(rng.choice(list(Method))), path=path, **common)
    return Message(kind=MessageKind.RESPONSE, status=rng.randint(100, 599), **common)


def test_codec_round_trip() -> None:
    rng = random.Random(1729)
    kinds = set()
    for _ in range(10_000):
        m = _random_message(rng)
        kinds.add(m.kind)
        assert parse_message(serialize_message(m)) == m, m

    assert kinds == {MessageKind.REQUEST, MessageKind.RESPONSE}


@pytest.mark.parametrize(
    "raw",
    [
        b"GET /sbi/x SBM/1\r\ncorrelation-id: 1\r\ncontent-length: 0\r\n",
        b"GET /sbi/x SBM/1\r\ncorrelation-id: 1\r\ncontent-length: 3\r\n\r\nab",
        b"GET /sbi/x SBM/1\r\ncorrelation-id: 1\r\ncontent-length: 1\r\n\r\nab",
        b"GET /sbi/x SBM/1\r\ncontent-length: 0\r\n\r\n",
        b"GET /sbi/x SBM/1\r\ncorrelation-id: 1\r\ncontent-length: 0\r\nx: 1\r\nX: 2\r\n\r\n",
        b"SBM/1 42\r\ncorrelation-id: 1\r\ncontent-length: 0\r\n\r\n",
        b"FETCH /sbi/x SBM/1\r\ncorrelation-id: 1\r\ncontent-length: 0\r\n\r\n",
    ],
)
def test_parse_rejects_malformed_frames(raw: bytes) -> None:
    with pytest.raises(MalformedFrame):
        parse_message(raw)


def test_message_invariants() -> None:
    with pytest.raises(UnknownNamespace):
        Message.request(Method.GET, "/api/x")
    with pytest.raises(MalformedFrame):
        Message.request(Method.GET, "/sbi/x", headers=[("content-length", "3")])
    with pytest.raises(MalformedFrame):
        Message.response(700)
    with pytest.raises(MalformedFrame):
        Message.response(200, correlation_id=2**64)


def test_register_twice(bus: MessageBus) -> None:
    bus.register_endpoint("udm", lambda _: Message.response(200))
    with pytest.raises(DuplicateEndpoint):
        bus.register_endpoint("udm", lambda _: Message.response(200))

    bus.unregister_endpoint("udm")
    assert not bus.is_registered("udm")
    with pytest.raises(UnknownEndpoint):
        bus.unregister_endpoint("udm")


def test_unknown_target(bus: MessageBus, drive) -> None:
    with pytest.raises(UnknownEndpoint):
        drive(bus.send_request("nope", Message.request(Method.GET, "/sbi/nope/x")))


def test_correlation_and_health(bus: MessageBus, drive) -> None:
    bus.register_endpoint("echo", lambda m: Message.response(200, body=m.body))

    first = drive(bus.send_request("echo", Message.request(Method.POST, "/sbi/echo/x", body=b"1")))
    second = drive(bus.send_request("echo", Message.request(Method.POST, "/sbi/echo/x", body=b"2")))
    health = drive(bus.send_request("echo", Message.request(Method.GET, "/sbi/echo/health")))

    assert (first.correlation_id, first.body) == (1, b"1")
    assert (second.correlation_id, second.body) == (2, b"2")
    assert health.ok
    assert health.body == b"ok"
    assert [e.phase for e in bus.trace if e.correlation_id == 1] == ["send", "deliver", "respond"]
    assert not bus.in_flight


def test_errors_cross_as_responses(bus: MessageBus, drive) -> None:
    def handler(_: Message) -> Message:
        msg = "no such row"
        raise KeyNotFound(msg)

    bus.register_endpoint("udm", handler)
    response = drive(bus.send_request("udm", Message.request(Method.GET, "/sbi/udm/apps/x")))

    assert response.status == 404
    assert response.header(ERROR_HEADER) == "KeyNotFound"
    with pytest.raises(KeyNotFound, match="no such row"):
        raise_for_status(response)
    with pytest.raises(KeyNotFound):
        drive(bus.call("udm", Method.GET, "/sbi/udm/apps/x"))


def test_deadline(env: simpy.Environment, drive) -> None:
    bus = MessageBus(env, BusSettings())

    def slow(_: Message):
        yield env.timeout(10)
        return Message.response(200)

    bus.register_endpoint("slow", slow, deadline=3)
    with pytest.raises(RequestTimeout):
        drive(bus.send_request("slow", Message.request(Method.GET, "/sbi/slow/x")))
    assert env.now == 3


def test_hop_latency(env: simpy.Environment, drive) -> None:
    bus = MessageBus(env, BusSettings(hop_latency=0.5))
    bus.register_endpoint("echo", lambda _: Message.response(204))

    drive(bus.send_request("echo", Message.request(Method.GET, "/sbi/echo/x")))
    assert env.now == 1.0


def test_lookup_maps_bare_404(bus: MessageBus, drive) -> None:
    bus.register_endpoint("udm", lambda _: Message.response(404))
    assert drive(bus.lookup("udm", "/sbi/udm/apps/x")) is None
