from __future__ import annotations

import threading
from collections.abc import Callable, Generator
from dataclasses import dataclass, replace
from itertools import count
from typing import TYPE_CHECKING, Any

import simpy

from osmec.bus._message import Message
from osmec.util import (
    DuplicateEndpoint,
    MalformedFrame,
    Method,
    OsmecError,
    RequestTimeout,
    UnknownEndpoint,
    error_class,
    pdebug,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

    from osmec.util import BusSettings, Proc

type Handler = Callable[[Message], Message | Generator[simpy.Event, Any, Message]]

ERROR_HEADER = "x-error"


@dataclass(frozen=True, slots=True)
class BusEvent:
    t: float
    phase: str  # send | deliver | respond
    correlation_id: int
    target: str
    detail: str


@dataclass(slots=True)
class _Endpoint:
    name: str
    handler: Handler
    deadline: float | None


def error_response(err: OsmecError) -> Message:
    return Message.response(err.status, headers=[(ERROR_HEADER, type(err).__name__)], body=err.message.encode())


def raise_for_status(response: Message) -> Message:
    """Re-raise an error response as the exception class named in its `x-error` header."""

    if response.ok:
        return response

    name = response.header(ERROR_HEADER)
    cls = error_class(name) if name else OsmecError
    raise cls(response.text() or f"status {response.status}")


def is_absent(response: Message) -> bool:
    """A bare 404 (no `x-error`) means "no such entry" rather than a failure."""

    return response.status == 404 and response.header(ERROR_HEADER) is None  # noqa: PLR2004


class MessageBus:
    """In-process SBI/NBI/EBI transport driven by a simpy environment.

    Every request costs one hop latency on the way in and one on the way back; the
    handler runs as its own process and is cut off at the endpoint deadline.
    """

    def __init__(self, env: simpy.Environment, settings: BusSettings) -> None:
        self.env = env
        self.settings = settings
        self.trace: list[BusEvent] = []
        self._endpoints: dict[str, _Endpoint] = {}
        self._cids = count(1)
        self._in_flight: set[int] = set()
        self._lock = threading.RLock()

    @property
    def endpoints(self) -> tuple[str, ...]:
        return tuple(sorted(self._endpoints))

    @property
    def in_flight(self) -> frozenset[int]:
        return frozenset(self._in_flight)

    def is_registered(self, name: str) -> bool:
        return name in self._endpoints

    def register_endpoint(self, name: str, handler: Handler, *, deadline: float | None = None) -> None:
        with self._lock:
            if name in self._endpoints:
                msg = f"endpoint `{name}` is already registered"
                raise DuplicateEndpoint(msg)
            self._endpoints[name] = _Endpoint(name, handler, deadline)
        pdebug(f"bus: registered <cyn>{name}</cyn>")

    def unregister_endpoint(self, name: str) -> None:
        with self._lock:
            if self._endpoints.pop(name, None) is None:
                msg = f"endpoint `{name}` is not registered"
                raise UnknownEndpoint(msg)
        pdebug(f"bus: unregistered <cyn>{name}</cyn>")

    def _lookup(self, target: str) -> _Endpoint:
        if (endpoint := self._endpoints.get(target)) is None:
            msg = f"no endpoint named `{target}`"
            raise UnknownEndpoint(msg)
        return endpoint

    def _record(self, phase: str, cid: int, target: str, detail: str) -> None:
        self.trace.append(BusEvent(self.env.now, phase, cid, target, detail))

    def send_request(self, target: str, m: Message) -> Proc[Message]:
        """Deliver `m` to `target` and return its response (a simpy process body).

        The bus assigns the correlation id; the response carries the same one.
        """

        if not m.is_request:
            msg = "only requests can be sent"
            raise MalformedFrame(msg)

        endpoint = self._lookup(target)
        cid = next(self._cids)
        request = replace(m, correlation_id=cid)
        self._in_flight.add(cid)
        self._record("send", cid, target, f"{request.method} {request.path}")

        try:
            if self.settings.hop_latency:
                yield self.env.timeout(self.settings.hop_latency)
            endpoint = self._lookup(target)
            self._record("deliver", cid, target, f"{request.method} {request.path}")
            pdebug(f"bus: #{cid} {request.method} {request.path} -> <cyn>{target}</cyn>")

            if request.method is Method.GET and request.segments[1:] == ("health",):
                response = Message.response(200, body=b"ok")
            else:
                response = yield from self._await_handler(endpoint, request)

            response = replace(response, correlation_id=cid)
            if self.settings.hop_latency:
                yield self.env.timeout(self.settings.hop_latency)
            self._record("respond", cid, target, str(response.status))
        finally:
            self._in_flight.discard(cid)

        return response

    def _await_handler(self, endpoint: _Endpoint, request: Message) -> Proc[Message]:
        deadline = endpoint.deadline if endpoint.deadline is not None else self.settings.deadline
        proc = self.env.process(self._invoke(endpoint, request))
        timer = self.env.timeout(deadline)

        result = yield proc | timer
        if proc not in result:
            proc.interrupt("deadline")
            msg = f"`{endpoint.name}` did not answer #{request.correlation_id} within {deadline}"
            raise RequestTimeout(msg)

        return proc.value

    def _invoke(self, endpoint: _Endpoint, request: Message) -> Proc[Message]:
        try:
            result = endpoint.handler(request)
            if isinstance(result, Generator):
                result = yield from result
        except OsmecError as e:
            pdebug(f"bus: #{request.correlation_id} failed with <red>{type(e).__name__}</red>: {e.message}")
            return error_response(e)
        except simpy.Interrupt:
            return Message.response(504, body=b"interrupted")

        return result

    def call(
        self,
        target: str,
        method: Method,
        path: str,
        *,
        json: Any = None,
        body: bytes = b"",
        headers: Iterable[tuple[str, str]] = (),
    ) -> Proc[Message]:
        """`send_request` plus `raise_for_status`, for NF-to-NF calls."""

        request = Message.request(method, path, headers=headers, body=body, json=json)
        response = yield from self.send_request(target, request)
        return raise_for_status(response)

    def lookup(self, target: str, path: str) -> Proc[Message | None]:
        """GET that maps a bare 404 to `None`."""

        response = yield from self.send_request(target, Message.request(Method.GET, path))
        return None if is_absent(response) else raise_for_status(response)
