from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import simpy

from osmec.bus import Message
from osmec.util import EventKind, MalformedFrame, Method, canonical_json, pdebug

if TYPE_CHECKING:
    from osmec.simkit._events import EventLog


@dataclass(frozen=True, slots=True)
class StateRecord:
    key: str
    value: bytes
    revision: int


class Watch:
    """Ordered stream of updates under a key prefix, backed by a simpy store."""

    def __init__(self, env: simpy.Environment, prefix: str) -> None:
        self.prefix = prefix
        self._store = simpy.Store(env)
        self.closed = False

    def push(self, record: StateRecord) -> None:
        if not self.closed:
            self._store.put(record)

    def get(self) -> simpy.Event:
        return self._store.get()

    def drain(self) -> list[StateRecord]:
        items = list(self._store.items)
        self._store.items.clear()
        return items

    def close(self) -> None:
        self.closed = True


class StateStore:
    """Versioned key-value store of the master node. One global revision counter."""

    def __init__(self, env: simpy.Environment) -> None:
        self.env = env
        self._data: dict[str, StateRecord] = {}
        self._watches: list[Watch] = []
        self.revision = 0

    def put(self, key: str, value: bytes) -> int:
        self.revision += 1
        record = self._data[key] = StateRecord(key, value, self.revision)
        for w in self._watches:
            if key.startswith(w.prefix):
                w.push(record)
        return self.revision

    def get(self, key: str) -> StateRecord | None:
        return self._data.get(key)

    def watch(self, prefix: str) -> Watch:
        w = Watch(self.env, prefix)
        self._watches.append(w)
        return w

    def keys(self, prefix: str = "") -> list[str]:
        return sorted(k for k in self._data if k.startswith(prefix))


class ApiServer:
    """Single entry to the state store; every write is logged as StateWritten.

    Master components call `put`/`get` in-process, node agents reach it over the EBI.
    """

    name = "apiserver"

    def __init__(self, store: StateStore, log: EventLog) -> None:
        self.store = store
        self.log = log
        self.heartbeat_listener: Callable[[int, float], None] | None = None

    def put(self, key: str, value: bytes, *, writer: str) -> int:
        revision = self.store.put(key, value)
        self.log.emit(EventKind.STATE_WRITTEN, self.name, key=key, revision=revision, writer=writer)
        return revision

    def put_json(self, key: str, value: Any, *, writer: str) -> int:
        return self.put(key, canonical_json(value).encode("utf-8"), writer=writer)

    def get(self, key: str) -> StateRecord | None:
        return self.store.get(key)

    # /ebi/state/{key...}, /ebi/mano/nodes/{id}/heartbeat
    def handle(self, request: Message) -> Message:
        match request.method, request.segments:
            case Method.GET, ("state", *parts) if parts:
                if (record := self.get("/" + "/".join(parts))) is None:
                    return Message.response(404)
                return Message.response(200, headers=[("x-revision", str(record.revision))], body=record.value)
            case Method.PUT, ("state", *parts) if parts:
                writer = request.header("x-writer", "ebi") or "ebi"
                revision = self.put("/" + "/".join(parts), request.body, writer=writer)
                return Message.response(200, json={"revision": revision})
            case Method.POST, ("mano", "nodes", node_id, "heartbeat") if node_id.isdigit():
                pdebug(f"apiserver: heartbeat from node-{node_id}")
                if self.heartbeat_listener is not None:
                    self.heartbeat_listener(int(node_id), float(self.store.env.now))
                return Message.response(204)
            case _:
                msg = f"apiserver does not support {request.method} {request.path}"
                raise MalformedFrame(msg)
