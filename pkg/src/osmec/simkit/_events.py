from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from osmec.util import ConfigError, EventKind, IoError, JSONValue, canonical_json, pdebug, stable_hash64

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator
    from pathlib import Path

    import simpy


@dataclass(frozen=True, slots=True)
class EventRecord:
    seq: int
    t: float
    kind: EventKind
    subject: str
    payload: dict[str, JSONValue] = field(default_factory=dict)

    def line(self) -> str:
        return f"{self.seq}\t{float(self.t)!r}\t{self.kind}\t{self.subject}\t{canonical_json(self.payload)}"

    def get(self, key: str, default: Any = None) -> Any:
        return self.payload.get(key, default)


def parse_line(line: str) -> EventRecord:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 5:  # noqa: PLR2004
        msg = f"expected 5 tab-separated fields, got {len(parts)}"
        raise ConfigError(msg)

    seq, t, kind, subject, payload = parts
    if kind not in EventKind:
        msg = f"unknown event kind `{kind}`"
        raise ConfigError(msg)

    try:
        return EventRecord(int(seq), float(t), EventKind(kind), subject, json.loads(payload))
    except ValueError as ve:
        msg = f"bad event line: {ve}"
        raise ConfigError(msg) from None


class EventLog:
    """Ordered trace of everything the system does; the only input metrics are built from.

    Payloads are normalized through canonical JSON when emitted, so a log read back
    from disk compares equal to the one that was written.
    """

    def __init__(self, records: Iterable[EventRecord] = ()) -> None:
        self.records: list[EventRecord] = list(records)
        self._env: simpy.Environment | None = None

    def attach(self, env: simpy.Environment) -> None:
        """Bind the clock; a log may outlive several environments whose clocks are chained."""

        if self._env is not None and env.now < self._env.now:
            msg = f"new clock starts at {env.now}, before the previous one ({self._env.now})"
            raise ValueError(msg)
        self._env = env

    @property
    def now(self) -> float:
        return 0.0 if self._env is None else float(self._env.now)

    def emit(self, kind: EventKind, subject: str, **payload: Any) -> EventRecord:
        seq = len(self.records) + 1
        t = self.now
        if self.records and t < self.records[-1].t:
            msg = f"event time {t} precedes the previous event ({self.records[-1].t})"
            raise ValueError(msg)

        record = EventRecord(seq, t, kind, subject, json.loads(canonical_json(payload)))
        self.records.append(record)
        pdebug(f"event #{seq} t={t!r} <mag>{kind}</mag> {subject}")
        return record

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EventRecord]:
        return iter(self.records)

    def of_kind(self, *kinds: EventKind) -> list[EventRecord]:
        return [r for r in self.records if r.kind in kinds]

    def text(self) -> str:
        return "".join(f"{r.line()}\n" for r in self.records)

    def digest(self) -> int:
        return stable_hash64(self.text().encode("utf-8"))

    def write(self, path: Path) -> Path:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with path.open("w", encoding="utf-8", newline="\n") as f:
                f.write(self.text())
        except OSError as ose:
            msg = f"could not write `{path}`: {ose.strerror or ose}"
            raise IoError(msg) from ose
        return path

    @classmethod
    def read(cls, path: Path) -> EventLog:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as ose:
            msg = f"could not read `{path}`: {ose.strerror or ose}"
            raise IoError(msg) from ose

        lines = text.split("\n")
        if lines[-1] == "":
            lines.pop()

        records = []
        for lineno, line in enumerate(lines, start=1):
            try:
                records.append(parse_line(line))
            except ConfigError as e:
                msg = f"{path}:{lineno}: {e.message}"
                raise ConfigError(msg) from None
        return cls(records)


def request_trace(records: Iterable[EventRecord], request_id: int) -> list[EventRecord]:
    return [r for r in records if r.payload.get("request_id") == request_id]
