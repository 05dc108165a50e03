from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from osmec.bus import Message
from osmec.util import (
    ArityMismatch,
    ConfigError,
    DuplicateKey,
    IoError,
    KeyNotFound,
    MalformedFrame,
    Method,
    TableNotFound,
    canonical_json,
    parse_json,
    pdebug,
)

if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

    from osmec.bus import MessageBus
    from osmec.util import Proc

type Row = tuple[str, ...]


@dataclass
class DataTable:
    """String-valued rows keyed by the first schema column."""

    service_name: str
    schema: tuple[str, ...]
    rows: dict[str, Row] = field(default_factory=dict)

    def _check(self, row: Iterable[Any]) -> Row:
        row = tuple(row)
        if len(row) != len(self.schema):
            msg = f"`{self.service_name}` rows have {len(self.schema)} column(s), got {len(row)}"
            raise ArityMismatch(msg)
        if not all(isinstance(v, str) for v in row):
            msg = f"`{self.service_name}` rows hold strings only"
            raise ArityMismatch(msg)
        return row

    def insert(self, row: Iterable[Any]) -> None:
        row = self._check(row)
        if row[0] in self.rows:
            msg = f"`{self.service_name}` already has key `{row[0]}`"
            raise DuplicateKey(msg)
        self.rows[row[0]] = row

    def query(self, key: str) -> Row | None:
        return self.rows.get(key)

    def update(self, key: str, row: Iterable[Any]) -> None:
        row = self._check(row)
        if key not in self.rows:
            msg = f"`{self.service_name}` has no key `{key}`"
            raise KeyNotFound(msg)
        if row[0] != key:
            msg = f"primary key `{row[0]}` does not match `{key}`"
            raise MalformedFrame(msg)
        self.rows[key] = row

    def delete(self, key: str) -> None:
        if self.rows.pop(key, None) is None:
            msg = f"`{self.service_name}` has no key `{key}`"
            raise KeyNotFound(msg)

    def as_dict(self, row: Row) -> dict[str, str]:
        return dict(zip(self.schema, row, strict=True))


class Udm:
    """Unified data management: the shared in-memory table store behind `/sbi/udm`."""

    name = "udm"

    def __init__(self) -> None:
        self.tables: dict[str, DataTable] = {}

    def create_table(self, name: str, schema: Iterable[str]) -> DataTable:
        schema = tuple(schema)
        if not schema or len(set(schema)) != len(schema):
            msg = f"table `{name}` needs a non-empty schema of distinct columns"
            raise ArityMismatch(msg)

        if (table := self.tables.get(name)) is not None:
            if table.schema != schema:
                msg = f"table `{name}` exists with a different schema"
                raise DuplicateKey(msg)
            return table

        table = self.tables[name] = DataTable(name, schema)
        pdebug(f"udm: created table <cyn>{name}</cyn> {schema}")
        return table

    def table(self, name: str) -> DataTable:
        if (table := self.tables.get(name)) is None:
            msg = f"no table named `{name}`"
            raise TableNotFound(msg)
        return table

    def insert(self, table: str, row: Iterable[Any]) -> None:
        self.table(table).insert(row)

    def query(self, table: str, key: str) -> Row | None:
        return self.table(table).query(key)

    def update(self, table: str, key: str, row: Iterable[Any]) -> None:
        self.table(table).update(key, row)

    def delete(self, table: str, key: str) -> None:
        self.table(table).delete(key)

    def snapshot(self) -> dict[str, Any]:
        return {
            name: {"schema": list(t.schema), "rows": [list(r) for r in t.rows.values()]}
            for name, t in sorted(self.tables.items())
        }

    def save(self, path: Path) -> Path:
        try:
            path.write_text(canonical_json(self.snapshot()) + "\n", encoding="utf-8")
        except OSError as ose:
            msg = f"could not write `{path}`: {ose.strerror or ose}"
            raise IoError(msg) from ose
        return path

    @classmethod
    def restore(cls, path: Path) -> Udm:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as ose:
            msg = f"could not read `{path}`: {ose.strerror or ose}"
            raise IoError(msg) from ose

        data = parse_json(text, source=str(path))
        if not isinstance(data, dict):
            msg = f"{path}: expected an object of tables"
            raise ConfigError(msg)

        ret = cls()
        for name, spec in data.items():
            table = ret.create_table(name, spec["schema"])
            for row in spec["rows"]:
                table.insert(row)
        return ret

    # /sbi/udm/{table}[/{key...}]
    def handle(self, request: Message) -> Message:
        _, *rest = request.segments
        if not rest or not rest[0]:
            msg = f"no table in path {request.path}"
            raise MalformedFrame(msg)

        name, key = rest[0], "/".join(rest[1:])
        body = request.json() or {}
        if not isinstance(body, dict):
            msg = "udm expects a JSON object body"
            raise MalformedFrame(msg)

        match request.method, bool(key):
            case Method.PUT, False:
                table = self.create_table(name, body.get("schema") or ())
                return Message.response(200, json={"table": name, "schema": list(table.schema)})
            case Method.GET, False:
                table = self.table(name)
                return Message.response(200, json={"schema": list(table.schema), "rows": list(table.rows.values())})
            case Method.GET, True:
                if (row := self.query(name, key)) is None:
                    return Message.response(404)
                return Message.response(200, json={"row": list(row)})
            case Method.POST, True:
                row = body.get("row") or []
                if row and row[0] != key:
                    msg = f"primary key `{row[0]}` does not match `{key}`"
                    raise MalformedFrame(msg)
                self.insert(name, row)
                return Message.response(201)
            case Method.PUT, True:
                self.update(name, key, body.get("row") or [])
                return Message.response(200)
            case Method.DELETE, True:
                self.delete(name, key)
                return Message.response(204)
            case _:
                msg = f"udm does not support {request.method} {request.path}"
                raise MalformedFrame(msg)


class UdmClient:
    """Caller-side view of UDM; every operation is a bus round trip."""

    def __init__(self, bus: MessageBus, target: str = Udm.name) -> None:
        self.bus = bus
        self.target = target

    def _path(self, table: str, key: str | None = None) -> str:
        return f"/sbi/udm/{table}" if key is None else f"/sbi/udm/{table}/{key}"

    def create_table(self, table: str, schema: Iterable[str]) -> Proc[None]:
        yield from self.bus.call(self.target, Method.PUT, self._path(table), json={"schema": list(schema)})

    def insert(self, table: str, row: Iterable[str]) -> Proc[None]:
        row = list(row)
        yield from self.bus.call(self.target, Method.POST, self._path(table, row[0]), json={"row": row})

    def query(self, table: str, key: str) -> Proc[Row | None]:
        response = yield from self.bus.lookup(self.target, self._path(table, key))
        if response is None:
            return None
        return tuple(response.json()["row"])  # type: ignore[index, call-overload]

    def update(self, table: str, key: str, row: Iterable[str]) -> Proc[None]:
        yield from self.bus.call(self.target, Method.PUT, self._path(table, key), json={"row": list(row)})

    def upsert(self, table: str, row: Iterable[str]) -> Proc[bool]:
        """Insert, or update in place when the key exists. True when the row was new."""

        row = list(row)
        try:
            yield from self.insert(table, row)
        except DuplicateKey:
            yield from self.update(table, row[0], row)
            return False
        return True

    def delete(self, table: str, key: str) -> Proc[None]:
        yield from self.bus.call(self.target, Method.DELETE, self._path(table, key))

    def rows(self, table: str) -> Proc[list[Row]]:
        response = yield from self.bus.call(self.target, Method.GET, self._path(table))
        return [tuple(r) for r in response.json()["rows"]]  # type: ignore[index, union-attr]
