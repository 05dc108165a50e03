from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Self

from osmec.util import (
    Interface,
    JSONValue,
    MalformedFrame,
    MessageKind,
    Method,
    UnknownNamespace,
    json_bytes,
    parse_json,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

# Header names the codec emits itself.
RESERVED_HEADERS = frozenset({"correlation-id", "content-length"})

MAX_CORRELATION_ID = 2**64 - 1

_HEADER_KEY = re.compile(r"[!#$%&'*+\-.^_`|~0-9a-z]+")
_HEADER_VALUE = re.compile(r"[\x20-\x7e]*")
_PATH = re.compile(r"/[\x21-\x7e]*")

type Headers = tuple[tuple[str, str], ...]


def _check_path(path: str) -> None:
    if not _PATH.fullmatch(path):
        msg = f"invalid path {path!r}"
        raise MalformedFrame(msg)

    ns = path.split("/", 2)[1]
    if ns not in Interface or path == f"/{ns}":
        msg = f"path {path!r} lacks an /sbi, /nbi or /ebi namespace"
        raise UnknownNamespace(msg)


def _normalize_headers(headers: Iterable[tuple[str, str]]) -> Headers:
    ret: list[tuple[str, str]] = []
    seen: set[str] = set()

    for raw_key, value in headers:
        key = raw_key.lower()
        if not _HEADER_KEY.fullmatch(key):
            msg = f"invalid header name {raw_key!r}"
            raise MalformedFrame(msg)
        if key in RESERVED_HEADERS:
            msg = f"header `{key}` is managed by the codec"
            raise MalformedFrame(msg)
        if key in seen:
            msg = f"duplicate header `{key}`"
            raise MalformedFrame(msg)
        if not _HEADER_VALUE.fullmatch(value):
            msg = f"header `{key}` has a non-printable value"
            raise MalformedFrame(msg)
        seen.add(key)
        ret.append((key, value))

    return tuple(ret)


@dataclass(frozen=True)
class Message:
    """One request or response on the bus.

    Responses carry no method and no path; requests carry no status. Header names are
    stored lowercased in arrival order.
    """

    kind: MessageKind
    method: Method | None = None
    path: str | None = None
    headers: Headers = field(default=())
    body: bytes = b""
    correlation_id: int = 0
    status: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "headers", _normalize_headers(self.headers))

        if not 0 <= self.correlation_id <= MAX_CORRELATION_ID:
            msg = f"correlation id {self.correlation_id} is out of range"
            raise MalformedFrame(msg)

        if self.kind is MessageKind.REQUEST:
            if self.method is None or self.path is None or self.status is not None:
                msg = "a request needs a method and a path and no status"
                raise MalformedFrame(msg)
            _check_path(self.path)
        elif self.method is not None or self.path is not None or self.status is None:
            msg = "a response needs a status and no method or path"
            raise MalformedFrame(msg)
        elif not 100 <= self.status <= 599:  # noqa: PLR2004
            msg = f"status {self.status} is outside 100-599"
            raise MalformedFrame(msg)

    @classmethod
    def request(
        cls,
        method: Method,
        path: str,
        *,
        headers: Iterable[tuple[str, str]] = (),
        body: bytes = b"",
        json: Any = None,
    ) -> Self:
        if json is not None:
            body = json_bytes(json)
        return cls(kind=MessageKind.REQUEST, method=Method(method), path=path, headers=tuple(headers), body=body)

    @classmethod
    def response(
        cls,
        status: int,
        *,
        headers: Iterable[tuple[str, str]] = (),
        body: bytes = b"",
        json: Any = None,
        correlation_id: int = 0,
    ) -> Self:
        if json is not None:
            body = json_bytes(json)
        return cls(
            kind=MessageKind.RESPONSE,
            status=status,
            headers=tuple(headers),
            body=body,
            correlation_id=correlation_id,
        )

    @property
    def is_request(self) -> bool:
        return self.kind is MessageKind.REQUEST

    @property
    def ok(self) -> bool:
        return self.status is not None and self.status < 400  # noqa: PLR2004

    @property
    def interface(self) -> Interface | None:
        return None if self.path is None else Interface(self.path.split("/", 2)[1])

    @property
    def segments(self) -> tuple[str, ...]:
        """Path segments after the namespace, e.g. `/sbi/udm/apps/x` -> `("udm", "apps", "x")`."""

        if self.path is None:
            return ()
        return tuple(self.path.split("/")[2:])

    def header(self, name: str, default: str | None = None) -> str | None:
        name = name.lower()
        return next((v for k, v in self.headers if k == name), default)

    def with_header(self, name: str, value: str) -> Message:
        name = name.lower()
        kept = tuple((k, v) for k, v in self.headers if k != name)
        return replace(self, headers=(*kept, (name, value)))

    def json(self) -> JSONValue:
        if not self.body:
            return None
        try:
            text = self.body.decode("utf-8")
        except UnicodeDecodeError:
            msg = "body is not UTF-8 JSON"
            raise MalformedFrame(msg) from None
        return parse_json(text, source="message body")

    def text(self) -> str:
        return self.body.decode("utf-8", errors="replace")
