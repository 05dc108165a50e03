from __future__ import annotations

import hashlib
import json
from decimal import Decimal
from enum import Enum
from typing import Any


def _default(value: Any) -> Any:
    if isinstance(value, Decimal):
        return str(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, tuple | set | frozenset):
        return list(value)
    msg = f"cannot encode `{type(value).__name__}` as JSON"
    raise TypeError(msg)


def canonical_json(value: Any) -> str:
    """Compact, key-sorted JSON; Decimals become their exact decimal string."""

    return json.dumps(value, sort_keys=True, separators=(",", ":"), default=_default, ensure_ascii=True)


def json_bytes(value: Any) -> bytes:
    return canonical_json(value).encode("ascii")


def stable_hash64(data: bytes) -> int:
    """Platform-independent 64-bit digest (BLAKE2b, 8-byte output, big-endian)."""

    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")
