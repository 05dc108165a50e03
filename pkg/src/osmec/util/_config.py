from __future__ import annotations

import json
from dataclasses import MISSING, dataclass, fields, is_dataclass
from dataclasses import field as dataclass_field
from decimal import Decimal
from enum import Enum
from typing import TYPE_CHECKING, Any, ClassVar, Self

from osmec.util._console_io import pwarn
from osmec.util._errors import ConfigError, IoError

if TYPE_CHECKING:
    from collections.abc import Callable
    from pathlib import Path

    from osmec.util._typing_ext import ConfigValue, Validator


def setting(
    validate: Validator | None = None,
    default: Any = MISSING,
    *,
    default_factory: Callable[[], Any] | Any = MISSING,
    section: type[ConfigSection] | None = None,
    required: bool = False,
) -> Any:
    """Declare a config key: its validator, or the nested section type it delegates to.

    A nested section defaults to its own defaults unless `required` is set.
    """

    metadata = {"validate": validate, "section": section}
    if section is not None and not required and default is MISSING and default_factory is MISSING:
        default_factory = section
    return dataclass_field(default=default, default_factory=default_factory, metadata=metadata)


def config_section[S: type](cls: S) -> S:
    return dataclass(kw_only=True, frozen=True)(cls)


class ConfigSection:
    __group__: ClassVar[str] = ""

    @classmethod
    def from_mapping(cls, data: ConfigValue, *, where: str | None = None) -> Self:
        prefix = where if where is not None else (f"{cls.__group__}." if cls.__group__ else "")
        if not isinstance(data, dict):
            what = prefix.rstrip(".") or cls.__name__
            msg = f"{what}: expected an object, but got `{type(data).__name__}`"
            raise ConfigError(msg)

        by_name = {f.name: f for f in fields(cls)}  # type: ignore[arg-type]
        values: dict[str, Any] = {}

        for key, val in data.items():
            if cls.check_unrecognized_key(key, prefix):
                continue

            meta = by_name[key].metadata
            if (nested := meta["section"]) is not None:
                values[key] = nested.from_mapping(val, where=f"{prefix}{key}.")
            elif (validate := meta["validate"]) is not None:
                values[key] = validate(key, val, prefix)
            else:
                values[key] = val

        cls.check_missing_keys(values, prefix)
        return cls(**values)

    @classmethod
    def check_unrecognized_key(cls, key: str, prefix: str) -> bool:
        if key not in cls.__dataclass_fields__:  # type: ignore[attr-defined]
            pwarn(f"ignoring unrecognized key: <ylw>{prefix}{key}</ylw>")
            return True

        return False

    @classmethod
    def check_missing_keys(cls, values: dict[str, Any], prefix: str) -> None:
        required = [
            f.name
            for f in fields(cls)  # type: ignore[arg-type]
            if f.default is MISSING and f.default_factory is MISSING and f.init
        ]
        if missing := [key for key in required if key not in values]:
            joined = ", ".join(f"{prefix}{key}" for key in missing)
            msg = f"missing key(s): {joined}"
            raise ConfigError(msg)

    def to_mapping(self) -> dict[str, Any]:
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self)}  # type: ignore[arg-type]


def _plain(value: Any) -> Any:
    match value:
        case ConfigSection():
            return value.to_mapping()
        case Enum():
            return value.value
        case Decimal():
            return str(value)
        case list() | tuple():
            return [_plain(v) for v in value]
        case dict():
            return {str(k): _plain(v) for k, v in value.items()}
        case _ if is_dataclass(value):
            return {f.name: _plain(getattr(value, f.name)) for f in fields(value)}
        case _:
            return value


def section_list(cls: type[ConfigSection]) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> list[Any]:
        if not isinstance(value, list):
            msg = f"{where}{key}: expected a list, but got `{type(value).__name__}`"
            raise ConfigError(msg)
        return [cls.from_mapping(item, where=f"{where}{key}[{i}].") for i, item in enumerate(value)]

    return validate


def read_json(path: Path) -> ConfigValue:
    """Read a JSON config document; floats keep their literal text as Decimal."""

    try:
        text = path.read_text(encoding="utf-8")
    except OSError as ose:
        msg = f"could not read `{path}`: {ose.strerror or ose}"
        raise IoError(msg) from ose

    return parse_json(text, source=str(path))


def parse_json(text: str, *, source: str = "<string>") -> ConfigValue:
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as jde:
        msg = f"{source}:{jde.lineno}:{jde.colno}: {jde.msg.lower()}"
        raise ConfigError(msg) from None
