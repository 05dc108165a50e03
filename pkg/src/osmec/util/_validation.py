from __future__ import annotations

from decimal import Decimal, InvalidOperation
from enum import StrEnum
from typing import TYPE_CHECKING, Any

from semver import VersionInfo

from osmec.util._errors import ConfigError

if TYPE_CHECKING:
    from collections.abc import Callable

    from osmec.util._typing_ext import ConfigValue, Validator


def _type_name(value: object) -> str:
    return "null" if value is None else type(value).__name__


def _fail(key: str, where: str, msg: str) -> ConfigError:
    return ConfigError(f"{where}{key}: {msg}")


def validate_str(key: str, value: ConfigValue, where: str) -> str:
    if not isinstance(value, str):
        raise _fail(key, where, f"expected `str`, but got `{_type_name(value)}`")
    return value


def validate_bool(key: str, value: ConfigValue, where: str) -> bool:
    if not isinstance(value, bool):
        raise _fail(key, where, f"expected `bool`, but got `{_type_name(value)}`")
    return value


def integer(*, minimum: int | None = None) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise _fail(key, where, f"expected `int`, but got `{_type_name(value)}`")
        if minimum is not None and value < minimum:
            raise _fail(key, where, f"expected a value >= {minimum}, but got {value}")
        return value

    return validate


def number(*, minimum: float | None = None, positive: bool = False) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> float:
        if isinstance(value, bool) or not isinstance(value, int | float | Decimal):
            raise _fail(key, where, f"expected a number, but got `{_type_name(value)}`")
        ret = float(value)
        if positive and ret <= 0:
            raise _fail(key, where, f"expected a positive number, but got {value}")
        if minimum is not None and ret < minimum:
            raise _fail(key, where, f"expected a value >= {minimum}, but got {value}")
        return ret

    return validate


def decimal(*, minimum: Decimal | None = Decimal(0)) -> Validator:
    """Exact quantities: JSON/TOML floats are read through their text so `83.9` stays `83.9`."""

    def validate(key: str, value: ConfigValue, where: str) -> Decimal:
        if isinstance(value, bool) or not isinstance(value, int | float | str | Decimal):
            raise _fail(key, where, f"expected a number, but got `{_type_name(value)}`")
        try:
            ret = Decimal(str(value))
        except InvalidOperation:
            raise _fail(key, where, f"expected a number, but got {value!r}") from None
        if minimum is not None and ret < minimum:
            raise _fail(key, where, f"expected a value >= {minimum}, but got {value}")
        return ret

    return validate


def choice(enum: type[StrEnum]) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> StrEnum:
        if not isinstance(value, str) or value not in enum:
            choices = ", ".join(str(v) for v in enum)
            raise _fail(key, where, f"expected one of ({choices}), but got {value!r}")
        return enum(value)

    return validate


def semver_str(*, supported: tuple[str, ...] = ()) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> str:
        ret = validate_str(key, value, where)
        try:
            VersionInfo.parse(ret)
        except ValueError:
            raise _fail(key, where, f"expected a semver string (major.minor.patch), but got {ret!r}") from None
        if supported and ret not in supported:
            raise _fail(key, where, f"version {ret} is unsupported. choose from ({', '.join(supported)})")
        return ret

    return validate


def list_of(item: Validator, *, min_items: int = 0) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> list[Any]:
        if not isinstance(value, list):
            raise _fail(key, where, f"expected a list, but got `{_type_name(value)}`")
        if len(value) < min_items:
            raise _fail(key, where, f"expected at least {min_items} item(s)")
        return [item(f"{key}[{i}]", v, where) for i, v in enumerate(value)]

    return validate


def mapping_of(item: Validator) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> dict[str, Any]:
        if not isinstance(value, dict):
            raise _fail(key, where, f"expected an object, but got `{_type_name(value)}`")
        return {str(k): item(f"{key}.{k}", v, where) for k, v in value.items()}

    return validate


def optional(inner: Validator) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> Any:
        return None if value is None else inner(key, value, where)

    return validate


def either(*validators: Validator) -> Validator:
    """First validator that accepts wins; the last one's error is reported."""

    def validate(key: str, value: ConfigValue, where: str) -> Any:
        err: ConfigError | None = None
        for v in validators:
            try:
                return v(key, value, where)
            except ConfigError as e:
                err = e
        raise err or _fail(key, where, "no validator")

    return validate


def passthrough(_key: str, value: ConfigValue, _where: str) -> ConfigValue:
    return value


def custom(func: Callable[[ConfigValue], Any], expected: str) -> Validator:
    def validate(key: str, value: ConfigValue, where: str) -> Any:
        try:
            return func(value)
        except (TypeError, ValueError, ArithmeticError) as e:
            raise _fail(key, where, f"expected {expected} ({e})") from None

    return validate
