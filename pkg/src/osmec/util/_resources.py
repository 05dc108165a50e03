from __future__ import annotations

from dataclasses import fields
from decimal import Decimal
from typing import TYPE_CHECKING, ClassVar, Self

from osmec.util._config import ConfigSection, config_section, setting
from osmec.util._enum import Component
from osmec.util._validation import decimal

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator

_ZERO = Decimal(0)


@config_section
class ResourceVector(ConfigSection):
    """Computing, caching and communication quantities: cpu (millicores), memory/storage (MB), bandwidth (Mbps).

    Components are exact decimals so that e.g. `83.9` MB is held and returned without drift.
    """

    __group__: ClassVar[str] = "resources"

    cpu: Decimal = setting(decimal(), _ZERO)
    memory: Decimal = setting(decimal(), _ZERO)
    storage: Decimal = setting(decimal(), _ZERO)
    bandwidth: Decimal = setting(decimal(), _ZERO)

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, Decimal):
                value = Decimal(str(value))
                object.__setattr__(self, f.name, value)
            if value < 0:
                msg = f"resource component `{f.name}` is negative ({value})"
                raise ValueError(msg)

    @classmethod
    def zero(cls) -> Self:
        return cls()

    def __iter__(self) -> Iterator[Decimal]:
        return iter((self.cpu, self.memory, self.storage, self.bandwidth))

    def __add__(self, other: ResourceVector) -> ResourceVector:
        return _of(a + b for a, b in zip(self, other, strict=True))

    def __sub__(self, other: ResourceVector) -> ResourceVector:
        return _of(a - b for a, b in zip(self, other, strict=True))

    def __le__(self, other: ResourceVector) -> bool:
        return all(a <= b for a, b in zip(self, other, strict=True))

    def __ge__(self, other: ResourceVector) -> bool:
        return other <= self

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self)

    def ordering_key(self) -> tuple[Decimal, ...]:
        return tuple(self)

    def only(self, components: Iterable[Component]) -> ResourceVector:
        """Projection onto the named components; `other` covers storage and bandwidth."""

        wanted = set(components)
        return ResourceVector(
            cpu=self.cpu if Component.CPU in wanted else _ZERO,
            memory=self.memory if Component.MEMORY in wanted else _ZERO,
            storage=self.storage if Component.OTHER in wanted else _ZERO,
            bandwidth=self.bandwidth if Component.OTHER in wanted else _ZERO,
        )

    def with_overrides(self, **components: Decimal | None) -> ResourceVector:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update({k: v for k, v in components.items() if v is not None})
        return ResourceVector(**values)


def _of(values: Iterable[Decimal]) -> ResourceVector:
    cpu, memory, storage, bandwidth = values
    return ResourceVector(cpu=cpu, memory=memory, storage=storage, bandwidth=bandwidth)
