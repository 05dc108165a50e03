from collections.abc import Callable, Generator
from typing import Any, TypeVar

import simpy

ValidatedValue = TypeVar("ValidatedValue")

type JSONValue = str | int | float | bool | None | list[JSONValue] | dict[str, JSONValue]
type JSON = dict[str, JSONValue]
type ConfigValue = JSONValue
type Validator = Callable[[str, ConfigValue, str], Any]

# A simpy process body: yields events, returns its value through StopIteration.
type Proc[T] = Generator[simpy.Event, Any, T]
