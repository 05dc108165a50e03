from __future__ import annotations

from typing import TYPE_CHECKING, Any

import pytest
import simpy

from osmec.bus import MessageBus
from osmec.simkit import EdgeSystem, EventLog
from osmec.util import BusSettings, Settings

if TYPE_CHECKING:
    from collections.abc import Callable

    from osmec.util import Proc


@pytest.fixture(autouse=True)
def _quiet(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("OSMEC_LOG_LEVEL", "error")


@pytest.fixture
def settings() -> Settings:
    """Defaults without jitter, so timings are exact."""

    return Settings().with_overrides(workloads={"jitter": 0.0})


@pytest.fixture
def system(settings: Settings) -> EdgeSystem:
    return EdgeSystem(settings)


@pytest.fixture
def env() -> simpy.Environment:
    return simpy.Environment()


@pytest.fixture
def log(env: simpy.Environment) -> EventLog:
    ret = EventLog()
    ret.attach(env)
    return ret


@pytest.fixture
def bus(env: simpy.Environment) -> MessageBus:
    return MessageBus(env, BusSettings())


@pytest.fixture
def drive(env: simpy.Environment) -> Callable[[Proc[Any]], Any]:
    """Run one process body on the test environment and return its value."""

    def run(proc: Proc[Any]) -> Any:
        p = env.process(proc)
        env.run(until=p)
        return p.value

    return run
