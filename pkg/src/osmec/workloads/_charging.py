from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from osmec.util import InstanceNotCompleted, InstanceState

CHARGEABLE_STATES = frozenset({InstanceState.COMPLETED, InstanceState.MEMORY_HELD, InstanceState.RELEASED})


@dataclass(frozen=True, slots=True)
class ChargingRates:
    rate_cpu: Decimal
    rate_mem: Decimal


@dataclass(frozen=True, slots=True)
class Usage:
    cpu_work: Decimal
    mem_mb_time: Decimal


@dataclass(frozen=True, slots=True)
class ChargingRecord:
    instance_id: int
    cpu_work_consumed: Decimal
    memory_mb_time: Decimal
    cost: Decimal

    def row(self) -> tuple[str, ...]:
        """Row for the UDM charging table (instance_id, cpu_work, mem_mb_time, cost)."""

        return (str(self.instance_id), str(self.cpu_work_consumed), str(self.memory_mb_time), str(self.cost))


def charge(instance_id: int, state: InstanceState, usage: Usage, rates: ChargingRates) -> ChargingRecord:
    if state not in CHARGEABLE_STATES:
        msg = f"inst-{instance_id} is {state}; only completed instances are charged"
        raise InstanceNotCompleted(msg)

    cost = usage.cpu_work * rates.rate_cpu + usage.mem_mb_time * rates.rate_mem
    return ChargingRecord(instance_id, usage.cpu_work, usage.mem_mb_time, cost)
