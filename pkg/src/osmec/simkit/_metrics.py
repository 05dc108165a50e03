from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from decimal import Decimal
from typing import TYPE_CHECKING, Any

import numpy as np

from osmec.simkit._events import EventLog
from osmec.util import Constant, EventKind, Location

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from osmec.simkit._events import EventRecord


@dataclass(frozen=True, slots=True)
class InstantiationSample:
    request_id: int
    instance_id: int
    template_id: str
    mode: str
    duration: float


@dataclass(frozen=True, slots=True)
class ComputeSample:
    request_id: int
    instance_id: int
    service_name: str
    served_from: str
    size_mb: Decimal
    cpu_work: float
    compute_time: float
    transmission_time: float


@dataclass(frozen=True, slots=True)
class UsagePoint:
    t: float
    node: int
    cpu: Decimal
    memory: Decimal


@dataclass(frozen=True, slots=True)
class VideoRow:
    size_mb: Decimal
    edge_tx: float
    cloud_tx: float
    edge_compute: float
    cloud_compute: float


@dataclass(frozen=True, slots=True)
class HistogramBin:
    group: str
    lo: float
    hi: float
    count: int


def _dec(value: Any) -> Decimal:
    return Decimal(str(value))


def histogram(values: Sequence[float], group: str, bins: int = Constant.histogram_bins) -> list[HistogramBin]:
    if not values:
        return []
    counts, edges = np.histogram(np.asarray(values, dtype=float), bins=bins)
    return [
        HistogramBin(group, float(lo), float(hi), int(n))
        for n, lo, hi in zip(counts, edges[:-1], edges[1:], strict=True)
    ]


def instantiation_samples(records: Iterable[EventRecord]) -> list[InstantiationSample]:
    """RequestReceived to InstanceActive, per instance."""

    received: dict[int, float] = {}
    ret = []
    for r in records:
        if r.kind is EventKind.REQUEST_RECEIVED:
            received[r.get("request_id")] = r.t
        elif r.kind is EventKind.INSTANCE_ACTIVE and (start := received.get(r.get("request_id"))) is not None:
            ret.append(
                InstantiationSample(
                    request_id=r.get("request_id"),
                    instance_id=r.get("instance_id"),
                    template_id=r.get("template_id"),
                    mode=r.get("mode"),
                    duration=r.t - start,
                ),
            )
    return ret


def compute_samples(records: Iterable[EventRecord]) -> list[ComputeSample]:
    return [
        ComputeSample(
            request_id=r.get("request_id"),
            instance_id=r.get("instance_id"),
            service_name=r.get("service_name"),
            served_from=r.get("served_from"),
            size_mb=_dec(r.get("size_mb", 0)),
            cpu_work=float(r.get("cpu_work")),
            compute_time=float(r.get("compute_time")),
            transmission_time=float(r.get("transmission_time")),
        )
        for r in records
        if r.kind is EventKind.SERVICE_COMPLETED
    ]


def usage_series(records: Iterable[EventRecord]) -> list[UsagePoint]:
    """Cpu and memory in use per node, as a step function rebuilt from grant/release events."""

    cpu: dict[int, Decimal] = defaultdict(Decimal)
    memory: dict[int, Decimal] = defaultdict(Decimal)
    ret = []
    for r in records:
        node = r.get("node")
        match r.kind:
            case EventKind.RESOURCE_GRANTED:
                cpu[node] += _dec(r.get("cpu"))
                memory[node] += _dec(r.get("memory"))
            case EventKind.CPU_RELEASED:
                cpu[node] -= _dec(r.get("cpu"))
            case EventKind.MEMORY_RELEASED:
                memory[node] -= _dec(r.get("memory"))
            case EventKind.NODE_REGISTERED:
                cpu[node] = memory[node] = Decimal(0)
            case _:
                continue
        ret.append(UsagePoint(r.t, node, cpu[node], memory[node]))
    return ret


def sample_usage(
    records: Iterable[EventRecord],
    node: int,
    window: tuple[float, float] | None = None,
) -> list[tuple[float, Decimal, Decimal]]:
    """(t, cpu_in_use, memory_in_use) for one node, optionally limited to lo <= t <= hi."""

    lo, hi = window if window is not None else (float("-inf"), float("inf"))
    return [(p.t, p.cpu, p.memory) for p in usage_series(records) if p.node == node and lo <= p.t <= hi]


def video_rows(samples: Iterable[ComputeSample]) -> list[VideoRow]:
    """Mean transmission and compute time per video size, edge-served against cloud-served."""

    by_size: dict[Decimal, dict[str, list[ComputeSample]]] = defaultdict(lambda: defaultdict(list))
    for s in samples:
        if s.service_name == "video":
            by_size[s.size_mb][s.served_from].append(s)

    ret = []
    for size in sorted(by_size):
        edge, cloud = by_size[size][Location.EDGE], by_size[size][Location.CLOUD]
        if not edge or not cloud:
            continue
        ret.append(
            VideoRow(
                size_mb=size,
                edge_tx=float(np.mean([s.transmission_time for s in edge])),
                cloud_tx=float(np.mean([s.transmission_time for s in cloud])),
                edge_compute=float(np.mean([s.compute_time for s in edge])),
                cloud_compute=float(np.mean([s.compute_time for s in cloud])),
            ),
        )
    return ret


@dataclass(frozen=True)
class MetricsReport:
    """Everything measured in a run. Built from the event log alone, so a persisted log rebuilds it."""

    instantiation: tuple[InstantiationSample, ...]
    compute: tuple[ComputeSample, ...]
    usage: tuple[UsagePoint, ...]
    video: tuple[VideoRow, ...]
    events: int
    log_hash: int

    @classmethod
    def from_records(cls, records: Iterable[EventRecord]) -> MetricsReport:
        records = list(records)
        compute = compute_samples(records)
        return cls(
            instantiation=tuple(instantiation_samples(records)),
            compute=tuple(compute),
            usage=tuple(usage_series(records)),
            video=tuple(video_rows(compute)),
            events=len(records),
            log_hash=EventLog(records).digest(),
        )

    @classmethod
    def from_log(cls, log: EventLog) -> MetricsReport:
        return cls.from_records(log.records)

    def durations(self, *, template_id: str | None = None, mode: str | None = None) -> list[float]:
        return [
            s.duration
            for s in self.instantiation
            if (template_id is None or s.template_id == template_id) and (mode is None or s.mode == mode)
        ]

    def compute_times(self, service_name: str) -> list[float]:
        return [s.compute_time for s in self.compute if s.service_name == service_name]

    def mean_duration(self, **filters: str | None) -> float:
        values = self.durations(**filters)
        return float(np.mean(values)) if values else float("nan")

    def instantiation_histogram(self) -> list[HistogramBin]:
        groups = sorted({(s.template_id, s.mode) for s in self.instantiation})
        return [
            b
            for template_id, mode in groups
            for b in histogram(self.durations(template_id=template_id, mode=mode), f"{template_id}:{mode}")
        ]

    def compute_histogram(self) -> list[HistogramBin]:
        names = sorted({s.service_name for s in self.compute})
        return [b for name in names for b in histogram(self.compute_times(name), name)]

    def summary(self) -> dict[str, Any]:
        groups = sorted({(s.template_id, s.mode) for s in self.instantiation})
        names = sorted({s.service_name for s in self.compute})
        return {
            "events": self.events,
            "log_hash": f"{self.log_hash:016x}",
            "instantiation": {
                f"{t}:{m}": round(self.mean_duration(template_id=t, mode=m), 6) for t, m in groups
            },
            "compute": {name: round(float(np.mean(self.compute_times(name))), 6) for name in names},
            "video_rows": len(self.video),
        }
