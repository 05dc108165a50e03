from __future__ import annotations

from osmec.simkit._events import EventLog, EventRecord, parse_line, request_trace
from osmec.simkit._export import export_report
from osmec.simkit._metrics import (
    ComputeSample,
    HistogramBin,
    InstantiationSample,
    MetricsReport,
    UsagePoint,
    VideoRow,
    histogram,
    sample_usage,
    usage_series,
)
from osmec.simkit._runner import ScenarioRun, measure_instantiation, run_scenario
from osmec.simkit._scenario import (
    Bandwidths,
    ContainerFault,
    FaultSpec,
    NodeSpec,
    ReleaseSpec,
    RequestSpec,
    Scenario,
    ScenarioConfig,
    bundled_scenario,
    bundled_scenarios,
    find_scenario,
    load_scenario,
    parse_scenario,
)
from osmec.simkit._system import EdgeSystem, IdCounters, SubmitResult, default_capacity, request_frame

__all__ = [
    "Bandwidths",
    "ComputeSample",
    "ContainerFault",
    "EdgeSystem",
    "EventLog",
    "EventRecord",
    "FaultSpec",
    "HistogramBin",
    "IdCounters",
    "InstantiationSample",
    "MetricsReport",
    "NodeSpec",
    "ReleaseSpec",
    "RequestSpec",
    "Scenario",
    "ScenarioConfig",
    "ScenarioRun",
    "SubmitResult",
    "UsagePoint",
    "VideoRow",
    "bundled_scenario",
    "bundled_scenarios",
    "default_capacity",
    "export_report",
    "find_scenario",
    "histogram",
    "load_scenario",
    "measure_instantiation",
    "parse_line",
    "parse_scenario",
    "request_frame",
    "request_trace",
    "run_scenario",
    "sample_usage",
    "usage_series",
]
