from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from osmec.util import Default, Location

if TYPE_CHECKING:
    from decimal import Decimal

    from osmec.util import WorkloadSettings


@dataclass(frozen=True, slots=True)
class VideoServing:
    video_id: str
    size_mb: float
    transmission_time: float
    compute_time: float
    served_from: Location


def transmission_time(size_mb: Decimal | float, bandwidth_mbps: float, base_latency: float = 0.0) -> float:
    return float(size_mb) * 8 / bandwidth_mbps + base_latency


def video_compute_time(settings: WorkloadSettings, cpu_work: float = Default.video_work) -> float:
    """Fixed per-request processing cost; the asset size plays no part in it."""

    return cpu_work / settings.cpu_rate


def serve_video(
    video_id: str,
    size_mb: Decimal | float,
    settings: WorkloadSettings,
    *,
    cached: bool,
    cpu_work: float = Default.video_work,
) -> VideoServing:
    if cached:
        tx = transmission_time(size_mb, settings.edge_mbps)
    else:
        tx = transmission_time(size_mb, settings.cloud_mbps, settings.cloud_base_latency)

    return VideoServing(
        video_id=video_id,
        size_mb=float(size_mb),
        transmission_time=tx,
        compute_time=video_compute_time(settings, cpu_work),
        served_from=Location.EDGE if cached else Location.CLOUD,
    )
