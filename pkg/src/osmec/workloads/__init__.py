from __future__ import annotations

from osmec.workloads._apps import AppRuntime
from osmec.workloads._cache import CatalogEntry, VideoAsset, VideoCache, load_catalog, parse_catalog
from osmec.workloads._charging import CHARGEABLE_STATES, ChargingRates, ChargingRecord, Usage, charge
from osmec.workloads._compute import (
    LABEL_BUCKETS,
    SERVICE_WORK,
    ComputeJob,
    FaceResult,
    compute_prime_sum,
    compute_sum,
    face_job,
    face_recognition,
)
from osmec.workloads._video import VideoServing, serve_video, transmission_time, video_compute_time

__all__ = [
    "CHARGEABLE_STATES",
    "LABEL_BUCKETS",
    "SERVICE_WORK",
    "AppRuntime",
    "CatalogEntry",
    "ChargingRates",
    "ChargingRecord",
    "ComputeJob",
    "FaceResult",
    "Usage",
    "VideoAsset",
    "VideoCache",
    "VideoServing",
    "charge",
    "compute_prime_sum",
    "compute_sum",
    "face_job",
    "face_recognition",
    "load_catalog",
    "parse_catalog",
    "serve_video",
    "transmission_time",
    "video_compute_time",
]
