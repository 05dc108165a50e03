from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from typing import TYPE_CHECKING

import numpy as np

from osmec.util import Default, EmptyImage, stable_hash64

if TYPE_CHECKING:
    from osmec.util import WorkloadSettings

LABEL_BUCKETS = 16

SERVICE_WORK: dict[str, float] = {
    "sum": Default.sum_work,
    "prime_sum": Default.prime_sum_work,
    "face_recognition": Default.prime_sum_work * Default.face_work_factor,
}


def compute_sum(n: int) -> int:
    if n < 0:
        msg = f"n must be non-negative, got {n}"
        raise ValueError(msg)
    return n * (n + 1) // 2


def compute_prime_sum(n: int) -> int:
    """Sum of the primes <= n (sieve of Eratosthenes)."""

    if n < 2:  # noqa: PLR2004
        return 0

    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return int(np.flatnonzero(sieve).sum(dtype=np.int64))


@dataclass(frozen=True, slots=True)
class ComputeJob:
    service_name: str
    cpu_work: float
    memory_mb: Decimal
    n: int | None = None
    blob_id: str | None = None
    size_mb: float = 0.0

    def __post_init__(self) -> None:
        if self.cpu_work <= 0:
            msg = f"cpu_work must be positive, got {self.cpu_work}"
            raise ValueError(msg)


@dataclass(frozen=True, slots=True)
class FaceResult:
    label: str
    transfer_time: float
    compute_time: float


def face_job(blob_id: str, size_mb: float, cpu_work: float | None = None) -> ComputeJob:
    return ComputeJob(
        service_name="face_recognition",
        cpu_work=SERVICE_WORK["face_recognition"] if cpu_work is None else cpu_work,
        memory_mb=Default.face_memory_mb,
        blob_id=blob_id,
        size_mb=size_mb,
    )


def face_recognition(job: ComputeJob, settings: WorkloadSettings) -> FaceResult:
    """Deterministic stand-in: the label is a hash bucket of the blob id, the cost is the declared work."""

    if job.size_mb <= 0 or not job.blob_id:
        msg = f"image `{job.blob_id}` is empty"
        raise EmptyImage(msg)

    bucket = stable_hash64(job.blob_id.encode("utf-8")) % LABEL_BUCKETS
    return FaceResult(
        label=f"person-{bucket:02d}",
        transfer_time=job.size_mb * 8 / settings.uplink_mbps,
        compute_time=job.cpu_work / settings.cpu_rate,
    )
