from __future__ import annotations

from decimal import Decimal

import pytest

from osmec.util import AssetTooLarge, EmptyImage, InstanceNotCompleted, InstanceState, Location, WorkloadSettings
from osmec.workloads import (
    ChargingRates,
    Usage,
    VideoAsset,
    VideoCache,
    charge,
    compute_prime_sum,
    compute_sum,
    face_job,
    face_recognition,
    load_catalog,
    serve_video,
    transmission_time,
    video_compute_time,
)


def _trial_division_sums(limit: int) -> list[int]:
    sums = [0] * (limit + 1)
    primes: list[int] = []
    total = 0
    for n in range(2, limit + 1):
        if all(n % p for p in primes if p * p <= n):
            primes.append(n)
            total += n
        sums[n] = total
    return sums


def test_prime_sum_matches_trial_division() -> None:
    expected = _trial_division_sums(10_000)

    assert compute_prime_sum(10) == 17
    assert compute_prime_sum(1) == 0
    assert compute_prime_sum(-5) == 0
    for n in range(10_001):
        assert compute_prime_sum(n) == expected[n], n


def test_sum_closed_form() -> None:
    for n in (0, 1, 10, 999, 123_456, 1_000_000):
        assert compute_sum(n) == sum(range(n + 1))
    with pytest.raises(ValueError, match="non-negative"):
        compute_sum(-1)


def test_face_recognition_is_deterministic() -> None:
    settings = WorkloadSettings()
    job = face_job("visitor-0042.jpg", 2)

    first, second = face_recognition(job, settings), face_recognition(job, settings)
    assert first == second
    assert first.label.startswith("person-")
    assert job.memory_mb == Decimal("83.9")
    assert first.compute_time == pytest.approx(job.cpu_work / settings.cpu_rate)
    assert first.transfer_time == pytest.approx(2 * 8 / settings.uplink_mbps)

    with pytest.raises(EmptyImage):
        face_recognition(face_job("blank.jpg", 0), settings)


def test_video_costs() -> None:
    settings = WorkloadSettings()
    sizes = [Decimal(s) for s in ("50", "100", "200", "400", "800")]

    gaps = []
    for size in sizes:
        edge = serve_video("v", size, settings, cached=True)
        cloud = serve_video("v", size, settings, cached=False)
        assert edge.served_from is Location.EDGE
        assert cloud.served_from is Location.CLOUD
        assert edge.compute_time == cloud.compute_time == pytest.approx(0.14)
        gaps.append(cloud.transmission_time - edge.transmission_time)

    assert all(a < b for a, b in zip(gaps, gaps[1:], strict=False))
    assert transmission_time(100, 800) == pytest.approx(1.0)
    assert video_compute_time(settings) == pytest.approx(0.14)


def test_cache_evicts_least_popular() -> None:
    cache = VideoCache(100)
    cache.insert(VideoAsset("a", Decimal(40)))
    cache.insert(VideoAsset("b", Decimal(40)))
    assert cache.lookup("a")
    assert cache.lookup("a")
    assert cache.lookup("b")

    cache.insert(VideoAsset("c", Decimal(40)))

    assert set(cache.resident) == {"a", "c"}
    assert cache.evicted == ["b"]
    assert cache.resident["a"].popularity_count == 2
    assert cache.used_mb == Decimal(80)

    with pytest.raises(AssetTooLarge):
        cache.insert(VideoAsset("huge", Decimal(101)))


def test_cache_tracks_popularity_of_misses() -> None:
    cache = VideoCache(100)
    assert not cache.lookup("concert")
    assert not cache.lookup("concert")
    assert cache.lookup("unknown") is False

    assert cache.ranking() == [("concert", 2), ("unknown", 1)]


def test_default_catalog() -> None:
    catalog = load_catalog()
    by_id = {a.video_id: a for a in catalog}

    assert len(catalog) == 6
    assert by_id["campus-tour"].location is Location.EDGE
    assert by_id["concert"].location is Location.CLOUD

    cache = VideoCache(4096)
    cache.preload(catalog)
    assert set(cache.resident) == {"campus-tour", "lecture-01", "lecture-02"}


def test_charge() -> None:
    rates = ChargingRates(rate_cpu=Decimal("0.001"), rate_mem=Decimal("0.00001"))
    usage = Usage(cpu_work=Decimal(800), mem_mb_time=Decimal("83.9") * 10)

    record = charge(3, InstanceState.MEMORY_HELD, usage, rates)

    assert record.cost == Decimal("0.800") + Decimal("0.00839")
    assert record.row() == ("3", "800", "839.0", str(record.cost))
    with pytest.raises(InstanceNotCompleted):
        charge(3, InstanceState.ACTIVE, usage, rates)
