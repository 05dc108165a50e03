from decimal import Decimal

from osmec.__init__ import __version__


class Constant:
    settings_file: str = "osmec.toml"
    session_dir: str = ".osmec"
    session_file: str = "session.toml"
    events_log: str = "events.log"
    wire_version: str = "SBM/1"
    legacy_magic: bytes = b"XMEC1"
    osmec_versions: tuple[str, ...] = (__version__,)
    general_nfs: tuple[str, ...] = ("udm", "nrf", "srf", "cpcf", "upf")
    shared_nfs: tuple[str, ...] = ("srf", "cpcf", "udm", "nrf")
    apps_table: str = "apps"
    apps_schema: tuple[str, ...] = ("app_id", "nf_kind", "image_ref", "endpoint", "service_class", "registered_at")
    charging_table: str = "charging"
    charging_schema: tuple[str, ...] = ("instance_id", "cpu_work", "mem_mb_time", "cost")
    popularity_table: str = "video_popularity"
    popularity_schema: tuple[str, ...] = ("video_id", "count")
    histogram_bins: int = 20


class Default:
    hop_latency: float = 0.0
    deadline: float = 600.0
    fetch_delay: float = 50.0
    overhead: float = 1.0
    heartbeat_interval: float = 5.0
    liveness_intervals: int = 3
    cpu_rate: float = 1000.0
    uplink_mbps: float = 100.0
    edge_mbps: float = 800.0
    cloud_mbps: float = 200.0
    cloud_base_latency: float = 0.05
    cache_mb: float = 4096.0
    jitter: float = 0.1
    sum_work: float = 20.0
    prime_sum_work: float = 200.0
    face_work_factor: float = 4.0
    video_work: float = 140.0
    face_memory_mb: Decimal = Decimal("83.9")
    node_capacity: dict[str, int] = {"cpu": 4000, "memory": 32768, "storage": 100000, "bandwidth": 1000}  # noqa: RUF012
