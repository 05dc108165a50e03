from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Any, ClassVar, Self

import toml
from toml import TomlDecodeError

from osmec.__init__ import __version__
from osmec.util._config import ConfigSection, config_section, setting
from osmec.util._defaults import Constant, Default
from osmec.util._enum import Mode
from osmec.util._errors import ConfigError, IoError
from osmec.util._validation import choice, integer, number, semver_str


@config_section
class OsmecSettings(ConfigSection):
    __group__: ClassVar[str] = "osmec"

    version: str = setting(semver_str(supported=Constant.osmec_versions), __version__)


@config_section
class BusSettings(ConfigSection):
    __group__: ClassVar[str] = "bus"

    hop_latency: float = setting(number(minimum=0), Default.hop_latency)
    deadline: float = setting(number(positive=True), Default.deadline)


@config_section
class NrfSettings(ConfigSection):
    __group__: ClassVar[str] = "nrf"

    fetch_delay: float = setting(number(minimum=0), Default.fetch_delay)


@config_section
class ManoSettings(ConfigSection):
    __group__: ClassVar[str] = "mano"

    overhead: float = setting(number(minimum=0), Default.overhead)
    heartbeat_interval: float = setting(number(positive=True), Default.heartbeat_interval)
    liveness_intervals: int = setting(integer(minimum=1), Default.liveness_intervals)
    mode: Mode = setting(choice(Mode), Mode.PARALLEL)

    @property
    def liveness_window(self) -> float:
        return self.heartbeat_interval * self.liveness_intervals


@config_section
class WorkloadSettings(ConfigSection):
    __group__: ClassVar[str] = "workloads"

    cpu_rate: float = setting(number(positive=True), Default.cpu_rate)
    uplink_mbps: float = setting(number(positive=True), Default.uplink_mbps)
    edge_mbps: float = setting(number(positive=True), Default.edge_mbps)
    cloud_mbps: float = setting(number(positive=True), Default.cloud_mbps)
    cloud_base_latency: float = setting(number(minimum=0), Default.cloud_base_latency)
    cache_mb: float = setting(number(positive=True), Default.cache_mb)
    jitter: float = setting(number(minimum=0), Default.jitter)


@config_section
class Settings(ConfigSection):
    __group__: ClassVar[str] = ""

    osmec: OsmecSettings = setting(section=OsmecSettings)
    bus: BusSettings = setting(section=BusSettings)
    nrf: NrfSettings = setting(section=NrfSettings)
    mano: ManoSettings = setting(section=ManoSettings)
    workloads: WorkloadSettings = setting(section=WorkloadSettings)

    @classmethod
    def from_toml_file(cls, file: Path) -> Self:
        try:
            with file.open("r", encoding="utf-8") as f:
                data = toml.load(f)
        except OSError as ose:
            msg = f"could not read `{file}`: {ose.strerror or ose}"
            raise IoError(msg) from ose
        except TomlDecodeError as tde:
            msg = f"`{file.name}`: {str(tde).lower()}"
            raise ConfigError(msg) from None

        if (jitter := data.get("workloads", {}).get("jitter")) is not None and jitter >= 1:
            msg = f"`{file.name}`: workloads.jitter: expected a fraction below 1, but got {jitter}"
            raise ConfigError(msg)

        return cls.from_mapping(data)

    def with_overrides(self, **sections: dict[str, Any]) -> Self:
        """Copy with per-section overrides, e.g. `with_overrides(bus={"hop_latency": 0.0})`."""

        ret = self
        for name, values in sections.items():
            ret = replace(ret, **{name: replace(getattr(ret, name), **values)})
        return ret

    def bench(self) -> Self:
        """Timing-neutral profile: instantaneous hops, pre-staged images, no jitter."""

        return self.with_overrides(bus={"hop_latency": 0.0}, nrf={"fetch_delay": 0.0}, workloads={"jitter": 0.0})


def find_settings_file(origin: Path | None = None) -> Path | None:
    cwd = origin or Path.cwd()

    while True:
        if (candidate := cwd / Constant.settings_file).is_file():
            return candidate
        if cwd == cwd.parent:
            return None
        cwd = cwd.parent


def load_settings(path: Path | None = None) -> Settings:
    """Explicit path, else the nearest `osmec.toml` upwards from the working directory, else defaults."""

    if path is None:
        path = find_settings_file()
    elif not path.is_file():
        msg = f"settings file `{path}` does not exist"
        raise IoError(msg)

    return Settings() if path is None else Settings.from_toml_file(path)
