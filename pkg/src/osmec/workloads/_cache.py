from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from importlib import resources
from typing import TYPE_CHECKING, ClassVar

from osmec.util import (
    AssetTooLarge,
    ConfigError,
    ConfigSection,
    Location,
    config_section,
    parse_json,
    pdebug,
    read_json,
    setting,
)
from osmec.util._validation import choice, decimal, validate_str

if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

    from osmec.util import JSONValue


@dataclass(frozen=True, slots=True)
class VideoAsset:
    video_id: str
    size_mb: Decimal
    popularity_count: int = 0
    location: Location = Location.CLOUD


@config_section
class CatalogEntry(ConfigSection):
    __group__: ClassVar[str] = "catalog"

    video_id: str = setting(validate_str)
    size_mb: Decimal = setting(decimal(minimum=Decimal(0)))
    location: Location = setting(choice(Location), Location.CLOUD)

    def asset(self) -> VideoAsset:
        return VideoAsset(self.video_id, self.size_mb, 0, self.location)


def parse_catalog(data: JSONValue, *, where: str = "catalog") -> tuple[VideoAsset, ...]:
    if not isinstance(data, list):
        msg = f"{where}: expected a list of {{video_id, size_mb, location}}"
        raise ConfigError(msg)
    return tuple(CatalogEntry.from_mapping(item, where=f"{where}[{i}].").asset() for i, item in enumerate(data))


def load_catalog(path: Path | None = None) -> tuple[VideoAsset, ...]:
    """Read a video catalog file; the bundled default when no path is given."""

    if path is not None:
        return parse_catalog(read_json(path), where=str(path))

    text = resources.files("osmec.data").joinpath("catalog.json").read_text(encoding="utf-8")
    return parse_catalog(parse_json(text, source="catalog.json"))


class VideoCache:
    """Edge video store with a hit-counter popularity metric and min-popularity eviction.

    Popularity is tracked for every id ever looked up, resident or not, and never decreases.
    """

    def __init__(self, capacity_mb: Decimal | float) -> None:
        self.capacity_mb = Decimal(str(capacity_mb))
        self.resident: dict[str, VideoAsset] = {}
        self.popularity: dict[str, int] = {}
        self.evicted: list[str] = []

    @property
    def used_mb(self) -> Decimal:
        return sum((a.size_mb for a in self.resident.values()), Decimal(0))

    def popularity_bump(self, video_id: str) -> int:
        count = self.popularity[video_id] = self.popularity.get(video_id, 0) + 1
        if (asset := self.resident.get(video_id)) is not None:
            self.resident[video_id] = replace(asset, popularity_count=count)
        return count

    def lookup(self, video_id: str) -> bool:
        self.popularity_bump(video_id)
        asset = self.resident.get(video_id)
        return asset is not None and asset.location is Location.EDGE

    def insert(self, asset: VideoAsset) -> None:
        if asset.size_mb > self.capacity_mb:
            msg = f"`{asset.video_id}` ({asset.size_mb} MB) exceeds the cache ({self.capacity_mb} MB)"
            raise AssetTooLarge(msg)

        self.resident.pop(asset.video_id, None)
        while self.used_mb + asset.size_mb > self.capacity_mb:
            victim = min(self.resident, key=lambda vid: (self.popularity.get(vid, 0), vid))
            del self.resident[victim]
            self.evicted.append(victim)
            pdebug(f"cache: evicted <ylw>{victim}</ylw>")

        count = self.popularity.get(asset.video_id, 0)
        self.resident[asset.video_id] = replace(asset, location=Location.EDGE, popularity_count=count)

    def preload(self, assets: Iterable[VideoAsset]) -> None:
        for asset in assets:
            if asset.location is Location.EDGE:
                self.insert(asset)

    def ranking(self) -> list[tuple[str, int]]:
        return sorted(self.popularity.items(), key=lambda item: (-item[1], item[0]))
