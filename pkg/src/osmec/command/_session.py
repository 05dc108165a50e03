from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import toml
from toml import TomlDecodeError

from osmec.simkit import EdgeSystem
from osmec.util import (
    ConfigError,
    Constant,
    IoError,
    Mode,
    Origin,
    OsmecError,
    ProtocolKind,
    canonical_json,
    parse_json,
    pdebug,
)

if TYPE_CHECKING:
    from pathlib import Path

    from osmec.simkit import SubmitResult
    from osmec.util import Proc, Settings


def request_entry(
    service_class: str,
    service_name: str,
    input: dict[str, Any],  # noqa: A002
    *,
    mode: Mode | None,
    protocol: ProtocolKind,
) -> dict[str, Any]:
    entry = {
        "verb": "request",
        "service_class": service_class,
        "service_name": service_name,
        "input": canonical_json(input),
        "protocol": str(protocol),
    }
    if mode is not None:
        entry["mode"] = str(mode)
    return entry


def release_entry(instance_id: int) -> dict[str, Any]:
    return {"verb": "release-memory", "instance_id": instance_id}


def apply_entry(system: EdgeSystem, entry: dict[str, Any]) -> Proc[SubmitResult | dict[str, Any]]:
    """The simpy process a journal entry stands for. Always tagged as a CLI command."""

    match entry.get("verb"):
        case "request":
            return system.submit(
                entry["service_class"],
                entry["service_name"],
                parse_json(entry.get("input", "{}"), source="session input"),  # type: ignore[arg-type]
                mode=Mode(entry["mode"]) if entry.get("mode") else None,
                protocol=ProtocolKind(entry.get("protocol", ProtocolKind.HTTP)),
                origin=Origin.CLI,
            )
        case "release-memory":
            return system.release(int(entry["instance_id"]), origin=Origin.CLI)
        case verb:
            msg = f"session journal: unknown command `{verb}`"
            raise ConfigError(msg)


@dataclass
class Session:
    """A live system kept between CLI invocations as a journal of the commands that built it.

    Opening a session replays the journal on a fresh system with the journal's seed, which
    reproduces the same state and event log every time.
    """

    directory: Path
    seed: int = 0
    commands: list[dict[str, Any]] = field(default_factory=list)

    @property
    def journal(self) -> Path:
        return self.directory / Constant.session_file

    @property
    def events_log(self) -> Path:
        return self.directory / Constant.events_log

    @classmethod
    def open(cls, directory: Path, *, seed: int | None = None) -> Session:
        journal = directory / Constant.session_file
        if not journal.is_file():
            return cls(directory, seed or 0)

        try:
            with journal.open("r", encoding="utf-8") as f:
                data = toml.load(f)
        except OSError as ose:
            msg = f"could not read `{journal}`: {ose.strerror or ose}"
            raise IoError(msg) from ose
        except TomlDecodeError as tde:
            msg = f"`{journal}`: {str(tde).lower()}"
            raise ConfigError(msg) from None

        ret = cls(directory, int(data.get("seed", 0)), list(data.get("commands", [])))
        if seed is not None and seed != ret.seed:
            msg = f"session in `{directory}` was started with seed {ret.seed}; remove it to use seed {seed}"
            raise ConfigError(msg)
        return ret

    def replay(self, settings: Settings) -> EdgeSystem:
        system = EdgeSystem(settings, seed=self.seed)
        for entry in self.commands:
            try:
                system.execute(apply_entry(system, entry))
            except OsmecError as e:
                # a command that failed live fails the same way here
                pdebug(f"session: replayed `{entry['verb']}` failed again: {e.message}")
        pdebug(f"session: replayed {len(self.commands)} command(s) up to t={system.env.now:g}")
        return system

    def record(self, entry: dict[str, Any]) -> None:
        self.commands.append(entry)

    def save(self, system: EdgeSystem) -> None:
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            with self.journal.open("w", encoding="utf-8") as f:
                toml.dump({"seed": self.seed, "commands": self.commands}, f)
        except OSError as ose:
            msg = f"could not write `{self.journal}`: {ose.strerror or ose}"
            raise IoError(msg) from ose
        system.log.write(self.events_log)
