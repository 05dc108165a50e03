from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Any, ClassVar

from osmec.mano import builtin_templates, load_template, parse_template
from osmec.simkit._system import default_capacity
from osmec.util import (
    ConfigError,
    ConfigSection,
    Mode,
    ProtocolKind,
    ResourceVector,
    ServiceClass,
    UnknownServiceClass,
    config_section,
    parse_json,
    read_json,
    section_list,
    setting,
)
from osmec.util._validation import (
    choice,
    custom,
    either,
    integer,
    list_of,
    mapping_of,
    number,
    optional,
    passthrough,
    validate_str,
)
from osmec.workloads import load_catalog, parse_catalog

if TYPE_CHECKING:
    from osmec.mano import Template
    from osmec.util import JSONValue, Settings
    from osmec.workloads import VideoAsset

_SELECTOR = re.compile(r"\*|request:\d+|instance:\d+|service:[A-Za-z0-9_]+")


def _selector(value: Any) -> str:
    if not isinstance(value, str) or not _SELECTOR.fullmatch(value):
        msg = "one of `*`, `request:<index>`, `instance:<id>`, `service:<name>`"
        raise ValueError(msg)
    return value


def _object(value: Any) -> dict[str, Any]:
    if not isinstance(value, dict):
        msg = f"got `{type(value).__name__}`"
        raise TypeError(msg)
    return value


@config_section
class NodeSpec(ConfigSection):
    __group__: ClassVar[str] = "node"

    capacity: ResourceVector = setting(section=ResourceVector, default_factory=default_capacity)


@config_section
class RequestSpec(ConfigSection):
    __group__: ClassVar[str] = "request"

    t: float = setting(number(minimum=0), 0.0)
    service_class: str = setting(validate_str)
    service_name: str = setting(validate_str)
    input: dict[str, Any] = setting(mapping_of(passthrough), default_factory=dict)
    mode: Mode | None = setting(optional(choice(Mode)), None)
    protocol: ProtocolKind = setting(choice(ProtocolKind), ProtocolKind.HTTP)


@config_section
class Bandwidths(ConfigSection):
    __group__: ClassVar[str] = "bandwidths"

    edge_mbps: float | None = setting(optional(number(positive=True)), None)
    cloud_mbps: float | None = setting(optional(number(positive=True)), None)
    cloud_base_latency_s: float | None = setting(optional(number(minimum=0)), None)

    def apply(self, settings: Settings) -> Settings:
        overrides = {
            "edge_mbps": self.edge_mbps,
            "cloud_mbps": self.cloud_mbps,
            "cloud_base_latency": self.cloud_base_latency_s,
        }
        return settings.with_overrides(workloads={k: v for k, v in overrides.items() if v is not None})


@config_section
class ReleaseSpec(ConfigSection):
    """Scripted memory release: at absolute time `t`, or `delay` after the selected instance completed."""

    __group__: ClassVar[str] = "release"

    instance_selector: str = setting(custom(_selector, "an instance selector"))
    t: float | None = setting(optional(number(minimum=0)), None)
    delay: float | None = setting(optional(number(minimum=0)), None)

    def __post_init__(self) -> None:
        if (self.t is None) == (self.delay is None):
            msg = f"release `{self.instance_selector}`: give exactly one of `t` or `delay`"
            raise ConfigError(msg)

    @property
    def kind(self) -> str:
        return self.instance_selector.split(":", 1)[0]

    @property
    def argument(self) -> str:
        return self.instance_selector.split(":", 1)[-1]


@config_section
class FaultSpec(ConfigSection):
    """Silence a node's heartbeats from `t`, for `duration` if given, otherwise for good."""

    __group__: ClassVar[str] = "fault"

    node: int = setting(integer(minimum=1))
    t: float = setting(number(minimum=0))
    duration: float | None = setting(optional(number(positive=True)), None)


@config_section
class ContainerFault(ConfigSection):
    __group__: ClassVar[str] = "fail_containers"

    request: int = setting(integer(minimum=0))
    nf_id: str = setting(validate_str)


@config_section
class ScenarioConfig(ConfigSection):
    __group__: ClassVar[str] = "scenario"

    name: str = setting(validate_str, "scenario")
    seed: int = setting(integer(minimum=0), 0)
    nodes: list[NodeSpec] = setting(section_list(NodeSpec), default_factory=lambda: [NodeSpec()])
    templates: list[str | dict[str, Any]] = setting(
        list_of(either(validate_str, custom(_object, "an object"))),
        default_factory=list,
    )
    requests: list[RequestSpec] = setting(section_list(RequestSpec), default_factory=list)
    bandwidths: Bandwidths = setting(section=Bandwidths)
    manual_releases: list[ReleaseSpec] = setting(section_list(ReleaseSpec), default_factory=list)
    repetitions: int = setting(integer(minimum=1), 1)
    modes: list[Mode] = setting(list_of(choice(Mode)), default_factory=list)
    catalog: str | list[Any] | None = setting(passthrough, None)
    faults: list[FaultSpec] = setting(section_list(FaultSpec), default_factory=list)
    fail_containers: list[ContainerFault] = setting(section_list(ContainerFault), default_factory=list)

    def __post_init__(self) -> None:
        for i, req in enumerate(self.requests):
            if req.service_class not in ServiceClass:
                msg = f"{self.name}: requests[{i}]: no template for service class `{req.service_class}`"
                raise UnknownServiceClass(msg)
        for fault in self.faults:
            if fault.node > len(self.nodes):
                msg = f"{self.name}: faults: node {fault.node} does not exist ({len(self.nodes)} node(s))"
                raise ConfigError(msg)
        for cf in self.fail_containers:
            if cf.request >= len(self.requests):
                msg = f"{self.name}: fail_containers: no request at index {cf.request}"
                raise ConfigError(msg)
        for rel in self.manual_releases:
            if rel.kind == "request" and int(rel.argument) >= len(self.requests):
                msg = f"{self.name}: manual_releases: no request at index {rel.argument}"
                raise ConfigError(msg)

    def container_faults(self, index: int) -> set[str]:
        return {cf.nf_id for cf in self.fail_containers if cf.request == index}


@dataclass(frozen=True)
class Scenario:
    """A validated scenario with its template files and catalog already read."""

    config: ScenarioConfig
    templates: tuple[Template, ...]
    catalog: tuple[VideoAsset, ...]

    @property
    def name(self) -> str:
        return self.config.name

    @property
    def capacities(self) -> list[ResourceVector]:
        return [n.capacity for n in self.config.nodes]


def _resolve(config: ScenarioConfig, base: Path | None) -> Scenario:
    templates = []
    for i, ref in enumerate(config.templates):
        if isinstance(ref, str):
            if base is None:
                msg = f"{config.name}: templates[{i}]: file references need a scenario file"
                raise ConfigError(msg)
            templates.append(load_template(base / ref))
        else:
            templates.append(parse_template(ref, where=f"{config.name}: templates[{i}]."))
    if not templates:
        templates = builtin_templates()

    match config.catalog:
        case None:
            catalog = load_catalog()
        case str() as ref if base is not None:
            catalog = load_catalog(base / ref)
        case list() as items:
            catalog = parse_catalog(items, where=f"{config.name}: catalog")
        case _:
            msg = f"{config.name}: catalog: expected a list of assets or a file reference"
            raise ConfigError(msg)

    return Scenario(config, tuple(templates), catalog)


def parse_scenario(data: JSONValue, *, source: str = "scenario", base: Path | None = None) -> Scenario:
    return _resolve(ScenarioConfig.from_mapping(data, where=f"{source}: "), base)


def load_scenario(path: Path) -> Scenario:
    return parse_scenario(read_json(path), source=path.name, base=path.parent)


def bundled_scenarios() -> list[str]:
    files = resources.files("osmec.data").joinpath("scenarios").iterdir()
    return sorted(f.name.removesuffix(".json") for f in files if f.name.endswith(".json"))


def bundled_scenario(name: str) -> Scenario:
    if name not in (names := bundled_scenarios()):
        msg = f"no bundled scenario `{name}` (choose from {', '.join(names)})"
        raise ConfigError(msg)
    entry = resources.files("osmec.data").joinpath("scenarios", f"{name}.json")
    return parse_scenario(parse_json(entry.read_text(encoding="utf-8"), source=entry.name), source=entry.name)


def find_scenario(ref: str) -> Scenario:
    """A scenario file path, or the name of a bundled scenario."""

    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        return load_scenario(path)
    return bundled_scenario(ref)
