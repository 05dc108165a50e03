from __future__ import annotations

from decimal import Decimal
from importlib import resources
from typing import TYPE_CHECKING, Any, ClassVar

from osmec.nf import NfDescriptor
from osmec.util import (
    ActionKind,
    ConfigError,
    ConfigSection,
    Constant,
    InvalidDescriptor,
    InvalidTemplate,
    NfKind,
    ResourceVector,
    ServiceClass,
    UnknownServiceClass,
    config_section,
    parse_json,
    read_json,
    section_list,
    setting,
)
from osmec.util._validation import choice, custom, list_of, mapping_of, number, validate_str

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping
    from pathlib import Path

    from osmec.util import JSONValue


def _cell(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, str | int | float | Decimal):
        msg = f"got `{type(value).__name__}`"
        raise TypeError(msg)
    return str(value)


@config_section
class TemplateAttributes(ConfigSection):
    """Attributes tier: the template's UDM table and its predefined parameter rows."""

    __group__: ClassVar[str] = "attributes"

    table: str = setting(validate_str)
    schema: list[str] = setting(list_of(validate_str, min_items=1))
    rows: list[list[str]] = setting(list_of(list_of(custom(_cell, "a string or number"))), default_factory=list)

    def row(self, key: str) -> dict[str, str] | None:
        for row in self.rows:
            if row and row[0] == key:
                return dict(zip(self.schema, row, strict=True))
        return None


@config_section
class Template(ConfigSection):
    """Managed NFs / Attributes / Actions description of an application class. Holds no resources."""

    __group__: ClassVar[str] = "template"

    template_id: str = setting(validate_str)
    app_class: ServiceClass = setting(choice(ServiceClass))
    managed_nfs: list[str] = setting(list_of(validate_str, min_items=1))
    attributes: TemplateAttributes = setting(section=TemplateAttributes, required=True)
    actions: list[ActionKind] = setting(list_of(choice(ActionKind)), default_factory=list)
    resource_profile: ResourceVector = setting(section=ResourceVector, required=True)
    container_costs: dict[str, float] = setting(mapping_of(number(minimum=0)), default_factory=dict)
    descriptors: list[NfDescriptor] = setting(section_list(NfDescriptor), default_factory=list)

    def dedicated(self, catalog: Mapping[str, NfDescriptor]) -> list[str]:
        """Managed NFs/APPs that get a container per instance; general NFs are already running."""

        return [nf for nf in self.managed_nfs if nf in catalog and catalog[nf].is_dedicated]

    def app_nf(self, catalog: Mapping[str, NfDescriptor]) -> str | None:
        return next((nf for nf in self.dedicated(catalog) if catalog[nf].nf_kind is NfKind.APP), None)

    def service_row(self, service_name: str) -> dict[str, str] | None:
        return self.attributes.row(service_name)

    def services(self) -> list[str]:
        """Row keys a user can request: rows with computation work, or every row when the schema has none."""

        keys = [row[0] for row in self.attributes.rows]
        if "cpu_work" not in self.attributes.schema:
            return keys
        return [key for key in keys if (self.service_row(key) or {}).get("cpu_work")]

    def resources_for(self, service_name: str) -> ResourceVector:
        """The per-pod profile with cpu/memory taken from the service's parameter row when present."""

        row = self.service_row(service_name) or {}
        return self.resource_profile.with_overrides(
            cpu=Decimal(row["cpu"]) if row.get("cpu") else None,
            memory=Decimal(row["memory"]) if row.get("memory") else None,
        )


def check_template(t: Template, catalog: Mapping[str, NfDescriptor]) -> None:
    """Raise InvalidTemplate naming the first violated rule."""

    if missing := sorted(set(Constant.shared_nfs) - set(t.managed_nfs)):
        msg = f"`{t.template_id}`: managed_nfs must include the shared set (missing {', '.join(missing)})"
        raise InvalidTemplate(msg)

    own = {d.nf_id: d for d in t.descriptors}
    known = {**catalog, **own}
    if unknown := [nf for nf in t.managed_nfs if nf not in known]:
        msg = f"`{t.template_id}`: unknown NF(s) in managed_nfs: {', '.join(unknown)}"
        raise InvalidTemplate(msg)

    dedicated = t.dedicated(known)
    if not dedicated:
        msg = f"`{t.template_id}`: managed_nfs name no dedicated NF or APP to run in a pod"
        raise InvalidTemplate(msg)
    if uncosted := [nf for nf in dedicated if nf not in t.container_costs]:
        msg = f"`{t.template_id}`: container_costs missing for {', '.join(uncosted)}"
        raise InvalidTemplate(msg)
    if stray := sorted(set(t.container_costs) - set(dedicated)):
        msg = f"`{t.template_id}`: container_costs name non-dedicated NF(s) {', '.join(stray)}"
        raise InvalidTemplate(msg)

    width = len(t.attributes.schema)
    for i, row in enumerate(t.attributes.rows):
        if len(row) != width:
            msg = f"`{t.template_id}`: attributes.rows[{i}] has {len(row)} column(s), schema has {width}"
            raise InvalidTemplate(msg)

    if ActionKind.SERVE in t.actions and t.app_nf(known) is None:
        msg = f"`{t.template_id}`: the serve action needs a dedicated APP in managed_nfs"
        raise InvalidTemplate(msg)


def parse_template(data: JSONValue, *, where: str = "template.") -> Template:
    try:
        return Template.from_mapping(data, where=where)
    except InvalidDescriptor as e:
        raise InvalidTemplate(e.message) from None


def load_template(path: Path) -> Template:
    return parse_template(read_json(path), where=f"{path.name}: ")


def builtin_templates() -> list[Template]:
    ret = []
    for entry in sorted(resources.files("osmec.data").joinpath("templates").iterdir(), key=lambda p: p.name):
        if entry.name.endswith(".json"):
            data = parse_json(entry.read_text(encoding="utf-8"), source=entry.name)
            ret.append(parse_template(data, where=f"{entry.name}: "))
    return ret


class TemplateRegistry:
    """One template per application class; dedicated NF sets of different classes never overlap."""

    def __init__(self, catalog: Mapping[str, NfDescriptor]) -> None:
        self.catalog = dict(catalog)
        self._by_class: dict[ServiceClass, Template] = {}

    def __iter__(self) -> Iterator[Template]:
        return iter(sorted(self._by_class.values(), key=lambda t: t.template_id))

    def __len__(self) -> int:
        return len(self._by_class)

    def register(self, t: Template) -> Template:
        check_template(t, self.catalog)
        catalog = {**self.catalog, **{d.nf_id: d for d in t.descriptors}}
        mine = set(t.dedicated(catalog))

        for other in self._by_class.values():
            if other.app_class is t.app_class:
                continue
            if overlap := mine & set(other.dedicated(catalog)):
                msg = (
                    f"`{t.template_id}`: dedicated NFs must be disjoint from `{other.template_id}`"
                    f" (shared: {', '.join(sorted(overlap))})"
                )
                raise InvalidTemplate(msg)

        self.catalog = catalog
        self._by_class[t.app_class] = t
        return t

    def for_class(self, service_class: str) -> Template:
        if service_class not in ServiceClass or (t := self._by_class.get(ServiceClass(service_class))) is None:
            msg = f"no template for service class `{service_class}`"
            raise UnknownServiceClass(msg)
        return t

    def by_id(self, template_id: str) -> Template:
        for t in self._by_class.values():
            if t.template_id == template_id:
                return t
        msg = f"no template `{template_id}`"
        raise ConfigError(msg)
