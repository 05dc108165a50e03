from __future__ import annotations

from typing import ClassVar

from osmec.util import ConfigSection, InvalidDescriptor, NfKind, ResourceVector, StorageClass, config_section, setting
from osmec.util._validation import choice, validate_str


@config_section
class NfDescriptor(ConfigSection):
    """Deployable unit known to NRF. General NFs live in local storage; ASF/APP images are remote."""

    __group__: ClassVar[str] = "descriptor"

    nf_id: str = setting(validate_str)
    nf_kind: NfKind = setting(choice(NfKind))
    storage_class: StorageClass = setting(choice(StorageClass))
    image_ref: str = setting(validate_str)
    resource_request: ResourceVector = setting(section=ResourceVector)

    def __post_init__(self) -> None:
        expected = StorageClass.LOCAL if self.nf_kind.general else StorageClass.REMOTE
        if self.storage_class is not expected:
            msg = f"`{self.nf_id}`: {self.nf_kind} images use {expected} storage, not {self.storage_class}"
            raise InvalidDescriptor(msg)
        if not self.nf_id or "/" in self.nf_id or " " in self.nf_id:
            msg = f"invalid nf_id {self.nf_id!r}"
            raise InvalidDescriptor(msg)

    @property
    def is_dedicated(self) -> bool:
        return not self.nf_kind.general


def descriptor(nf_id: str, kind: NfKind, image_ref: str, **resources: int) -> NfDescriptor:
    storage = StorageClass.LOCAL if kind.general else StorageClass.REMOTE
    return NfDescriptor(
        nf_id=nf_id,
        nf_kind=kind,
        storage_class=storage,
        image_ref=image_ref,
        resource_request=ResourceVector(**resources),
    )


# Always-running infrastructure plus the APP function each built-in template starts per instance.
BUILTIN_DESCRIPTORS: tuple[NfDescriptor, ...] = (
    descriptor("udm", NfKind.UDM, "osmec/udm:0.1", cpu=250, memory=256),
    descriptor("nrf", NfKind.NRF, "osmec/nrf:0.1", cpu=100, memory=128),
    descriptor("srf", NfKind.SRF, "osmec/srf:0.1", cpu=100, memory=128),
    descriptor("cpcf", NfKind.CPCF, "osmec/cpcf:0.1", cpu=250, memory=128),
    descriptor("upf", NfKind.UPF, "osmec/upf:0.1", cpu=500, memory=256, bandwidth=500),
    descriptor("asf", NfKind.ASF, "registry.edge/asf:0.1", cpu=100, memory=64),
    descriptor("app-compute", NfKind.APP, "registry.edge/app-compute:0.1", cpu=500, memory=128),
    descriptor("app-video", NfKind.APP, "registry.edge/app-video:0.1", cpu=1000, memory=512, storage=4096),
)
