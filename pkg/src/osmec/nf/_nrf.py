from __future__ import annotations

from typing import TYPE_CHECKING

from osmec.bus import Message
from osmec.nf._descriptor import NfDescriptor
from osmec.util import EventKind, ImageNotFound, InvalidDescriptor, MalformedFrame, Method, StorageClass

if TYPE_CHECKING:
    import simpy

    from osmec.simkit._events import EventLog
    from osmec.util import NrfSettings, Proc


class Nrf:
    """NF repository: general NF images in local storage, ASF/APP images in the remote repository."""

    name = "nrf"

    def __init__(self, env: simpy.Environment, settings: NrfSettings, log: EventLog) -> None:
        self.env = env
        self.settings = settings
        self.log = log
        self.images: dict[str, NfDescriptor] = {}

    def store_image(self, d: NfDescriptor) -> None:
        self.images[d.nf_id] = d
        self.log.emit(
            EventKind.IMAGE_STORED,
            self.name,
            nf_id=d.nf_id,
            nf_kind=d.nf_kind,
            storage_class=d.storage_class,
            image_ref=d.image_ref,
        )

    def descriptor(self, nf_id: str) -> NfDescriptor:
        if (d := self.images.get(nf_id)) is None:
            msg = f"no image stored for `{nf_id}`"
            raise ImageNotFound(msg)
        return d

    def resolve(self, nf_id: str) -> Proc[tuple[str, StorageClass]]:
        d = self.descriptor(nf_id)

        if d.storage_class is StorageClass.REMOTE:
            self.log.emit(EventKind.REMOTE_IMAGE_FETCH, self.name, nf_id=nf_id, fetch_delay=self.settings.fetch_delay)
            if self.settings.fetch_delay:
                yield self.env.timeout(self.settings.fetch_delay)

        return d.image_ref, d.storage_class

    # /sbi/nrf/images/{id}
    def handle(self, request: Message) -> Proc[Message]:
        match request.segments:
            case ("nrf", "images", nf_id) if request.method is Method.GET:
                image_ref, source = yield from self.resolve(nf_id)
                d = self.images[nf_id]
                return Message.response(
                    200,
                    json={"nf_id": nf_id, "nf_kind": d.nf_kind, "image_ref": image_ref, "source": source},
                )
            case ("nrf", "images", nf_id) if request.method is Method.POST:
                d = NfDescriptor.from_mapping(request.json(), where="descriptor.")
                if d.nf_id != nf_id:
                    msg = f"descriptor `{d.nf_id}` posted to `{nf_id}`"
                    raise InvalidDescriptor(msg)
                self.store_image(d)
                return Message.response(201, json={"nf_id": nf_id, "image_location": d.image_ref})
            case _:
                msg = f"nrf does not support {request.method} {request.path}"
                raise MalformedFrame(msg)
