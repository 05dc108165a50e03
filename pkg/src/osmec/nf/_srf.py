from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from typing import TYPE_CHECKING

from osmec.bus import Message
from osmec.nf._descriptor import NfDescriptor
from osmec.nf._udm import UdmClient
from osmec.util import Constant, EventKind, InvalidDescriptor, MalformedFrame, Method, NfKind

if TYPE_CHECKING:
    from collections.abc import Callable

    from osmec.bus import MessageBus
    from osmec.simkit._events import EventLog
    from osmec.util import Proc


@dataclass(frozen=True, slots=True)
class RegistrationRecord:
    app_id: str
    udm_table: str
    image_location: str
    access_endpoint: str
    registered_at: float


class Srf:
    """Service registry: records a new APP in UDM, stores its image in NRF and opens its access endpoint."""

    name = "srf"

    def __init__(self, bus: MessageBus, log: EventLog, nrf: str = "nrf") -> None:
        self.bus = bus
        self.log = log
        self.nrf = nrf
        self.udm = UdmClient(bus)
        self.records: dict[str, RegistrationRecord] = {}

    def register_app(self, d: NfDescriptor, service_class: str = "") -> Proc[RegistrationRecord]:
        if d.nf_kind is not NfKind.APP:
            msg = f"srf registers APPs only, `{d.nf_id}` is a {d.nf_kind}"
            raise InvalidDescriptor(msg)

        now = self.bus.env.now
        previous = self.records.get(d.nf_id)
        image_location = previous.image_location if previous else d.image_ref

        row = (d.nf_id, d.nf_kind, image_location, d.nf_id, service_class, repr(float(now)))
        created = yield from self.udm.upsert(Constant.apps_table, row)
        self.log.emit(EventKind.APP_RECORDED, self.name, app_id=d.nf_id, table=Constant.apps_table, updated=not created)

        # the first image location sticks for the life of the registration
        stored = replace(d, image_ref=image_location)
        yield from self.bus.call(self.nrf, Method.POST, f"/sbi/nrf/images/{d.nf_id}", json=stored.to_mapping())

        if not self.bus.is_registered(d.nf_id):
            self.bus.register_endpoint(d.nf_id, self._access_handler(d.nf_id, image_location))
        self.log.emit(EventKind.ENDPOINT_REGISTERED, self.name, endpoint=d.nf_id, reused=previous is not None)

        record = RegistrationRecord(
            app_id=d.nf_id,
            udm_table=Constant.apps_table,
            image_location=image_location,
            access_endpoint=d.nf_id,
            registered_at=previous.registered_at if previous else float(now),
        )
        self.records[d.nf_id] = record
        return record

    @staticmethod
    def _access_handler(app_id: str, image_location: str) -> Callable[[Message], Message]:
        # External access interface: other edge servers ask where the APP image lives.
        def handle(request: Message) -> Message:
            if request.method is Method.GET and request.segments == (app_id, "image"):
                return Message.response(200, json={"app_id": app_id, "image_location": image_location})
            msg = f"`{app_id}` does not support {request.method} {request.path}"
            raise MalformedFrame(msg)

        return handle

    # /sbi/srf/apps
    def handle(self, request: Message) -> Proc[Message]:
        if request.method is not Method.POST or request.segments != ("srf", "apps"):
            msg = f"srf does not support {request.method} {request.path}"
            raise MalformedFrame(msg)

        body = request.json()
        if not isinstance(body, dict):
            msg = "srf expects {descriptor, service_class}"
            raise MalformedFrame(msg)

        d = NfDescriptor.from_mapping(body.get("descriptor"), where="descriptor.")
        record = yield from self.register_app(d, str(body.get("service_class", "")))
        return Message.response(201, json=asdict(record))
