from __future__ import annotations

from dataclasses import asdict, dataclass

from osmec.bus import Message
from osmec.util import MalformedFrame, Method, NoActiveApp, UnknownInstance, pdebug


@dataclass(frozen=True, slots=True)
class ActiveApp:
    instance_id: int
    service_class: str
    service_name: str
    endpoint: str


class Asf:
    """Application selection: which running APP instance serves a (service class, service name) pair."""

    name = "asf"

    def __init__(self) -> None:
        self.active: dict[int, ActiveApp] = {}

    def activate(self, app: ActiveApp) -> None:
        self.active[app.instance_id] = app
        pdebug(f"asf: inst-{app.instance_id} serves <cyn>{app.service_name}</cyn> at {app.endpoint}")

    def deactivate(self, instance_id: int) -> None:
        if self.active.pop(instance_id, None) is None:
            msg = f"inst-{instance_id} is not active"
            raise UnknownInstance(msg)

    def select(self, service_class: str, service_name: str) -> ActiveApp:
        """Lowest instance id among the matching active APPs."""

        candidates = [
            app
            for app in self.active.values()
            if app.service_class == service_class and app.service_name == service_name
        ]
        if not candidates:
            msg = f"no active APP for {service_class}/{service_name}"
            raise NoActiveApp(msg)
        return min(candidates, key=lambda app: app.instance_id)

    # /sbi/asf/apps[/{instance_id}], /sbi/asf/select
    def handle(self, request: Message) -> Message:
        body = request.json() or {}
        if not isinstance(body, dict):
            msg = "asf expects a JSON object body"
            raise MalformedFrame(msg)

        match request.method, request.segments:
            case Method.POST, ("asf", "apps"):
                self.activate(
                    ActiveApp(
                        instance_id=int(body["instance_id"]),
                        service_class=str(body["service_class"]),
                        service_name=str(body["service_name"]),
                        endpoint=str(body["endpoint"]),
                    ),
                )
                return Message.response(201)
            case Method.DELETE, ("asf", "apps", instance_id) if instance_id.isdigit():
                self.deactivate(int(instance_id))
                return Message.response(204)
            case Method.POST, ("asf", "select"):
                app = self.select(str(body.get("service_class", "")), str(body.get("service_name", "")))
                return Message.response(200, json=asdict(app))
            case _:
                msg = f"asf does not support {request.method} {request.path}"
                raise MalformedFrame(msg)
