from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from osmec.bus import Message
from osmec.util import MalformedFrame, Method, NoRoute, RouteKind

if TYPE_CHECKING:
    from osmec.util import WorkloadSettings

CLOUD_PATH = ("edge", "switch", "cloud")


@dataclass(frozen=True, slots=True)
class RouteDecision:
    route: RouteKind
    path: tuple[str, ...]
    bandwidth_mbps: float
    base_latency: float

    def as_json(self) -> dict[str, Any]:
        return {
            "route": self.route,
            "path": list(self.path),
            "bandwidth_mbps": self.bandwidth_mbps,
            "base_latency": self.base_latency,
        }


class Upf:
    """User-plane forwarding: serve at the edge on a cache hit, otherwise forward over the campus path to the cloud."""

    name = "upf"
    destinations = ("video", "compute")

    def __init__(self, settings: WorkloadSettings) -> None:
        self.settings = settings

    def route(self, flow: dict[str, Any]) -> RouteDecision:
        dest = flow.get("dest")
        if dest not in self.destinations:
            msg = f"no route to destination class {dest!r}"
            raise NoRoute(msg)

        if dest == "compute" or flow.get("cached", False):
            return RouteDecision(RouteKind.EDGE_HIT, ("edge",), self.settings.edge_mbps, 0.0)
        return RouteDecision(
            RouteKind.CLOUD_FORWARD,
            CLOUD_PATH,
            self.settings.cloud_mbps,
            self.settings.cloud_base_latency,
        )

    # /sbi/upf/route
    def handle(self, request: Message) -> Message:
        if request.method is not Method.POST or request.segments != ("upf", "route"):
            msg = f"upf does not support {request.method} {request.path}"
            raise MalformedFrame(msg)

        flow = request.json()
        if not isinstance(flow, dict):
            msg = "upf expects a flow object"
            raise MalformedFrame(msg)
        return Message.response(200, json=self.route(flow).as_json())
