from __future__ import annotations

from decimal import Decimal, InvalidOperation
from typing import TYPE_CHECKING, Any

from osmec.bus import Message
from osmec.util import Default, InvalidInput, KeyNotFound, MalformedFrame, Method, RouteKind
from osmec.workloads._compute import SERVICE_WORK, compute_prime_sum, compute_sum, face_job, face_recognition
from osmec.workloads._video import serve_video

if TYPE_CHECKING:
    import random

    import simpy

    from osmec.bus import Handler, MessageBus
    from osmec.util import Proc, WorkloadSettings
    from osmec.workloads._cache import VideoAsset, VideoCache


def _number(args: dict[str, Any], key: str, *, integral: bool = False) -> Decimal:
    """A non-negative input value; decimals travel as strings on the bus, so numeric strings count."""

    value = args.get(key, 0)
    msg = f"input `{key}` must be a number, got {value!r}"
    if isinstance(value, bool) or not isinstance(value, int | float | str | Decimal):
        raise InvalidInput(msg)
    try:
        ret = Decimal(str(value).strip())
    except InvalidOperation:
        raise InvalidInput(msg) from None

    if not ret.is_finite() or ret < 0:
        msg = f"input `{key}` must be a non-negative number, got {value!r}"
        raise InvalidInput(msg)
    if integral and ret != ret.to_integral_value():
        msg = f"input `{key}` must be a whole number, got {value!r}"
        raise InvalidInput(msg)
    return ret


class AppRuntime:
    """What runs inside an APP container: the compute services and the video service.

    One runtime is shared by every APP instance endpoint of an edge system; the video
    cache it owns is the single edge cache of that system.
    """

    def __init__(
        self,
        env: simpy.Environment,
        bus: MessageBus,
        settings: WorkloadSettings,
        cache: VideoCache,
        catalog: dict[str, VideoAsset],
        rng: random.Random,
        *,
        upf: str = "upf",
    ) -> None:
        self.env = env
        self.bus = bus
        self.settings = settings
        self.cache = cache
        self.catalog = catalog
        self.rng = rng
        self.upf = upf

    def jittered(self, work: float) -> float:
        if not self.settings.jitter:
            return work
        return work * (1 + self.rng.uniform(-self.settings.jitter, self.settings.jitter))

    def handler(self, endpoint: str) -> Handler:
        def handle(request: Message) -> Proc[Message]:
            match request.method, request.segments:
                case Method.POST, (name, "invoke") if name == endpoint:
                    body = request.json()
                    if not isinstance(body, dict):
                        msg = "invoke expects {service_name, input}"
                        raise MalformedFrame(msg)
                    return (yield from self.invoke(body))
                case Method.GET, (name, "popularity") if name == endpoint:
                    ranking = [[vid, count] for vid, count in self.cache.ranking()]
                    return Message.response(200, json={"ranking": ranking})
                case _:
                    msg = f"`{endpoint}` does not support {request.method} {request.path}"
                    raise MalformedFrame(msg)

        return handle

    def invoke(self, body: dict[str, Any]) -> Proc[Message]:
        service = str(body.get("service_name", ""))
        args = body.get("input") or {}
        if not isinstance(args, dict):
            msg = f"service input must be a JSON object, got `{type(args).__name__}`"
            raise InvalidInput(msg)
        declared = body.get("cpu_work")
        base_work = float(declared) if declared else SERVICE_WORK.get(service, Default.video_work)

        transmission = 0.0
        size: Any = 0
        served_from = "edge"
        match service:
            case "sum":
                result: Any = compute_sum(int(_number(args, "n", integral=True)))
                work = self.jittered(base_work)
                compute = work / self.settings.cpu_rate
            case "prime_sum":
                result = compute_prime_sum(int(_number(args, "n", integral=True)))
                work = self.jittered(base_work)
                compute = work / self.settings.cpu_rate
            case "face_recognition":
                work = self.jittered(base_work)
                job = face_job(str(args.get("blob_id", "")), float(_number(args, "size_mb")), work)
                face = face_recognition(job, self.settings)
                size = job.size_mb
                result, transmission, compute = face.label, face.transfer_time, face.compute_time
            case "video":
                served = yield from self._serve_video(args, base_work)
                work = served.compute_time * self.settings.cpu_rate
                result, transmission, compute = served.video_id, served.transmission_time, served.compute_time
                served_from = served.served_from
                size = served.size_mb
            case _:
                msg = f"no service named `{service}`"
                raise KeyNotFound(msg)

        yield self.env.timeout(transmission + compute)
        return Message.response(
            200,
            json={
                "service_name": service,
                "result": result,
                "cpu_work": work,
                "compute_time": compute,
                "transmission_time": transmission,
                "served_from": served_from,
                "size_mb": size,
            },
        )

    def _serve_video(self, args: dict[str, Any], base_work: float) -> Proc[Any]:
        video_id = str(args.get("video_id", ""))
        if (asset := self.catalog.get(video_id)) is not None:
            size = asset.size_mb
        else:
            size = _number(args, "size_mb")

        cached = self.cache.lookup(video_id)
        route = yield from self.bus.call(
            self.upf,
            Method.POST,
            "/sbi/upf/route",
            json={"dest": "video", "video_id": video_id, "cached": cached},
        )
        hit = route.json()["route"] == RouteKind.EDGE_HIT  # type: ignore[index, call-overload]
        return serve_video(video_id, size, self.settings, cached=hit, cpu_work=self.jittered(base_work))
