from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from itertools import count
from typing import TYPE_CHECKING, Any

import simpy

from osmec.bus import ERROR_HEADER, Message, MessageBus, serialize_message
from osmec.mano import (
    ApiServer,
    Cluster,
    Controller,
    Kubelet,
    Orchestrator,
    Scheduler,
    StateStore,
    TemplateRegistry,
    Vim,
    builtin_templates,
)
from osmec.nf import BUILTIN_DESCRIPTORS, MANO_REQUESTS_PATH, Asf, Cpcf, Nrf, Srf, Udm, UdmClient, Upf, encode_legacy
from osmec.simkit._events import EventLog
from osmec.util import (
    Constant,
    Default,
    EventKind,
    Method,
    NfKind,
    Origin,
    OsmecError,
    ProtocolKind,
    ResourceVector,
    Settings,
    error_class,
    pdebug,
    pinfo,
)
from osmec.workloads import AppRuntime, VideoCache, load_catalog

if TYPE_CHECKING:
    from collections.abc import Collection, Iterable, Iterator, Sequence

    from osmec.mano import Instance, Template
    from osmec.util import Mode, Proc
    from osmec.workloads import VideoAsset

INGEST_PATH = "/sbi/cpcf/ingest"


def default_capacity() -> ResourceVector:
    return ResourceVector.from_mapping(dict(Default.node_capacity))


@dataclass
class IdCounters:
    """Request and instance numbering shared by every system that writes into one log."""

    requests: Iterator[int] = field(default_factory=lambda: count(1))
    instances: Iterator[int] = field(default_factory=lambda: count(1))


@dataclass(frozen=True, slots=True)
class SubmitResult:
    request_id: int
    status: int
    instance_id: int | None
    state: str | None
    result: Any = None
    error: str | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status < 400  # noqa: PLR2004

    def raise_for_error(self) -> SubmitResult:
        if not self.ok:
            cls = error_class(self.error) if self.error else OsmecError
            raise cls(self.message or f"request {self.request_id} failed with status {self.status}")
        return self


def request_frame(body: dict[str, Any], protocol: ProtocolKind) -> bytes:
    """The bytes a user terminal would send: an SBM/1 request or an XMEC1 legacy frame."""

    if protocol is ProtocolKind.LEGACY:
        return encode_legacy(body)
    return serialize_message(Message.request(Method.POST, MANO_REQUESTS_PATH, json=body))


class EdgeSystem:
    """One edge server: the NFs, the MANO master, the secondary nodes, all on one simpy environment.

    Construction boots the system (tables, images, APP registrations, nodes) before returning.
    """

    def __init__(
        self,
        settings: Settings | None = None,
        *,
        seed: int | str = 0,
        rng: random.Random | None = None,
        nodes: Sequence[ResourceVector] | None = None,
        templates: Iterable[Template] | None = None,
        catalog: Iterable[VideoAsset] | None = None,
        log: EventLog | None = None,
        ids: IdCounters | None = None,
        initial_time: float = 0.0,
    ) -> None:
        self.settings = settings or Settings()
        self.env = simpy.Environment(initial_time=initial_time)
        self.log = log if log is not None else EventLog()
        self.log.attach(self.env)
        self.rng = rng or random.Random(seed)  # noqa: S311
        self.ids = ids or IdCounters()
        self.bus = MessageBus(self.env, self.settings.bus)
        self._lock = threading.Lock()

        self.udm = Udm()
        self.nrf = Nrf(self.env, self.settings.nrf, self.log)
        self.srf = Srf(self.bus, self.log)
        self.cpcf = Cpcf(self.bus, self.log)
        self.asf = Asf()
        self.upf = Upf(self.settings.workloads)

        assets = tuple(catalog) if catalog is not None else load_catalog()
        self.cache = VideoCache(self.settings.workloads.cache_mb)
        self.cache.preload(assets)
        self.runtime = AppRuntime(
            self.env,
            self.bus,
            self.settings.workloads,
            self.cache,
            {a.video_id: a for a in assets},
            self.rng,
        )

        self.registry = TemplateRegistry({d.nf_id: d for d in BUILTIN_DESCRIPTORS})
        for t in builtin_templates() if templates is None else templates:
            self.registry.register(t)

        self.store = StateStore(self.env)
        self.apiserver = ApiServer(self.store, self.log)
        self.cluster = Cluster(self.log)
        self.vim = Vim(self.cluster, self.apiserver, self.log)
        self.scheduler = Scheduler(self.cluster, self.apiserver, self.log)
        self.kubelets: dict[int, Kubelet] = {}
        self.mano = Orchestrator(
            self.env,
            self.bus,
            self.log,
            self.settings,
            registry=self.registry,
            cluster=self.cluster,
            vim=self.vim,
            scheduler=self.scheduler,
            apiserver=self.apiserver,
            kubelets=self.kubelets,
            runtime=self.runtime,
            rng=self.rng,
            instance_ids=self.ids.instances,
        )

        capacities = list(nodes) if nodes else [default_capacity()]
        self.controller = Controller(
            self.env,
            self.cluster,
            self.vim,
            self.apiserver,
            self.settings.mano,
            self.log,
            capacities={i: cap for i, cap in enumerate(capacities, start=1)},
            fail_instance=self.mano.fail_instance,
        )
        self.apiserver.heartbeat_listener = self.controller.heartbeat

        self.execute(self._boot(capacities))

    # -- boot

    def _boot(self, capacities: Sequence[ResourceVector]) -> Proc[None]:
        for nf in (self.udm, self.nrf, self.srf, self.cpcf, self.asf, self.upf, self.apiserver, self.mano):
            self.bus.register_endpoint(nf.name, nf.handle)

        udm = UdmClient(self.bus)
        yield from udm.create_table(Constant.apps_table, Constant.apps_schema)
        yield from udm.create_table(Constant.charging_table, Constant.charging_schema)
        yield from udm.create_table(Constant.popularity_table, Constant.popularity_schema)
        for t in self.registry:
            yield from udm.create_table(t.attributes.table, t.attributes.schema)

        # general NFs and ASFs go straight to NRF; APPs arrive through SRF registration
        catalog = self.registry.catalog
        for nf_id in sorted(catalog):
            if catalog[nf_id].nf_kind is not NfKind.APP:
                self.nrf.store_image(catalog[nf_id])
        for t in self.registry:
            for nf_id in t.dedicated(catalog):
                if catalog[nf_id].nf_kind is NfKind.APP:
                    yield from self.srf.register_app(catalog[nf_id], str(t.app_class))

        for node_id, capacity in enumerate(capacities, start=1):
            self.cluster.register_node(node_id, capacity, float(self.env.now))
            kubelet = self.kubelets[node_id] = Kubelet(self.env, self.bus, node_id, self.settings.mano, self.log)
            self.env.process(kubelet.heartbeat_loop())
        self.env.process(self.controller.loop())
        pdebug(f"system: booted with {len(capacities)} node(s) and {len(self.registry)} template(s)")

    # -- driving

    def execute[T](self, proc: Proc[T]) -> T:
        """Run one command to completion. Callers on other threads are serialized."""

        with self._lock:
            p = self.env.process(proc)
            self.env.run(until=p)
            return p.value

    def run_all(self, procs: Iterable[simpy.Process]) -> None:
        with self._lock:
            self.env.run(until=simpy.AllOf(self.env, list(procs)))

    def submit(
        self,
        service_class: str,
        service_name: str,
        input: dict[str, Any] | None = None,  # noqa: A002
        *,
        mode: Mode | None = None,
        protocol: ProtocolKind = ProtocolKind.HTTP,
        origin: Origin = Origin.SCENARIO,
        fail_containers: Collection[str] = (),
    ) -> Proc[SubmitResult]:
        """Send a service request through CPCF as raw bytes in the chosen protocol."""

        rid = next(self.ids.requests)
        if fail_containers:
            self.mano.container_faults[rid] = set(fail_containers)

        body = {"service_class": service_class, "service_name": service_name, "input": input or {}, "mode": mode}
        payload = request_frame(body, protocol)
        self.log.emit(
            EventKind.COMMAND_ISSUED,
            f"req-{rid}",
            request_id=rid,
            command="request",
            origin=origin,
            protocol=protocol,
        )

        ingest = Message.request(
            Method.POST,
            INGEST_PATH,
            headers=[("x-request-id", str(rid)), ("x-origin", str(origin)), ("x-service-class", service_class)],
            body=payload,
        )
        response = yield from self.bus.send_request(self.cpcf.name, ingest)
        return self._result(rid, response)

    def _result(self, rid: int, response: Message) -> SubmitResult:
        inst = self.instance_for(rid)
        if response.ok:
            data = response.json()
            return SubmitResult(
                rid,
                response.status or 0,
                data["instance_id"],  # type: ignore[index, call-overload]
                data["state"],  # type: ignore[index, call-overload]
                data["result"],  # type: ignore[index, call-overload]
            )
        return SubmitResult(
            rid,
            response.status or 0,
            None if inst is None else inst.instance_id,
            None if inst is None else str(inst.state),
            error=response.header(ERROR_HEADER),
            message=response.text(),
        )

    def instance_for(self, request_id: int) -> Instance | None:
        return next((i for i in self.mano.instances.values() if i.request_id == request_id), None)

    def release(self, instance_id: int, *, origin: Origin = Origin.SCENARIO) -> Proc[dict[str, Any]]:
        """Manual memory release, issued over the EBI like any operator command."""

        self.log.emit(
            EventKind.COMMAND_ISSUED,
            f"inst-{instance_id}",
            instance_id=instance_id,
            command="release-memory",
            origin=origin,
        )
        response = yield from self.bus.call(
            self.mano.name,
            Method.POST,
            f"/ebi/mano/instances/{instance_id}/release-memory",
        )
        return response.json()  # type: ignore[return-value]

    def inspect(self, path: str) -> Proc[Any]:
        response = yield from self.bus.call(self.mano.name, Method.GET, f"/ebi/mano/{path}")
        return response.json()

    # -- synchronous conveniences

    def request(
        self,
        service_class: str,
        service_name: str,
        input: dict[str, Any] | None = None,  # noqa: A002
        **kwargs: Any,
    ) -> SubmitResult:
        result = self.execute(self.submit(service_class, service_name, input, **kwargs))
        if result.ok:
            pinfo(f"req-{result.request_id}: inst-{result.instance_id} <grn>{result.state}</grn>")
        return result

    def release_memory(self, instance_id: int, *, origin: Origin = Origin.SCENARIO) -> dict[str, Any]:
        return self.execute(self.release(instance_id, origin=origin))

    def silence_node(self, node_id: int) -> None:
        self.kubelets[node_id].silence()

    def advance(self, duration: float) -> None:
        """Let virtual time pass with no new commands (heartbeats and liveness checks keep running)."""

        self.execute(self._sleep(duration))

    def _sleep(self, duration: float) -> Proc[None]:
        yield self.env.timeout(duration)
