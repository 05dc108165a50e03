from __future__ import annotations

from decimal import Decimal
from typing import TYPE_CHECKING, Any

from osmec.bus import Message
from osmec.mano._instance import Instance
from osmec.mano._kubelet import ContainerSpec
from osmec.mano._vim import ALL_COMPONENTS
from osmec.nf import UdmClient
from osmec.util import (
    ActionKind,
    Component,
    ConfigError,
    Constant,
    EventKind,
    InstanceState,
    KeyNotFound,
    MalformedFrame,
    Method,
    Mode,
    OsmecError,
    PodState,
    UnknownId,
    UnknownInstance,
    WrongState,
    pdebug,
    pinfo,
)
from osmec.workloads import ChargingRates, Usage, charge

if TYPE_CHECKING:
    import random
    from collections.abc import Iterator

    import simpy

    from osmec.bus import MessageBus
    from osmec.mano._cluster import Cluster
    from osmec.mano._kubelet import Kubelet
    from osmec.mano._scheduler import Scheduler
    from osmec.mano._state_store import ApiServer
    from osmec.mano._template import Template, TemplateRegistry
    from osmec.mano._vim import Vim
    from osmec.simkit._events import EventLog
    from osmec.util import Proc, Settings
    from osmec.workloads import AppRuntime

_S = InstanceState


class Orchestrator:
    """The MANO front: template selection, three-step instantiation, the Actions tier and releases."""

    name = "mano"

    def __init__(
        self,
        env: simpy.Environment,
        bus: MessageBus,
        log: EventLog,
        settings: Settings,
        *,
        registry: TemplateRegistry,
        cluster: Cluster,
        vim: Vim,
        scheduler: Scheduler,
        apiserver: ApiServer,
        kubelets: dict[int, Kubelet],
        runtime: AppRuntime,
        rng: random.Random,
        instance_ids: Iterator[int],
    ) -> None:
        self.env = env
        self.bus = bus
        self.log = log
        self.settings = settings
        self.registry = registry
        self.cluster = cluster
        self.vim = vim
        self.scheduler = scheduler
        self.apiserver = apiserver
        self.kubelets = kubelets
        self.runtime = runtime
        self.rng = rng
        self.instance_ids = instance_ids
        self.udm = UdmClient(bus)
        self.instances: dict[int, Instance] = {}
        # request id -> nf ids whose container start is made to fail
        self.container_faults: dict[int, set[str]] = {}
        self._asf_active: set[int] = set()

    def instance(self, instance_id: int) -> Instance:
        if (inst := self.instances.get(instance_id)) is None:
            msg = f"no instance inst-{instance_id}"
            raise UnknownInstance(msg)
        return inst

    def _record(self, inst: Instance) -> None:
        self.apiserver.put_json(f"/instances/{inst.instance_id}", inst.as_json(), writer=self.name)

    def _transition(self, inst: Instance, to: InstanceState) -> None:
        inst.transition(to, float(self.env.now))
        self._record(inst)

    def _check_alive(self, inst: Instance) -> None:
        if inst.is_terminal:
            msg = f"{inst.subject} became {inst.state} while in progress"
            raise WrongState(msg)

    def _jittered(self, cost: float) -> float:
        if not (jitter := self.settings.workloads.jitter):
            return cost
        return cost * (1 + self.rng.uniform(-jitter, jitter))

    # -- selection

    def select_template(
        self,
        service_class: str,
        service_name: str,
        *,
        request_id: int,
        mode: Mode,
        input: dict[str, Any] | None = None,  # noqa: A002
    ) -> Proc[tuple[Template, Instance]]:
        t = self.registry.for_class(service_class)
        inst = Instance(
            instance_id=next(self.instance_ids),
            template_id=t.template_id,
            request_id=request_id,
            service_class=str(t.app_class),
            service_name=service_name,
            mode=mode,
            created_at=float(self.env.now),
            input=dict(input or {}),
        )
        self.instances[inst.instance_id] = inst
        self.log.emit(
            EventKind.TEMPLATE_SELECTED,
            inst.subject,
            template_id=t.template_id,
            service_class=inst.service_class,
            service_name=service_name,
            **inst.ids,
        )
        self._record(inst)

        attrs = t.attributes
        try:
            # predefined parameters, scoped to this instance
            for row in attrs.rows:
                yield from self.udm.insert(attrs.table, [f"{inst.instance_id}/{row[0]}", *row[1:]])
            self.log.emit(EventKind.PARAMS_INSERTED, inst.subject, table=attrs.table, rows=len(attrs.rows), **inst.ids)

            for nf_id in t.managed_nfs:
                response = yield from self.bus.call("nrf", Method.GET, f"/sbi/nrf/images/{nf_id}")
                image = response.json()
                self.log.emit(
                    EventKind.NF_RESOLVED,
                    inst.subject,
                    nf_id=nf_id,
                    image_ref=image["image_ref"],  # type: ignore[index, call-overload]
                    source=image["source"],  # type: ignore[index, call-overload]
                    **inst.ids,
                )

            key = f"{inst.instance_id}/{service_name}"
            if (row := (yield from self.udm.query(attrs.table, key))) is None:
                msg = f"`{t.template_id}` has no parameters for service `{service_name}`"
                raise KeyNotFound(msg)
            updated = dict(zip(attrs.schema, row, strict=True))
            if "status" in updated:
                updated["status"] = "selected"
            yield from self.udm.update(attrs.table, key, updated.values())
            self.log.emit(EventKind.PARAMS_UPDATED, inst.subject, table=attrs.table, key=key, **inst.ids)
        except OsmecError as e:
            self.fail(inst, e)
            raise

        return t, inst

    # -- instantiation

    def instantiate(self, inst: Instance, t: Template) -> Proc[Instance]:
        """Environment configuration, resource allocation, activation. Rolls back to Failed on any error."""

        catalog = self.registry.catalog
        amount = t.resources_for(inst.service_name)
        try:
            if self.settings.mano.overhead:
                yield self.env.timeout(self.settings.mano.overhead)
            self._check_alive(inst)

            pod = self.scheduler.locate_idle_pod(amount, ids=inst.ids)
            inst.pod_id, inst.node_id = pod.pod_id, pod.node_id
            self._transition(inst, _S.CONFIGURED)

            grant = self.vim.allocate(
                pod.node_id,
                amount,
                instance_id=inst.instance_id,
                request_id=inst.request_id,
                pod_id=pod.pod_id,
            )
            inst.grants.append(grant.grant_id)
            self._transition(inst, _S.RESOURCES_ALLOCATED)

            specs = [
                ContainerSpec(nf_id, catalog[nf_id].nf_kind, self._jittered(t.container_costs[nf_id]))
                for nf_id in t.dedicated(catalog)
            ]
            yield from self.kubelets[pod.node_id].run_pod(
                pod,
                specs,
                inst.mode,
                ids=inst.ids,
                fail_on=self.container_faults.get(inst.request_id, ()),
            )
            self._check_alive(inst)
            inst.containers = list(pod.containers)
            self._transition(inst, _S.ACTIVE)
            self.log.emit(
                EventKind.INSTANCE_ACTIVE,
                inst.subject,
                template_id=t.template_id,
                mode=inst.mode,
                pod_id=pod.pod_id,
                node=pod.node_id,
                containers=len(inst.containers),
                **inst.ids,
            )

            if (app := t.app_nf(catalog)) is not None:
                endpoint = f"{app}@{inst.subject}"
                self.bus.register_endpoint(endpoint, self.runtime.handler(endpoint))
                inst.app_endpoint = endpoint
                yield from self.bus.call(
                    "asf",
                    Method.POST,
                    "/sbi/asf/apps",
                    json={
                        "instance_id": inst.instance_id,
                        "service_class": inst.service_class,
                        "service_name": inst.service_name,
                        "endpoint": endpoint,
                    },
                )
                self._asf_active.add(inst.instance_id)
        except OsmecError as e:
            self.fail(inst, e)
            raise

        pinfo(f"{inst.subject} <grn>active</grn> on node-{inst.node_id} ({inst.mode})")
        return inst

    def fail(self, inst: Instance, err: OsmecError | str) -> None:
        """Full rollback: every grant returned, pod back to Idle unless it failed itself."""

        if inst.is_terminal:
            return

        for grant_id in inst.grants:
            self.vim.release(grant_id, ALL_COMPONENTS)
        self._drop_endpoint(inst)
        if inst.pod_id is not None and (pod := self.cluster.pods.get(inst.pod_id)) is not None:
            if pod.state in (PodState.ASSIGNED, PodState.RUNNING):
                self._idle_pod(pod.pod_id)
            elif pod.instance_id == inst.instance_id:
                pod.instance_id = None

        reason = err if isinstance(err, str) else type(err).__name__
        message = err if isinstance(err, str) else err.message
        self._transition(inst, _S.FAILED)
        self.log.emit(EventKind.INSTANCE_FAILED, inst.subject, reason=reason, message=message, **inst.ids)

    def fail_instance(self, instance_id: int, reason: str) -> None:
        """Controller hook for instances on a failed node."""

        if (inst := self.instances.get(instance_id)) is not None:
            self.fail(inst, reason)

    def _idle_pod(self, pod_id: int) -> None:
        pod = self.cluster.pods[pod_id]
        pod.state = PodState.IDLE
        pod.containers.clear()
        pod.instance_id = None
        self.apiserver.put_json(pod.key, pod.as_json(), writer=self.name)

    def _drop_endpoint(self, inst: Instance) -> None:
        if inst.app_endpoint is not None and self.bus.is_registered(inst.app_endpoint):
            self.bus.unregister_endpoint(inst.app_endpoint)
        if inst.instance_id in self._asf_active:
            self._asf_active.discard(inst.instance_id)
            self.env.process(self._asf_deactivate(inst.instance_id))

    def _asf_deactivate(self, instance_id: int) -> Proc[None]:
        yield from self.bus.call("asf", Method.DELETE, f"/sbi/asf/apps/{instance_id}")

    # -- actions

    def run_actions(self, inst: Instance, t: Template) -> Proc[dict[str, Any] | None]:
        for action in t.actions:
            self._check_alive(inst)
            match action:
                case ActionKind.SERVE:
                    yield from self._serve(inst)
                case ActionKind.CHARGE:
                    yield from self._charge(inst, t)
                case ActionKind.ANALYZE_POPULARITY:
                    yield from self._analyze_popularity(inst)

        if inst.state is _S.ACTIVE:
            yield from self._complete(inst)
        return inst.result

    def _serve(self, inst: Instance) -> Proc[None]:
        selected = yield from self.bus.call(
            "asf",
            Method.POST,
            "/sbi/asf/select",
            json={"service_class": inst.service_class, "service_name": inst.service_name},
        )
        endpoint = str(selected.json()["endpoint"])  # type: ignore[index, call-overload]

        t = self.registry.by_id(inst.template_id)
        row = t.service_row(inst.service_name) or {}
        response = yield from self.bus.call(
            endpoint,
            Method.POST,
            f"/nbi/{endpoint}/invoke",
            json={
                "service_name": inst.service_name,
                "input": inst.input,
                "cpu_work": row.get("cpu_work"),
                "instance_id": inst.instance_id,
            },
        )
        out: dict[str, Any] = response.json()  # type: ignore[assignment]
        self._check_alive(inst)

        inst.result = out
        inst.served_by = endpoint
        self.log.emit(
            EventKind.SERVICE_COMPLETED,
            inst.subject,
            service_name=inst.service_name,
            served_by=endpoint,
            result=out["result"],
            cpu_work=out["cpu_work"],
            compute_time=out["compute_time"],
            transmission_time=out["transmission_time"],
            served_from=out["served_from"],
            size_mb=out.get("size_mb", 0),
            **inst.ids,
        )
        yield from self._complete(inst)

    def _complete(self, inst: Instance) -> Proc[None]:
        """CPU goes back the moment the service ends; memory stays until an explicit release."""

        for grant_id in inst.grants:
            self.vim.release(grant_id, {Component.CPU})
        self._transition(inst, _S.COMPLETED)

        if inst.instance_id in self._asf_active:
            self._asf_active.discard(inst.instance_id)
            yield from self._asf_deactivate(inst.instance_id)
        self._transition(inst, _S.MEMORY_HELD)

    def _charge(self, inst: Instance, t: Template) -> Proc[None]:
        table = t.attributes.table
        row = yield from self.udm.query(table, f"{inst.instance_id}/charging")
        params = dict(zip(t.attributes.schema, row, strict=True)) if row is not None else {}
        rates = ChargingRates(
            rate_cpu=Decimal(params.get("rate_cpu") or 0),
            rate_mem=Decimal(params.get("rate_mem") or 0),
        )

        grant = self.vim.grants[inst.grants[0]]
        held_for = Decimal(repr(float(self.env.now) - grant.granted_at))
        cpu_work = Decimal(repr(float((inst.result or {}).get("cpu_work", 0))))
        usage = Usage(cpu_work=cpu_work, mem_mb_time=grant.amount.memory * held_for)

        record = charge(inst.instance_id, inst.state, usage, rates)
        yield from self.udm.upsert(Constant.charging_table, record.row())
        self.log.emit(
            EventKind.CHARGED,
            inst.subject,
            cpu_work=record.cpu_work_consumed,
            mem_mb_time=record.memory_mb_time,
            cost=record.cost,
            **inst.ids,
        )

    def _analyze_popularity(self, inst: Instance) -> Proc[None]:
        endpoint = inst.served_by or inst.app_endpoint
        if endpoint is None or not self.bus.is_registered(endpoint):
            msg = f"{inst.subject} has no APP endpoint to analyze"
            raise WrongState(msg)

        response = yield from self.bus.call(endpoint, Method.GET, f"/nbi/{endpoint}/popularity")
        ranking = response.json()["ranking"]  # type: ignore[index, call-overload]
        for video_id, count in ranking:
            yield from self.udm.upsert(Constant.popularity_table, [str(video_id), str(count)])
        self.log.emit(
            EventKind.POPULARITY_ANALYZED,
            inst.subject,
            videos=len(ranking),
            top=ranking[:5],
            **inst.ids,
        )

    # -- release

    def release_memory(self, instance_id: int) -> Instance:
        """Explicit memory release of a completed instance. Repeating it is a no-op."""

        inst = self.instance(instance_id)
        if inst.state is _S.RELEASED:
            pdebug(f"{inst.subject} already released")
            return inst
        if inst.state not in (_S.COMPLETED, _S.MEMORY_HELD):
            msg = f"{inst.subject} is {inst.state}; only completed instances release memory"
            raise WrongState(msg)

        if inst.state is _S.COMPLETED:
            self._transition(inst, _S.MEMORY_HELD)
        for grant_id in inst.grants:
            self.vim.release(grant_id, {Component.MEMORY, Component.OTHER})
        self._transition(inst, _S.RELEASED)
        self._drop_endpoint(inst)
        if inst.pod_id is not None and self.cluster.pods[inst.pod_id].state is PodState.RUNNING:
            self._idle_pod(inst.pod_id)
        self.log.emit(EventKind.INSTANCE_RELEASED, inst.subject, **inst.ids)
        return inst

    # -- the `mano` endpoint

    def handle_request(self, request: Message) -> Proc[Message]:
        body = request.json()
        if not isinstance(body, dict):
            msg = "service requests carry a JSON object body"
            raise MalformedFrame(msg)

        mode = str(body.get("mode") or self.settings.mano.mode)
        if mode not in Mode:
            msg = f"unknown instantiation mode `{mode}`"
            raise ConfigError(msg)

        t, inst = yield from self.select_template(
            str(body.get("service_class") or request.header("x-service-class", "")),
            str(body.get("service_name", "")),
            request_id=int(request.header("x-request-id", "0") or 0),
            mode=Mode(mode),
            input=body.get("input") or {},
        )
        yield from self.instantiate(inst, t)
        try:
            result = yield from self.run_actions(inst, t)
        except OsmecError as e:
            self.fail(inst, e)
            raise
        return Message.response(
            200,
            json={"instance_id": inst.instance_id, "state": inst.state, "result": result},
        )

    def handle(self, request: Message) -> Message | Proc[Message]:
        match request.method, request.segments:
            case Method.POST, ("mano", "requests"):
                return self.handle_request(request)
            case Method.GET, ("mano", "instances", iid) if iid.isdigit():
                if (inst := self.instances.get(int(iid))) is None:
                    msg = f"no instance inst-{iid}"
                    raise UnknownId(msg)
                return Message.response(200, json=inst.as_json())
            case Method.POST, ("mano", "instances", iid, "release-memory") if iid.isdigit():
                return Message.response(200, json=self.release_memory(int(iid)).as_json())
            case Method.GET, ("mano", "templates"):
                return Message.response(200, json=[t.to_mapping() for t in self.registry])
            case Method.GET, ("mano", "nodes", node_id) if node_id.isdigit():
                if (node := self.cluster.nodes.get(int(node_id))) is None:
                    msg = f"no node node-{node_id}"
                    raise UnknownId(msg)
                return Message.response(200, json=node.as_json())
            case _:
                msg = f"mano does not support {request.method} {request.path}"
                raise MalformedFrame(msg)
