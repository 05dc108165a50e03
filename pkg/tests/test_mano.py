from __future__ import annotations

import json
import random
from decimal import Decimal
from importlib import resources
from itertools import pairwise
from typing import TYPE_CHECKING, Any

import pytest

from osmec.bus import Message
from osmec.mano import (
    LEGAL_TRANSITIONS,
    ApiServer,
    Cluster,
    ContainerSpec,
    Instance,
    Scheduler,
    StateStore,
    TemplateRegistry,
    Vim,
    builtin_templates,
    check_template,
    parse_template,
    startup_schedule,
)
from osmec.nf import BUILTIN_DESCRIPTORS
from osmec.simkit import EdgeSystem, measure_instantiation
from osmec.util import (
    ClusterExhausted,
    Component,
    Constant,
    EventKind,
    IllegalTransition,
    InstanceState,
    InsufficientResources,
    InvalidInput,
    InvalidTemplate,
    Method,
    Mode,
    NfKind,
    PodState,
    ResourceVector,
    UnknownGrant,
    UnknownServiceClass,
    WrongState,
    ZeroRequest,
)

if TYPE_CHECKING:
    import simpy

    from osmec.bus import MessageBus
    from osmec.simkit import EventLog
    from osmec.util import Settings

_CATALOG = {d.nf_id: d for d in BUILTIN_DESCRIPTORS}


def _vector(cpu: int, memory: int | str, storage: int = 0, bandwidth: int = 0) -> ResourceVector:
    return ResourceVector(cpu=cpu, memory=Decimal(memory), storage=storage, bandwidth=bandwidth)


def _builtin(app_class: str) -> dict[str, Any]:
    return json.loads((resources.files("osmec.data") / "templates" / f"{app_class}.json").read_text(encoding="utf-8"))


def _random_template(rng: random.Random, n: int) -> dict[str, Any]:
    names = [f"fz-{i}" for i in range(n)]
    kinds = ["ASF"] * (n - 1) + ["APP"]
    return {
        "template_id": f"fuzz-{n}",
        "app_class": "intensive_computation",
        "managed_nfs": [*Constant.shared_nfs, *names],
        "attributes": {
            "table": "fuzz_params",
            "schema": ["key", "cpu", "memory", "cpu_work", "status"],
            "rows": [["svc", "100", "64", "10", "new"]],
        },
        "resource_profile": {"cpu": 100, "memory": 64, "storage": 10, "bandwidth": 1},
        "container_costs": {name: rng.randint(1, 100) for name in names},
        "descriptors": [
            {
                "nf_id": name,
                "nf_kind": kind,
                "storage_class": "remote",
                "image_ref": f"registry.edge/{name}:1",
                "resource_request": {"cpu": 10},
            }
            for name, kind in zip(names, kinds, strict=True)
        ],
    }


# instance state machine


def test_transitions() -> None:
    inst = Instance(1, "t", 1, "intensive_computation", "sum", Mode.PARALLEL, 0.0)
    for i, state in enumerate(
        (
            InstanceState.CONFIGURED,
            InstanceState.RESOURCES_ALLOCATED,
            InstanceState.ACTIVE,
            InstanceState.COMPLETED,
            InstanceState.MEMORY_HELD,
            InstanceState.RELEASED,
        ),
        start=1,
    ):
        inst.transition(state, float(i))

    assert inst.is_terminal
    assert inst.completed_at == 4.0
    assert inst.released_at == 6.0
    assert not LEGAL_TRANSITIONS[InstanceState.RELEASED]
    assert not LEGAL_TRANSITIONS[InstanceState.FAILED]
    with pytest.raises(IllegalTransition):
        inst.transition(InstanceState.FAILED, 7.0)

    skipper = Instance(2, "t", 2, "intensive_computation", "sum", Mode.PARALLEL, 0.0)
    with pytest.raises(IllegalTransition):
        skipper.transition(InstanceState.ACTIVE, 1.0)


# templates


def test_builtin_templates() -> None:
    templates = {t.template_id: t for t in builtin_templates()}

    assert set(templates) == {"computation-intensive", "high-throughput"}
    for t in templates.values():
        check_template(t, _CATALOG)

    face = templates["computation-intensive"].resources_for("face_recognition")
    assert face.memory == Decimal("83.9")
    assert face.cpu == Decimal(2000)


def test_template_needs_shared_set() -> None:
    data = _builtin("intensive_computation")
    data["managed_nfs"] = [nf for nf in data["managed_nfs"] if nf != "srf"]

    with pytest.raises(InvalidTemplate, match="shared set"):
        check_template(parse_template(data), _CATALOG)


def test_template_rules() -> None:
    uncosted = _builtin("high_throughput")
    del uncosted["container_costs"]["app-video"]
    with pytest.raises(InvalidTemplate, match="container_costs"):
        check_template(parse_template(uncosted), _CATALOG)

    unknown = _builtin("high_throughput")
    unknown["managed_nfs"].append("ghost")
    with pytest.raises(InvalidTemplate, match="ghost"):
        check_template(parse_template(unknown), _CATALOG)

    shared_only = _builtin("high_throughput")
    shared_only["managed_nfs"] = [*Constant.shared_nfs, "upf"]
    shared_only["container_costs"] = {}
    with pytest.raises(InvalidTemplate, match="dedicated"):
        check_template(parse_template(shared_only), _CATALOG)


def test_registry_keeps_dedicated_sets_disjoint() -> None:
    registry = TemplateRegistry(_CATALOG)
    for t in builtin_templates():
        registry.register(t)

    thief = _builtin("high_throughput")
    thief["template_id"] = "thief"
    thief["app_class"] = "intensive_computation"
    registry_two = TemplateRegistry(_CATALOG)
    registry_two.register(parse_template(_builtin("high_throughput")))
    with pytest.raises(InvalidTemplate, match="disjoint"):
        registry_two.register(parse_template(thief))

    with pytest.raises(UnknownServiceClass):
        registry.for_class("gaming")
    assert registry.for_class("high_throughput").template_id == "high-throughput"


# startup and instantiation timing


def test_parallel_never_slower_than_sequential() -> None:
    rng = random.Random(2024)
    for _ in range(1000):
        n = rng.randint(2, 6)
        specs = [ContainerSpec(f"c{i}", NfKind.ASF, float(rng.randint(1, 100))) for i in range(n)]
        parallel = startup_schedule(specs, Mode.PARALLEL)[-1][0]
        sequential = startup_schedule(specs, Mode.SEQUENTIAL)[-1][0]
        assert parallel == max(s.cost for s in specs)
        assert sequential == sum(s.cost for s in specs)
        assert parallel < sequential

    single = [ContainerSpec("only", NfKind.APP, 42.0)]
    assert startup_schedule(single, Mode.PARALLEL) == startup_schedule(single, Mode.SEQUENTIAL)


def test_measured_instantiation_of_random_templates() -> None:
    rng = random.Random(7)
    for _ in range(15):
        data = _random_template(rng, rng.randint(2, 6))
        t = parse_template(data)
        costs = list(data["container_costs"].values())

        parallel = measure_instantiation(t, Mode.PARALLEL)
        sequential = measure_instantiation(t, Mode.SEQUENTIAL)

        assert parallel == pytest.approx(1.0 + max(costs))
        assert sequential == pytest.approx(1.0 + sum(costs))
        assert parallel < sequential


def test_measured_instantiation_single_container() -> None:
    data = _random_template(random.Random(1), 1)
    t = parse_template(data)

    assert measure_instantiation(t, Mode.PARALLEL) == measure_instantiation(t, Mode.SEQUENTIAL)


def test_builtin_instantiation_modes() -> None:
    by_class = {str(t.app_class): t for t in builtin_templates()}
    intensive, video = by_class["intensive_computation"], by_class["high_throughput"]

    # three intensive instances start together; a lone video container starts the same either way
    assert measure_instantiation(intensive, Mode.PARALLEL) < measure_instantiation(intensive, Mode.SEQUENTIAL)
    assert measure_instantiation(video, Mode.PARALLEL) == measure_instantiation(video, Mode.SEQUENTIAL)


def test_builtin_services() -> None:
    by_class = {str(t.app_class): t for t in builtin_templates()}

    assert by_class["intensive_computation"].services() == ["sum", "prime_sum", "face_recognition"]
    assert by_class["high_throughput"].services() == ["video"]


# state store and api server


def test_state_store_revisions_and_watch(env: simpy.Environment) -> None:
    store = StateStore(env)
    pods = store.watch("/pods/")
    closed = store.watch("/")
    closed.close()

    r1 = store.put("/pods/1", b"a")
    r2 = store.put("/grants/1", b"b")
    r3 = store.put("/pods/1", b"c")

    assert (r1, r2, r3) == (1, 2, 3)
    assert store.get("/pods/1").value == b"c"
    assert store.get("/pods/1").revision == 3
    assert store.get("/nope") is None
    assert store.keys("/pods") == ["/pods/1"]
    assert [(r.value, r.revision) for r in pods.drain()] == [(b"a", 1), (b"c", 3)]
    assert closed.drain() == []


def test_api_server_over_ebi(env: simpy.Environment, bus: MessageBus, log: EventLog, drive) -> None:
    api = ApiServer(StateStore(env), log)
    bus.register_endpoint(api.name, api.handle)
    beats: list[tuple[int, float]] = []
    api.heartbeat_listener = lambda node, now: beats.append((node, now))

    put = drive(
        bus.call(api.name, Method.PUT, "/ebi/state/pods/3", body=b"{}", headers=[("x-writer", "kubelet-1")]),
    )
    got = drive(bus.call(api.name, Method.GET, "/ebi/state/pods/3"))
    absent = drive(bus.lookup(api.name, "/ebi/state/pods/4"))
    beat = drive(bus.call(api.name, Method.POST, "/ebi/mano/nodes/2/heartbeat"))

    assert put.json() == {"revision": 1}
    assert got.body == b"{}"
    assert got.header("x-revision") == "1"
    assert absent is None
    assert beat.status == 204
    assert beats == [(2, 0.0)]
    written = log.of_kind(EventKind.STATE_WRITTEN)[0]
    assert (written.get("key"), written.get("writer")) == ("/pods/3", "kubelet-1")


# vim and scheduler


def _master(env: simpy.Environment, log: EventLog, *capacities: ResourceVector) -> tuple[Cluster, Vim, Scheduler]:
    api = ApiServer(StateStore(env), log)
    cluster = Cluster(log)
    for node_id, capacity in enumerate(capacities, start=1):
        cluster.register_node(node_id, capacity, 0.0)
    return cluster, Vim(cluster, api, log), Scheduler(cluster, api, log)


def _conserved(cluster: Cluster, vim: Vim) -> bool:
    return all(node.free + vim.held_on(node.node_id) == node.capacity for node in cluster.nodes.values())


def test_vim_allocate_and_release(env: simpy.Environment, log: EventLog) -> None:
    cluster, vim, _ = _master(env, log, _vector(1000, 1000, 100, 100))
    ids = {"instance_id": 1, "request_id": 1, "pod_id": 1}

    grant = vim.allocate(1, _vector(600, "83.9", 10, 5), **ids)
    with pytest.raises(InsufficientResources):
        vim.allocate(1, _vector(600, 1), **ids)
    with pytest.raises(ZeroRequest):
        vim.allocate(1, ResourceVector.zero(), **ids)

    cpu = vim.release(grant.grant_id, {Component.CPU})
    assert cpu == _vector(600, 0)
    assert cluster.nodes[1].free == _vector(1000, "916.1", 90, 95)

    rest = vim.release(grant.grant_id)
    assert rest == _vector(0, "83.9", 10, 5)
    assert vim.release(grant.grant_id).is_zero
    assert cluster.nodes[1].free == cluster.nodes[1].capacity

    released = log.of_kind(EventKind.MEMORY_RELEASED)
    assert len(released) == 1
    assert Decimal(released[0].get("memory")) == Decimal("83.9")
    with pytest.raises(UnknownGrant):
        vim.release(99)


def test_vim_conservation_under_fuzz(env: simpy.Environment, log: EventLog) -> None:
    rng = random.Random(11)
    capacities = [_vector(4000, 32768, 100000, 1000), _vector(2000, 8192, 5000, 100), _vector(500, 512, 10, 10)]
    cluster, vim, _ = _master(env, log, *capacities)
    components = list(Component)

    for step in range(10_000):
        roll = rng.random()
        node_id = rng.randint(1, len(capacities))
        if roll < 0.5:
            amount = _vector(rng.randint(0, 1500), rng.randint(0, 4000), rng.randint(0, 3000), rng.randint(0, 300))
            before = cluster.nodes[node_id].free
            try:
                vim.allocate(node_id, amount, instance_id=step, request_id=step, pod_id=0)
            except (InsufficientResources, ZeroRequest):
                assert cluster.nodes[node_id].free == before
        elif roll < 0.95 and vim.grants:
            grant_id = rng.choice(list(vim.grants))
            vim.release(grant_id, rng.sample(components, rng.randint(1, 3)))
        elif roll < 0.97:
            cluster.nodes[node_id].failed = True
        else:
            vim.forget_node(node_id)
            cluster.register_node(node_id, capacities[node_id - 1], float(step), recovered=True)

        if step % 25 == 0:
            assert _conserved(cluster, vim), step

    assert _conserved(cluster, vim)


def test_scheduler_placement(env: simpy.Environment, log: EventLog) -> None:
    cluster, _, scheduler = _master(env, log, _vector(1000, 1000), _vector(3000, 1000), _vector(3000, 1000))
    ids = {"request_id": 1, "instance_id": 1}

    first = scheduler.locate_idle_pod(_vector(500, 100), ids=ids)
    assert (first.pod_id, first.node_id, first.state) == (1, 2, PodState.ASSIGNED)

    cluster.nodes[2].free = _vector(100, 100)
    second = scheduler.locate_idle_pod(_vector(500, 100), ids=ids)
    assert second.node_id == 3

    second.state = PodState.IDLE
    cluster.nodes[2].free = _vector(3000, 1000)
    reused = scheduler.locate_idle_pod(_vector(500, 100), ids=ids)
    assert reused.pod_id == second.pod_id
    assert [r.get("created") for r in log.of_kind(EventKind.POD_ASSIGNED)] == [True, True, False]

    with pytest.raises(ClusterExhausted):
        scheduler.locate_idle_pod(_vector(5000, 1), ids=ids)


# orchestrated requests


def test_prime_sum_request(system: EdgeSystem) -> None:
    result = system.request("intensive_computation", "prime_sum", {"n": 10}).raise_for_error()

    assert result.state == InstanceState.MEMORY_HELD
    assert result.result["result"] == 17
    inst = system.mano.instance(result.instance_id)
    assert inst.containers == ["app-compute"]
    assert inst.served_by == f"app-compute@inst-{inst.instance_id}"
    assert system.bus.is_registered(inst.served_by)
    assert system.asf.active == {}

    params = system.udm.query("intensive_params", f"{inst.instance_id}/prime_sum")
    assert params[-1] == "selected"
    assert system.store.get(f"/instances/{inst.instance_id}") is not None
    assert system.store.get(f"/pods/{inst.pod_id}") is not None

    node = system.cluster.nodes[inst.node_id]
    assert node.free == node.capacity - _vector(0, 21, 256, 50)


def test_one_container_per_instance(system: EdgeSystem) -> None:
    system.request("high_throughput", "video", {"video_id": "campus-tour"}).raise_for_error()
    started = system.log.of_kind(EventKind.CONTAINER_STARTED)
    assert [r.get("nf_id") for r in started] == ["app-video"]

    inputs = {"sum": {"n": 10}, "prime_sum": {"n": 10}, "face_recognition": {"blob_id": "b", "size_mb": 1}}
    procs = [
        system.env.process(system.submit("intensive_computation", name, body, mode=Mode.SEQUENTIAL))
        for name, body in inputs.items()
    ]
    system.run_all(procs)
    assert all(p.value.ok for p in procs)

    started = system.log.of_kind(EventKind.CONTAINER_STARTED)[1:]
    assert [r.get("nf_id") for r in started] == ["app-compute"] * 3
    # sequential startups on one node do not overlap
    times = [r.t for r in started]
    assert all(b - a >= 6 for a, b in pairwise(times))


def test_charging_and_popularity(system: EdgeSystem) -> None:
    face = system.request(
        "intensive_computation",
        "face_recognition",
        {"blob_id": "visitor-0042.jpg", "size_mb": 2},
    ).raise_for_error()
    video = system.request("high_throughput", "video", {"video_id": "lecture-01"}).raise_for_error()

    charged = system.log.of_kind(EventKind.CHARGED)
    assert [r.get("instance_id") for r in charged] == [face.instance_id]
    assert system.udm.query(Constant.charging_table, str(face.instance_id)) is not None

    assert video.result["served_from"] == "edge"
    assert system.udm.query(Constant.popularity_table, "lecture-01") == ("lecture-01", "1")


def test_release_memory(system: EdgeSystem) -> None:
    result = system.request("intensive_computation", "sum", {"n": 100}).raise_for_error()
    inst = system.mano.instance(result.instance_id)
    node = system.cluster.nodes[inst.node_id]

    first = system.release_memory(inst.instance_id)
    again = system.release_memory(inst.instance_id)

    assert first["state"] == again["state"] == InstanceState.RELEASED
    assert len(system.log.of_kind(EventKind.MEMORY_RELEASED)) == 1
    assert len(system.log.of_kind(EventKind.INSTANCE_RELEASED)) == 1
    assert node.free == node.capacity
    assert system.cluster.pods[inst.pod_id].state is PodState.IDLE

    reuse = system.request("intensive_computation", "sum", {"n": 5}).raise_for_error()
    assert system.mano.instance(reuse.instance_id).pod_id == inst.pod_id


def test_release_of_active_instance(system: EdgeSystem) -> None:
    proc = system.env.process(
        system.submit("intensive_computation", "face_recognition", {"blob_id": "x.jpg", "size_mb": 1}),
    )
    while (inst := system.instance_for(1)) is None or inst.state is not InstanceState.ACTIVE:
        system.env.step()

    with pytest.raises(WrongState):
        system.mano.release_memory(inst.instance_id)

    system.env.run(until=proc)
    assert proc.value.ok


def test_unknown_service_class(system: EdgeSystem) -> None:
    result = system.request("gaming", "chess")

    assert not result.ok
    assert result.error == "UnknownServiceClass"
    assert result.instance_id is None
    with pytest.raises(UnknownServiceClass):
        result.raise_for_error()


@pytest.mark.parametrize(
    ("service_name", "data"),
    [
        ("sum", {"n": -1}),
        ("sum", {"n": "ten"}),
        ("sum", {"n": Decimal("1.5")}),
        ("prime_sum", {"n": None}),
        ("prime_sum", {"n": [10]}),
        ("face_recognition", {"blob_id": "x.jpg", "size_mb": "big"}),
    ],
)
def test_invalid_input_rolls_back(system: EdgeSystem, service_name: str, data: dict[str, Any]) -> None:
    before = {n: node.free for n, node in system.cluster.nodes.items()}
    result = system.request("intensive_computation", service_name, data)

    assert result.error == "InvalidInput"
    with pytest.raises(InvalidInput):
        result.raise_for_error()
    inst = system.mano.instance(result.instance_id)
    assert inst.state is InstanceState.FAILED
    assert {n: node.free for n, node in system.cluster.nodes.items()} == before
    assert system.cluster.pods[inst.pod_id].state is PodState.IDLE
    assert [r.get("reason") for r in system.log.of_kind(EventKind.INSTANCE_FAILED)] == ["InvalidInput"]

    again = system.request("intensive_computation", "sum", {"n": 4}).raise_for_error()
    assert again.result["result"] == 10


def test_container_failure_rolls_back(system: EdgeSystem) -> None:
    before = {n: node.free for n, node in system.cluster.nodes.items()}
    result = system.request("intensive_computation", "prime_sum", {"n": 10}, fail_containers={"app-compute"})

    assert result.error == "ContainerStartFailure"
    inst = system.mano.instance(result.instance_id)
    assert inst.state is InstanceState.FAILED
    assert {n: node.free for n, node in system.cluster.nodes.items()} == before
    assert system.cluster.pods[inst.pod_id].state is PodState.FAILED
    assert len(system.log.of_kind(EventKind.POD_FAILED)) == 1
    assert not system.bus.is_registered(f"app-compute@{inst.subject}")

    with pytest.raises(WrongState):
        system.release_memory(inst.instance_id)


def test_cluster_exhaustion(settings: Settings) -> None:
    system = EdgeSystem(settings, nodes=[_vector(1000, 1000, 1000, 1000)])
    result = system.request("intensive_computation", "face_recognition", {"blob_id": "x.jpg", "size_mb": 1})

    assert result.error == "ClusterExhausted"
    assert system.mano.instance(result.instance_id).state is InstanceState.FAILED
    assert system.cluster.nodes[1].free == system.cluster.nodes[1].capacity


def test_node_failure_and_recovery(settings: Settings) -> None:
    system = EdgeSystem(settings, nodes=[_vector(4000, 32768, 100000, 1000)] * 2)
    result = system.request("intensive_computation", "sum", {"n": 3}).raise_for_error()
    inst = system.mano.instance(result.instance_id)

    system.silence_node(inst.node_id)
    system.advance(settings.mano.liveness_window + 2 * settings.mano.heartbeat_interval)

    faults = system.log.of_kind(EventKind.FAULT_EVENT)
    assert [(f.get("node"), f.get("instance_id")) for f in faults] == [(inst.node_id, inst.instance_id)]
    assert inst.state is InstanceState.FAILED
    assert system.cluster.nodes[inst.node_id].failed
    assert system.cluster.pods[inst.pod_id].state is PodState.FAILED

    other = system.request("intensive_computation", "sum", {"n": 4}).raise_for_error()
    assert system.mano.instance(other.instance_id).node_id != inst.node_id

    system.kubelets[inst.node_id].resume()
    system.advance(2 * settings.mano.heartbeat_interval)

    node = system.cluster.nodes[inst.node_id]
    assert not node.failed
    assert node.free == node.capacity
    assert system.cluster.pods[inst.pod_id].state is PodState.TERMINATED
    assert system.log.of_kind(EventKind.NODE_REGISTERED)[-1].get("recovered") is True


def test_node_failure_spares_idle_pods(settings: Settings) -> None:
    system = EdgeSystem(settings)
    held = system.request("intensive_computation", "sum", {"n": 3}).raise_for_error()
    done = system.request("intensive_computation", "prime_sum", {"n": 10}).raise_for_error()
    system.release_memory(done.instance_id)
    idle = system.mano.instance(done.instance_id).pod_id
    assert system.cluster.pods[idle].state is PodState.IDLE

    system.silence_node(1)
    system.advance(settings.mano.liveness_window + 2 * settings.mano.heartbeat_interval)

    faults = system.log.of_kind(EventKind.FAULT_EVENT)
    assert [f.get("instance_id") for f in faults] == [held.instance_id]
    assert system.cluster.pods[idle].state is PodState.IDLE
    assert system.mano.instance(done.instance_id).state is InstanceState.RELEASED


def test_inspection_routes(system: EdgeSystem) -> None:
    templates = system.execute(system.inspect("templates"))
    node = system.execute(system.inspect("nodes/1"))

    assert sorted(t["template_id"] for t in templates) == ["computation-intensive", "high-throughput"]
    assert node["node_id"] == 1
    assert node["failed"] is False


def test_mano_rejects_unknown_mode(system: EdgeSystem) -> None:
    request = Message.request(
        Method.POST,
        "/ebi/mano/requests",
        json={"service_class": "intensive_computation", "service_name": "sum", "mode": "sideways"},
    )
    response = system.execute(system.bus.send_request("mano", request))

    assert response.status == 400
    assert response.header("x-error") == "ConfigError"
