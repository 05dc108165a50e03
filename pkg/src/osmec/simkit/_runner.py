from __future__ import annotations

import random
from typing import TYPE_CHECKING, Any

from osmec.mano import builtin_templates
from osmec.simkit._events import EventLog
from osmec.simkit._metrics import MetricsReport
from osmec.simkit._system import EdgeSystem, IdCounters, SubmitResult
from osmec.util import EventKind, Origin, OsmecError, Settings, pdebug, pinfo, pwarn

if TYPE_CHECKING:
    import simpy

    from osmec.mano import Template
    from osmec.simkit._scenario import FaultSpec, ReleaseSpec, RequestSpec, Scenario
    from osmec.util import Mode, Proc


class ScenarioRun:
    """Plays one repetition of a scenario, in one mode, on a fresh system."""

    def __init__(self, scenario: Scenario, system: EdgeSystem, mode: Mode | None) -> None:
        self.scenario = scenario
        self.system = system
        self.mode = mode
        self.results: dict[int, SubmitResult] = {}
        self._requests: dict[int, simpy.Process] = {}

    def play(self) -> dict[int, SubmitResult]:
        env = self.system.env
        config = self.scenario.config
        procs = []
        for index, spec in enumerate(config.requests):
            self._requests[index] = env.process(self._request(index, spec))
            procs.append(self._requests[index])
        procs.extend(env.process(self._release(spec)) for spec in config.manual_releases)
        procs.extend(env.process(self._fault(spec)) for spec in config.faults)
        self.system.run_all(procs)
        return self.results

    def _request(self, index: int, spec: RequestSpec) -> Proc[None]:
        if spec.t:
            yield self.system.env.timeout(spec.t)
        result = yield from self.system.submit(
            spec.service_class,
            spec.service_name,
            spec.input,
            mode=self.mode or spec.mode,
            protocol=spec.protocol,
            origin=Origin.SCENARIO,
            fail_containers=self.scenario.config.container_faults(index),
        )
        if not result.ok:
            pwarn(f"{self.scenario.name}: request {index} failed with {result.error}: {result.message}")
        self.results[index] = result

    def _selected(self, spec: ReleaseSpec) -> tuple[list[int], list[int]]:
        """(request indexes to wait for, instance ids to release once they are done)."""

        match spec.kind, spec.argument:
            case "request", index:
                waits = [int(index)]
            case "service", name:
                waits = [i for i, r in enumerate(self.scenario.config.requests) if r.service_name == name]
            case _:
                waits = list(self._requests)

        if spec.kind == "instance":
            return waits, [int(spec.argument)]
        return waits, []

    def _done(self, indexes: list[int]) -> Proc[None]:
        if pending := [self._requests[i] for i in indexes if not self._requests[i].processed]:
            yield self.system.env.all_of(pending)

    def _release(self, spec: ReleaseSpec) -> Proc[None]:
        env = self.system.env
        waits, instance_ids = self._selected(spec)

        if spec.t is not None:
            yield env.timeout(spec.t)
        if instance_ids:
            # an instance id is only known once every request has been placed
            yield from self._done(waits)
            for iid in instance_ids:
                yield from self._release_instance(iid, spec)
        else:
            yield env.all_of([env.process(self._release_request(i, spec)) for i in waits])
        pdebug(f"release {spec.instance_selector}: done at t={env.now:g}")

    def _release_request(self, index: int, spec: ReleaseSpec) -> Proc[None]:
        yield from self._done([index])
        if (r := self.results.get(index)) is not None and r.ok and r.instance_id is not None:
            yield from self._release_instance(r.instance_id, spec)

    def _release_instance(self, instance_id: int, spec: ReleaseSpec) -> Proc[None]:
        env = self.system.env
        inst = self.system.mano.instances.get(instance_id)
        if spec.delay is not None and inst is not None and inst.completed_at is not None:
            if (wait := inst.completed_at + spec.delay - env.now) > 0:
                yield env.timeout(wait)
        try:
            yield from self.system.release(instance_id, origin=Origin.SCENARIO)
        except OsmecError as e:
            pwarn(f"{self.scenario.name}: release of inst-{instance_id} failed: {e.message}")

    def _fault(self, spec: FaultSpec) -> Proc[None]:
        env = self.system.env
        yield env.timeout(spec.t)
        self.system.silence_node(spec.node)
        mano = self.system.settings.mano
        if spec.duration is None:
            # long enough for the controller to notice
            yield env.timeout(mano.liveness_window + mano.heartbeat_interval)
            return
        yield env.timeout(spec.duration)
        self.system.kubelets[spec.node].resume()
        yield env.timeout(mano.heartbeat_interval)


def run_scenario(
    scenario: Scenario,
    *,
    settings: Settings | None = None,
    seed: int | None = None,
    repetitions: int | None = None,
    log: EventLog | None = None,
) -> MetricsReport:
    """Every repetition and mode on its own fresh system; clocks continue from one system to the next."""

    config = scenario.config
    settings = config.bandwidths.apply(settings or Settings())
    seed = config.seed if seed is None else seed
    log = log if log is not None else EventLog()
    ids = IdCounters()
    modes: list[Mode | None] = list(config.modes) or [None]

    clock = 0.0
    for rep in range(config.repetitions if repetitions is None else repetitions):
        for mode in modes:
            system = EdgeSystem(
                settings,
                rng=random.Random(f"{seed}:{rep}:{mode or '-'}"),  # noqa: S311
                nodes=scenario.capacities,
                templates=scenario.templates,
                catalog=scenario.catalog,
                log=log,
                ids=ids,
                initial_time=clock,
            )
            ScenarioRun(scenario, system, mode).play()
            clock = float(system.env.now)

    report = MetricsReport.from_log(log)
    pinfo(f"{scenario.name}: {report.events} events, log hash <cyn>{report.log_hash:016x}</cyn>")
    return report


def measure_instantiation(
    template: Template,
    mode: Mode,
    *,
    settings: Settings | None = None,
    service_name: str | None = None,
) -> float:
    """Virtual time from RequestReceived to InstanceActive, in the bench profile.

    With no `service_name` every service of the template is requested at once, one instance each, and the
    duration runs from the first RequestReceived to the last InstanceActive.
    """

    others = [t for t in builtin_templates() if t.app_class is not template.app_class]
    system = EdgeSystem((settings or Settings()).bench(), templates=[*others, template])
    names = [service_name] if service_name else template.services() or [""]
    procs = [
        system.env.process(system.submit(str(template.app_class), name, _bench_input(name), mode=mode))
        for name in names
    ]
    system.run_all(procs)
    results: list[SubmitResult] = [p.value for p in procs]

    rids = {r.request_id for r in results}
    received: list[float] = []
    active: dict[int, float] = {}
    for r in system.log:
        rid = r.get("request_id")
        if rid not in rids:
            continue
        if r.kind == EventKind.REQUEST_RECEIVED:
            received.append(r.t)
        elif r.kind == EventKind.INSTANCE_ACTIVE:
            active.setdefault(rid, r.t)
    for result in results:
        if result.request_id not in active:
            result.raise_for_error()
    return max(active.values()) - min(received)


def _bench_input(service_name: str) -> dict[str, Any]:
    match service_name:
        case "face_recognition":
            return {"blob_id": "bench", "size_mb": 1}
        case "video":
            return {"video_id": "campus-tour"}
        case _:
            return {"n": 10}
