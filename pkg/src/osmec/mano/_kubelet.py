from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import simpy

from osmec.bus import Message
from osmec.util import ContainerStartFailure, EventKind, Method, Mode, PodState, canonical_json, pdebug

if TYPE_CHECKING:
    from collections.abc import Collection, Sequence

    from osmec.bus import MessageBus
    from osmec.mano._cluster import Pod
    from osmec.simkit._events import EventLog
    from osmec.util import ManoSettings, NfKind, Proc


@dataclass(frozen=True, slots=True)
class ContainerSpec:
    nf_id: str
    nf_kind: NfKind
    cost: float


def startup_schedule(containers: Sequence[ContainerSpec], mode: Mode) -> list[tuple[float, ContainerSpec]]:
    """Offsets at which each container is up.

    Parallel starts everything at once, so a container is up after its own cost; sequential
    waits for the previous one.
    """

    if mode is Mode.PARALLEL:
        return sorted(((c.cost, c) for c in containers), key=lambda item: item[0])

    elapsed = 0.0
    ret = []
    for c in containers:
        elapsed += c.cost
        ret.append((elapsed, c))
    return ret


class Kubelet:
    """Node agent of one secondary node: heartbeats and pod startup, reached the master over the EBI."""

    def __init__(
        self,
        env: simpy.Environment,
        bus: MessageBus,
        node_id: int,
        settings: ManoSettings,
        log: EventLog,
        *,
        apiserver: str = "apiserver",
    ) -> None:
        self.env = env
        self.bus = bus
        self.node_id = node_id
        self.settings = settings
        self.log = log
        self.apiserver = apiserver
        self.silenced = False
        # sequential startups run as scripts, one pod at a time per node
        self.scripts = simpy.Resource(env, capacity=1)

    def silence(self) -> None:
        self.silenced = True

    def resume(self) -> None:
        self.silenced = False

    def heartbeat_loop(self) -> Proc[None]:
        path = f"/ebi/mano/nodes/{self.node_id}/heartbeat"
        while True:
            if not self.silenced:
                yield from self.bus.call(self.apiserver, Method.POST, path)
            yield self.env.timeout(self.settings.heartbeat_interval)

    def _write_pod(self, pod: Pod) -> Proc[None]:
        yield from self.bus.call(
            self.apiserver,
            Method.PUT,
            f"/ebi/state{pod.key}",
            body=canonical_json(pod.as_json()).encode("utf-8"),
            headers=[("x-writer", f"kubelet-{self.node_id}")],
        )

    def run_pod(
        self,
        pod: Pod,
        containers: Sequence[ContainerSpec],
        mode: Mode,
        *,
        ids: dict[str, int],
        fail_on: Collection[str] = (),
    ) -> Proc[float]:
        """Start the pod's containers; returns the elapsed startup time, waiting included.

        In sequential mode the pod also waits for every earlier sequential startup on this node.
        A container named in `fail_on` fails at its start offset and takes the pod down with it.
        """

        start = self.env.now
        if mode is Mode.PARALLEL:
            yield from self._start(pod, containers, mode, ids=ids, fail_on=fail_on)
        else:
            with self.scripts.request() as turn:
                yield turn
                yield from self._start(pod, containers, mode, ids=ids, fail_on=fail_on)
        return self.env.now - start

    def _start(
        self,
        pod: Pod,
        containers: Sequence[ContainerSpec],
        mode: Mode,
        *,
        ids: dict[str, int],
        fail_on: Collection[str],
    ) -> Proc[None]:
        start = self.env.now
        for offset, spec in startup_schedule(containers, mode):
            if (wait := start + offset - self.env.now) > 0:
                yield self.env.timeout(wait)

            if pod.state is not PodState.ASSIGNED:
                msg = f"pod-{pod.pod_id} went {pod.state} during startup"
                raise ContainerStartFailure(msg)

            if spec.nf_id in fail_on:
                pod.state = PodState.FAILED
                self.log.emit(EventKind.POD_FAILED, f"pod-{pod.pod_id}", pod_id=pod.pod_id, node=self.node_id, **ids)
                yield from self._write_pod(pod)
                msg = f"container `{spec.nf_id}` failed to start in pod-{pod.pod_id}"
                raise ContainerStartFailure(msg)

            pod.containers.append(spec.nf_id)
            self.log.emit(
                EventKind.CONTAINER_STARTED,
                f"pod-{pod.pod_id}",
                nf_id=spec.nf_id,
                nf_kind=spec.nf_kind,
                pod_id=pod.pod_id,
                node=self.node_id,
                **ids,
            )

        if pod.state is PodState.ASSIGNED:
            pod.state = PodState.RUNNING
            yield from self._write_pod(pod)
        pdebug(f"kubelet-{self.node_id}: pod-{pod.pod_id} {pod.state} ({mode})")
