from __future__ import annotations

from typing import TYPE_CHECKING

from osmec.util import EventKind, PodState, pdebug, pwarn

if TYPE_CHECKING:
    from collections.abc import Callable

    import simpy

    from osmec.mano._cluster import Cluster, Node
    from osmec.mano._state_store import ApiServer
    from osmec.mano._vim import Vim
    from osmec.simkit._events import EventLog, EventRecord
    from osmec.util import ManoSettings, Proc, ResourceVector

type FailInstance = Callable[[int, str], None]

_LIVE = (PodState.ASSIGNED, PodState.RUNNING)


class Controller:
    """Liveness tracking: a node silent for the liveness window is declared failed."""

    def __init__(
        self,
        env: simpy.Environment,
        cluster: Cluster,
        vim: Vim,
        apiserver: ApiServer,
        settings: ManoSettings,
        log: EventLog,
        *,
        capacities: dict[int, ResourceVector],
        fail_instance: FailInstance,
    ) -> None:
        self.env = env
        self.cluster = cluster
        self.vim = vim
        self.apiserver = apiserver
        self.settings = settings
        self.log = log
        self.capacities = capacities
        self.fail_instance = fail_instance

    def loop(self) -> Proc[None]:
        while True:
            yield self.env.timeout(self.settings.heartbeat_interval)
            self.tick(float(self.env.now))

    def tick(self, now: float) -> list[EventRecord]:
        faults = []
        for node in self.cluster.alive():
            if now - node.last_heartbeat > self.settings.liveness_window:
                faults.extend(self._fail_node(node, now))
        return faults

    def _fail_node(self, node: Node, now: float) -> list[EventRecord]:
        pwarn(f"{node.subject} silent since t={node.last_heartbeat:g}; declaring it failed")
        node.failed = True

        faults = []
        for pod in self.cluster.pods_on(node.node_id):
            if pod.state not in _LIVE:
                continue
            instance_id = pod.instance_id
            pod.state = PodState.FAILED
            self.apiserver.put_json(pod.key, pod.as_json(), writer="controller")
            if instance_id is not None:
                self.fail_instance(instance_id, f"{node.subject} failed")
            faults.append(
                self.log.emit(
                    EventKind.FAULT_EVENT,
                    node.subject,
                    node=node.node_id,
                    pod_id=pod.pod_id,
                    instance_id=instance_id,
                    last_heartbeat=node.last_heartbeat,
                    detected_at=now,
                ),
            )
        return faults

    def heartbeat(self, node_id: int, now: float) -> None:
        if (node := self.cluster.nodes.get(node_id)) is None:
            pdebug(f"controller: heartbeat from unknown node-{node_id}")
            return
        if not node.failed:
            node.last_heartbeat = now
            return

        # back from the dead: old pods are gone, the node rejoins with a full pool
        for pod in self.cluster.pods_on(node_id):
            pod.state = PodState.TERMINATED
            self.apiserver.put_json(pod.key, pod.as_json(), writer="controller")
        self.vim.forget_node(node_id)
        self.cluster.register_node(node_id, self.capacities[node_id], now, recovered=True)
