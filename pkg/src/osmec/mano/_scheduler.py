from __future__ import annotations

from typing import TYPE_CHECKING

from osmec.util import ClusterExhausted, EventKind, PodState

if TYPE_CHECKING:
    from osmec.mano._cluster import Cluster, Node, Pod
    from osmec.mano._state_store import ApiServer
    from osmec.simkit._events import EventLog
    from osmec.util import ResourceVector


class Scheduler:
    def __init__(self, cluster: Cluster, apiserver: ApiServer, log: EventLog) -> None:
        self.cluster = cluster
        self.apiserver = apiserver
        self.log = log

    def _fits(self, node: Node, requirements: ResourceVector) -> bool:
        return not node.failed and requirements <= node.free

    def locate_idle_pod(self, requirements: ResourceVector, *, ids: dict[str, int]) -> Pod:
        """Lowest-id idle pod on a fitting node, else a new pod on the fitting node with most free room.

        Ties on free room go to the lower node id. The chosen pod ends up Assigned.
        """

        idle = [
            pod
            for _, pod in sorted(self.cluster.pods.items())
            if pod.state is PodState.IDLE and self._fits(self.cluster.nodes[pod.node_id], requirements)
        ]
        created = not idle
        if idle:
            pod = idle[0]
        else:
            candidates = [n for n in self.cluster.alive() if self._fits(n, requirements)]
            if not candidates:
                msg = f"no live node can host {requirements.to_mapping()}"
                raise ClusterExhausted(msg)
            node = min(candidates, key=lambda n: (tuple(-v for v in n.free.ordering_key()), n.node_id))
            pod = self.cluster.new_pod(node.node_id)

        pod.state = PodState.ASSIGNED
        pod.instance_id = ids.get("instance_id")
        self.apiserver.put_json(pod.key, pod.as_json(), writer="scheduler")
        self.log.emit(
            EventKind.POD_ASSIGNED,
            f"pod-{pod.pod_id}",
            pod_id=pod.pod_id,
            node=pod.node_id,
            created=created,
            **ids,
        )
        return pod
