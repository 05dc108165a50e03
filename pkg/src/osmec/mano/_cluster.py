from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count
from typing import TYPE_CHECKING, Any

from osmec.util import EventKind, PodState, ResourceVector

if TYPE_CHECKING:
    from osmec.simkit._events import EventLog


@dataclass
class Pod:
    pod_id: int
    node_id: int
    state: PodState = PodState.IDLE
    containers: list[str] = field(default_factory=list)
    instance_id: int | None = None

    @property
    def key(self) -> str:
        return f"/pods/{self.pod_id}"

    def as_json(self) -> dict[str, Any]:
        return {
            "pod_id": self.pod_id,
            "node_id": self.node_id,
            "state": self.state,
            "containers": list(self.containers),
            "instance_id": self.instance_id,
        }


@dataclass
class Node:
    node_id: int
    capacity: ResourceVector
    free: ResourceVector
    last_heartbeat: float
    failed: bool = False
    pods: list[int] = field(default_factory=list)

    @property
    def subject(self) -> str:
        return f"node-{self.node_id}"

    def as_json(self) -> dict[str, Any]:
        return {
            "node_id": self.node_id,
            "capacity": self.capacity.to_mapping(),
            "free": self.free.to_mapping(),
            "last_heartbeat": self.last_heartbeat,
            "failed": self.failed,
            "pods": list(self.pods),
        }


class Cluster:
    """Secondary nodes and their pods as the master node sees them."""

    def __init__(self, log: EventLog) -> None:
        self.log = log
        self.nodes: dict[int, Node] = {}
        self.pods: dict[int, Pod] = {}
        self._pod_ids = count(1)

    def register_node(self, node_id: int, capacity: ResourceVector, now: float, *, recovered: bool = False) -> Node:
        """A (re)joining node starts fresh: full free pool, no pods."""

        node = self.nodes[node_id] = Node(node_id, capacity, capacity, now)
        self.log.emit(
            EventKind.NODE_REGISTERED,
            node.subject,
            node=node_id,
            recovered=recovered,
            **capacity.to_mapping(),
        )
        return node

    def alive(self) -> list[Node]:
        return [n for _, n in sorted(self.nodes.items()) if not n.failed]

    def new_pod(self, node_id: int) -> Pod:
        pod = Pod(next(self._pod_ids), node_id)
        self.pods[pod.pod_id] = pod
        self.nodes[node_id].pods.append(pod.pod_id)
        return pod

    def pods_on(self, node_id: int) -> list[Pod]:
        return [self.pods[p] for p in self.nodes[node_id].pods]
