from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count
from typing import TYPE_CHECKING, Any

from osmec.util import (
    Component,
    EventKind,
    InsufficientResources,
    ResourceVector,
    UnknownGrant,
    ZeroRequest,
    pdebug,
)

if TYPE_CHECKING:
    from collections.abc import Iterable

    from osmec.mano._cluster import Cluster
    from osmec.mano._state_store import ApiServer
    from osmec.simkit._events import EventLog

ALL_COMPONENTS = frozenset(Component)


@dataclass
class ResourceGrant:
    grant_id: int
    instance_id: int
    request_id: int
    pod_id: int
    node_id: int
    amount: ResourceVector
    granted_at: float
    held_components: set[Component] = field(default_factory=lambda: set(ALL_COMPONENTS))

    @property
    def held(self) -> ResourceVector:
        return self.amount.only(self.held_components)

    @property
    def live(self) -> bool:
        return bool(self.held_components)

    @property
    def ids(self) -> dict[str, int]:
        return {"request_id": self.request_id, "instance_id": self.instance_id}

    def as_json(self) -> dict[str, Any]:
        return {
            "grant_id": self.grant_id,
            "instance_id": self.instance_id,
            "pod_id": self.pod_id,
            "node_id": self.node_id,
            "amount": self.amount.to_mapping(),
            "held": sorted(self.held_components),
            "granted_at": self.granted_at,
        }


class Vim:
    """Grants and returns node resources. Per node: free + held by live grants == capacity."""

    def __init__(self, cluster: Cluster, apiserver: ApiServer, log: EventLog) -> None:
        self.cluster = cluster
        self.apiserver = apiserver
        self.log = log
        self.grants: dict[int, ResourceGrant] = {}
        self._ids = count(1)

    def allocate(
        self,
        node_id: int,
        amount: ResourceVector,
        *,
        instance_id: int,
        request_id: int,
        pod_id: int,
    ) -> ResourceGrant:
        """All four components or nothing; no simulated time passes between check and decrement."""

        if amount.is_zero:
            msg = f"inst-{instance_id}: refusing an all-zero resource request"
            raise ZeroRequest(msg)

        node = self.cluster.nodes[node_id]
        if node.failed or not amount <= node.free:
            msg = f"node-{node_id} cannot grant {amount.to_mapping()} (free {node.free.to_mapping()})"
            raise InsufficientResources(msg)

        node.free = node.free - amount
        grant = ResourceGrant(
            grant_id=next(self._ids),
            instance_id=instance_id,
            request_id=request_id,
            pod_id=pod_id,
            node_id=node_id,
            amount=amount,
            granted_at=float(self.log.now),
        )
        self.grants[grant.grant_id] = grant
        self.log.emit(
            EventKind.RESOURCE_GRANTED,
            f"grant-{grant.grant_id}",
            grant_id=grant.grant_id,
            node=node_id,
            pod_id=pod_id,
            **amount.to_mapping(),
            **grant.ids,
        )
        self.apiserver.put_json(f"/grants/{grant.grant_id}", grant.as_json(), writer="vim")
        return grant

    def release(self, grant_id: int, components: Iterable[Component] = ALL_COMPONENTS) -> ResourceVector:
        """Return the still-held part of the named components. Releasing twice is a no-op."""

        if (grant := self.grants.get(grant_id)) is None:
            msg = f"no grant {grant_id}"
            raise UnknownGrant(msg)

        parts = grant.held_components & set(components)
        if not parts:
            pdebug(f"vim: grant-{grant_id} holds none of {sorted(set(components))}")
            return ResourceVector.zero()

        returned = grant.amount.only(parts)
        node = self.cluster.nodes[grant.node_id]
        node.free = node.free + returned
        grant.held_components -= parts

        subject = f"grant-{grant_id}"
        if Component.CPU in parts:
            self.log.emit(
                EventKind.CPU_RELEASED,
                subject,
                grant_id=grant_id,
                node=grant.node_id,
                cpu=returned.cpu,
                **grant.ids,
            )
        if parts & {Component.MEMORY, Component.OTHER}:
            self.log.emit(
                EventKind.MEMORY_RELEASED,
                subject,
                grant_id=grant_id,
                node=grant.node_id,
                memory=returned.memory,
                storage=returned.storage,
                bandwidth=returned.bandwidth,
                **grant.ids,
            )
        self.apiserver.put_json(f"/grants/{grant_id}", grant.as_json(), writer="vim")
        return returned

    def held_on(self, node_id: int) -> ResourceVector:
        total = ResourceVector.zero()
        for g in self.grants.values():
            if g.node_id == node_id and g.live:
                total = total + g.held
        return total

    def forget_node(self, node_id: int) -> None:
        """Drop every live grant on a node that is being re-registered with a fresh pool."""

        for g in self.grants.values():
            if g.node_id == node_id:
                g.held_components.clear()
