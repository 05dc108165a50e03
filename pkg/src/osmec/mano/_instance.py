from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from osmec.util import IllegalTransition, InstanceState, Mode

_S = InstanceState

LEGAL_TRANSITIONS: dict[InstanceState, frozenset[InstanceState]] = {
    _S.SELECTED: frozenset({_S.CONFIGURED, _S.FAILED}),
    _S.CONFIGURED: frozenset({_S.RESOURCES_ALLOCATED, _S.FAILED}),
    _S.RESOURCES_ALLOCATED: frozenset({_S.ACTIVE, _S.FAILED}),
    _S.ACTIVE: frozenset({_S.COMPLETED, _S.FAILED}),
    _S.COMPLETED: frozenset({_S.MEMORY_HELD, _S.FAILED}),
    _S.MEMORY_HELD: frozenset({_S.RELEASED, _S.FAILED}),
    _S.RELEASED: frozenset(),
    _S.FAILED: frozenset(),
}


def is_legal(src: InstanceState, dst: InstanceState) -> bool:
    return dst in LEGAL_TRANSITIONS[src]


@dataclass
class Instance:
    """A resource-bearing activation of a template, tied to the request that caused it."""

    instance_id: int
    template_id: str
    request_id: int
    service_class: str
    service_name: str
    mode: Mode
    created_at: float
    input: dict[str, Any] = field(default_factory=dict)
    state: InstanceState = InstanceState.SELECTED
    history: list[tuple[float, InstanceState]] = field(default_factory=list)
    pod_id: int | None = None
    node_id: int | None = None
    grants: list[int] = field(default_factory=list)
    containers: list[str] = field(default_factory=list)
    app_endpoint: str | None = None
    served_by: str | None = None
    result: dict[str, Any] | None = None
    completed_at: float | None = None
    released_at: float | None = None

    def __post_init__(self) -> None:
        if not self.history:
            self.history.append((self.created_at, self.state))

    @property
    def subject(self) -> str:
        return f"inst-{self.instance_id}"

    @property
    def ids(self) -> dict[str, int]:
        """Subject ids carried by every event about this instance."""

        return {"request_id": self.request_id, "instance_id": self.instance_id}

    @property
    def is_terminal(self) -> bool:
        return self.state in (InstanceState.RELEASED, InstanceState.FAILED)

    def transition(self, to: InstanceState, now: float) -> None:
        if not is_legal(self.state, to):
            msg = f"{self.subject}: {self.state} -> {to} is not a legal transition"
            raise IllegalTransition(msg)

        self.state = to
        self.history.append((now, to))
        if to is InstanceState.COMPLETED:
            self.completed_at = now
        elif to is InstanceState.RELEASED:
            self.released_at = now

    def as_json(self) -> dict[str, Any]:
        return {
            "instance_id": self.instance_id,
            "template_id": self.template_id,
            "request_id": self.request_id,
            "service_class": self.service_class,
            "service_name": self.service_name,
            "mode": self.mode,
            "state": self.state,
            "pod_id": self.pod_id,
            "node_id": self.node_id,
            "grants": list(self.grants),
            "containers": list(self.containers),
            "endpoint": self.app_endpoint,
            "result": self.result,
            "created_at": self.created_at,
            "completed_at": self.completed_at,
            "released_at": self.released_at,
        }
