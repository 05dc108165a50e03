from __future__ import annotations

from osmec.mano._cluster import Cluster, Node, Pod
from osmec.mano._controller import Controller
from osmec.mano._instance import LEGAL_TRANSITIONS, Instance, is_legal
from osmec.mano._kubelet import ContainerSpec, Kubelet, startup_schedule
from osmec.mano._orchestrator import Orchestrator
from osmec.mano._scheduler import Scheduler
from osmec.mano._state_store import ApiServer, StateRecord, StateStore, Watch
from osmec.mano._template import (
    Template,
    TemplateAttributes,
    TemplateRegistry,
    builtin_templates,
    check_template,
    load_template,
    parse_template,
)
from osmec.mano._vim import ALL_COMPONENTS, ResourceGrant, Vim

__all__ = [
    "ALL_COMPONENTS",
    "LEGAL_TRANSITIONS",
    "ApiServer",
    "Cluster",
    "ContainerSpec",
    "Controller",
    "Instance",
    "Kubelet",
    "Node",
    "Orchestrator",
    "Pod",
    "ResourceGrant",
    "Scheduler",
    "StateRecord",
    "StateStore",
    "Template",
    "TemplateAttributes",
    "TemplateRegistry",
    "Vim",
    "Watch",
    "builtin_templates",
    "check_template",
    "is_legal",
    "load_template",
    "parse_template",
    "startup_schedule",
]
