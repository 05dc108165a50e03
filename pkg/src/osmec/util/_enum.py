from collections.abc import Iterator
from enum import EnumMeta, IntEnum, StrEnum
from typing import Self


class _ChoiceMeta(EnumMeta):
    def __contains__(cls, value: object) -> bool:
        return value in cls._value2member_map_

    def __iter__(cls) -> Iterator[str]:
        return iter(cls._value2member_map_)


class ExitCode(IntEnum):
    SUCCESS = 0
    RUNTIME = 1
    CONFIG = 2
    IO = 3
    KB_INT = 130


class LogLevel(StrEnum, metaclass=_ChoiceMeta):
    ERROR = "error"
    INFO = "info"
    DEBUG = "debug"

    @property
    def rank(self) -> int:
        return (LogLevel.ERROR, LogLevel.INFO, LogLevel.DEBUG).index(self)


class Mode(StrEnum, metaclass=_ChoiceMeta):
    PARALLEL = "parallel"
    SEQUENTIAL = "sequential"

    def opposite(self) -> Self:
        return Mode.SEQUENTIAL if self == Mode.PARALLEL else Mode.PARALLEL


class ServiceClass(StrEnum, metaclass=_ChoiceMeta):
    INTENSIVE_COMPUTATION = "intensive_computation"
    HIGH_THROUGHPUT = "high_throughput"


class ProtocolKind(StrEnum, metaclass=_ChoiceMeta):
    HTTP = "http"
    LEGACY = "legacy"


class Method(StrEnum, metaclass=_ChoiceMeta):
    GET = "GET"
    POST = "POST"
    PUT = "PUT"
    DELETE = "DELETE"


class Interface(StrEnum, metaclass=_ChoiceMeta):
    SBI = "sbi"
    NBI = "nbi"
    EBI = "ebi"


class NfKind(StrEnum, metaclass=_ChoiceMeta):
    UDM = "UDM"
    NRF = "NRF"
    SRF = "SRF"
    CPCF = "CPCF"
    ASF = "ASF"
    UPF = "UPF"
    APP = "APP"

    @property
    def general(self) -> bool:
        """Shared infrastructure NFs that are always running and never instantiated per request."""
        return self in (NfKind.UDM, NfKind.NRF, NfKind.SRF, NfKind.CPCF, NfKind.UPF)


class StorageClass(StrEnum, metaclass=_ChoiceMeta):
    LOCAL = "local"
    REMOTE = "remote"


class InstanceState(StrEnum, metaclass=_ChoiceMeta):
    SELECTED = "Selected"
    CONFIGURED = "Configured"
    RESOURCES_ALLOCATED = "ResourcesAllocated"
    ACTIVE = "Active"
    COMPLETED = "Completed"
    MEMORY_HELD = "MemoryHeld"
    RELEASED = "Released"
    FAILED = "Failed"


class PodState(StrEnum, metaclass=_ChoiceMeta):
    IDLE = "Idle"
    ASSIGNED = "Assigned"
    RUNNING = "Running"
    FAILED = "Failed"
    TERMINATED = "Terminated"


class Component(StrEnum, metaclass=_ChoiceMeta):
    CPU = "cpu"
    MEMORY = "memory"
    OTHER = "other"


class ExportFormat(StrEnum, metaclass=_ChoiceMeta):
    CSV = "csv"
    HISTOGRAM_CSV = "histogram-csv"


class Origin(StrEnum, metaclass=_ChoiceMeta):
    SCENARIO = "scenario"
    CLI = "cli"
    BOOT = "boot"


class EventKind(StrEnum, metaclass=_ChoiceMeta):
    REQUEST_RECEIVED = "RequestReceived"
    PROTOCOL_IDENTIFIED = "ProtocolIdentified"
    CONVERTED = "Converted"
    TEMPLATE_SELECTED = "TemplateSelected"
    PARAMS_INSERTED = "ParamsInserted"
    NF_RESOLVED = "NfResolved"
    PARAMS_UPDATED = "ParamsUpdated"
    POD_ASSIGNED = "PodAssigned"
    RESOURCE_GRANTED = "ResourceGranted"
    CONTAINER_STARTED = "ContainerStarted"
    INSTANCE_ACTIVE = "InstanceActive"
    SERVICE_COMPLETED = "ServiceCompleted"
    CPU_RELEASED = "CpuReleased"
    MEMORY_RELEASED = "MemoryReleased"
    REMOTE_IMAGE_FETCH = "RemoteImageFetch"
    FAULT_EVENT = "FaultEvent"
    INSTANCE_FAILED = "InstanceFailed"
    INSTANCE_RELEASED = "InstanceReleased"
    POD_FAILED = "PodFailed"
    NODE_REGISTERED = "NodeRegistered"
    STATE_WRITTEN = "StateWritten"
    APP_RECORDED = "AppRecorded"
    IMAGE_STORED = "ImageStored"
    ENDPOINT_REGISTERED = "EndpointRegistered"
    CHARGED = "Charged"
    POPULARITY_ANALYZED = "PopularityAnalyzed"
    COMMAND_ISSUED = "CommandIssued"


class MessageKind(StrEnum, metaclass=_ChoiceMeta):
    REQUEST = "request"
    RESPONSE = "response"


class ActionKind(StrEnum, metaclass=_ChoiceMeta):
    SERVE = "serve"
    CHARGE = "charge"
    ANALYZE_POPULARITY = "analyze_popularity"


class Location(StrEnum, metaclass=_ChoiceMeta):
    EDGE = "edge"
    CLOUD = "cloud"


class RouteKind(StrEnum, metaclass=_ChoiceMeta):
    EDGE_HIT = "EdgeHit"
    CLOUD_FORWARD = "CloudForward"
