from __future__ import annotations

from osmec.util._config import ConfigSection, config_section, parse_json, read_json, section_list, setting
from osmec.util._console_io import join_choices, log_level, pdebug, perr, pinfo, pwarn, write, writeln
from osmec.util._defaults import Constant, Default
from osmec.util._enum import (
    ActionKind,
    Component,
    EventKind,
    ExitCode,
    ExportFormat,
    InstanceState,
    Interface,
    Location,
    LogLevel,
    MessageKind,
    Method,
    Mode,
    NfKind,
    Origin,
    PodState,
    ProtocolKind,
    RouteKind,
    ServiceClass,
    StorageClass,
)
from osmec.util._errors import (
    ArityMismatch,
    AssetTooLarge,
    ClusterExhausted,
    ConfigError,
    ContainerStartFailure,
    DuplicateEndpoint,
    DuplicateKey,
    EmptyImage,
    IllegalTransition,
    ImageNotFound,
    InstanceNotCompleted,
    InsufficientResources,
    InvalidDescriptor,
    InvalidInput,
    InvalidTemplate,
    IoError,
    KeyNotFound,
    MalformedFrame,
    NoActiveApp,
    NoRoute,
    OsmecError,
    RequestTimeout,
    TableNotFound,
    UnknownEndpoint,
    UnknownGrant,
    UnknownId,
    UnknownInstance,
    UnknownNamespace,
    UnknownServiceClass,
    UnrecognizedProtocol,
    WrongState,
    ZeroRequest,
    error_class,
)
from osmec.util._misc import canonical_json, json_bytes, stable_hash64
from osmec.util._resources import ResourceVector
from osmec.util._settings import (
    BusSettings,
    ManoSettings,
    NrfSettings,
    Settings,
    WorkloadSettings,
    find_settings_file,
    load_settings,
)
from osmec.util._typing_ext import JSON, JSONValue, Proc

__all__ = [
    "JSON",
    "ActionKind",
    "ArityMismatch",
    "AssetTooLarge",
    "BusSettings",
    "ClusterExhausted",
    "Component",
    "ConfigError",
    "ConfigSection",
    "Constant",
    "ContainerStartFailure",
    "Default",
    "DuplicateEndpoint",
    "DuplicateKey",
    "EmptyImage",
    "EventKind",
    "ExitCode",
    "ExportFormat",
    "IllegalTransition",
    "ImageNotFound",
    "InstanceNotCompleted",
    "InstanceState",
    "InsufficientResources",
    "Interface",
    "InvalidDescriptor",
    "InvalidInput",
    "InvalidTemplate",
    "IoError",
    "JSONValue",
    "KeyNotFound",
    "Location",
    "LogLevel",
    "MalformedFrame",
    "ManoSettings",
    "MessageKind",
    "Method",
    "Mode",
    "NfKind",
    "NoActiveApp",
    "NoRoute",
    "NrfSettings",
    "Origin",
    "OsmecError",
    "PodState",
    "Proc",
    "ProtocolKind",
    "RequestTimeout",
    "ResourceVector",
    "RouteKind",
    "ServiceClass",
    "Settings",
    "StorageClass",
    "TableNotFound",
    "UnknownEndpoint",
    "UnknownGrant",
    "UnknownId",
    "UnknownInstance",
    "UnknownNamespace",
    "UnknownServiceClass",
    "UnrecognizedProtocol",
    "WorkloadSettings",
    "WrongState",
    "ZeroRequest",
    "canonical_json",
    "config_section",
    "error_class",
    "find_settings_file",
    "join_choices",
    "json_bytes",
    "load_settings",
    "log_level",
    "parse_json",
    "pdebug",
    "perr",
    "pinfo",
    "pwarn",
    "read_json",
    "section_list",
    "setting",
    "stable_hash64",
    "write",
    "writeln",
]
