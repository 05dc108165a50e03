from __future__ import annotations

from typing import ClassVar

from osmec.util._enum import ExitCode

_registry: dict[str, type[OsmecError]] = {}


class OsmecError(Exception):
    """Root of every error raised by osmec.

    `status` is used when the error crosses the bus as a response; `exit_code` when it reaches the CLI.
    """

    exit_code: ClassVar[ExitCode] = ExitCode.RUNTIME
    status: ClassVar[int] = 500

    def __init_subclass__(cls) -> None:
        super().__init_subclass__()
        _registry[cls.__name__] = cls

    @property
    def message(self) -> str:
        return str(self.args[0]) if self.args else type(self).__name__


def error_class(name: str) -> type[OsmecError]:
    return _registry.get(name, OsmecError)


class ConfigError(OsmecError):
    exit_code = ExitCode.CONFIG
    status = 400


class IoError(OsmecError):
    exit_code = ExitCode.IO


# sbi-bus


class MalformedFrame(OsmecError):
    status = 400


class UnknownNamespace(MalformedFrame):
    pass


class DuplicateEndpoint(OsmecError):
    status = 409


class UnknownEndpoint(OsmecError):
    status = 404


class RequestTimeout(OsmecError):
    status = 504


# nf-core


class UnrecognizedProtocol(OsmecError):
    status = 415


class InvalidDescriptor(OsmecError):
    status = 400


class TableNotFound(OsmecError):
    status = 404


class KeyNotFound(OsmecError):
    status = 404


class DuplicateKey(OsmecError):
    status = 409


class ArityMismatch(OsmecError):
    status = 400


class ImageNotFound(OsmecError):
    status = 404


class NoActiveApp(OsmecError):
    status = 503


class NoRoute(OsmecError):
    status = 502


# mano


class UnknownServiceClass(ConfigError):
    status = 404


class InvalidTemplate(ConfigError):
    pass


class ClusterExhausted(OsmecError):
    status = 503


class InsufficientResources(OsmecError):
    status = 503


class ZeroRequest(OsmecError):
    status = 400


class UnknownGrant(OsmecError):
    status = 404


class ContainerStartFailure(OsmecError):
    pass


class IllegalTransition(OsmecError):
    status = 409


class UnknownInstance(OsmecError):
    status = 404


class WrongState(OsmecError):
    status = 409


class UnknownId(OsmecError):
    status = 404


# workloads


class EmptyImage(OsmecError):
    status = 400


class AssetTooLarge(OsmecError):
    status = 413


class InstanceNotCompleted(OsmecError):
    status = 409


class InvalidInput(ConfigError):
    """A service input the APP cannot run with."""
