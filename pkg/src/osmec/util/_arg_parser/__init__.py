from osmec.util._arg_parser._parser import ArgParser
from osmec.util._arg_parser._types import (
    INSPECT_TARGETS,
    directory,
    export_format,
    file_path,
    identifier,
    inspect_target,
    mode,
    protocol,
    seed,
    service_class,
)

__all__ = [
    "INSPECT_TARGETS",
    "ArgParser",
    "directory",
    "export_format",
    "file_path",
    "identifier",
    "inspect_target",
    "mode",
    "protocol",
    "seed",
    "service_class",
]
