from __future__ import annotations

from typing import TYPE_CHECKING, Any

from osmec.command._command import cmd_map
from osmec.command._parser import init_parser
from osmec.command._session import Session, apply_entry, release_entry, request_entry
from osmec.util import ExitCode, OsmecError, perr, writeln

if TYPE_CHECKING:
    from argparse import Namespace
    from collections.abc import Callable


class _CommandTable(dict[str, dict[str, Any]]):
    """Verb name to `{"function": ..., "fail_msg": ...}`; `run` turns the outcome into an exit code."""

    def run(self, args: Namespace, otherwise: Callable[[], None]) -> ExitCode:
        if args.command not in self:
            otherwise()
            return ExitCode.SUCCESS

        try:
            self[args.command]["function"](args)
        except OsmecError as e:
            perr(e.message, prefix=f"<red>*[error::{type(e).__name__}]*</red> ")
            return e.exit_code
        except KeyboardInterrupt:
            if (fail_msg := self[args.command].get("fail_msg", None)) is None:
                raise
            writeln()
            perr(fail_msg, prefix="<red>*[error::interrupt]*</red> ")
            return ExitCode.KB_INT

        return ExitCode.SUCCESS


command = _CommandTable(cmd_map)


def run_cli(argv: list[str] | None = None) -> ExitCode:
    parser = init_parser()
    args = parser.parse_args(argv)
    return command.run(args, parser.print_help)


__all__ = [
    "Session",
    "apply_entry",
    "command",
    "init_parser",
    "release_entry",
    "request_entry",
    "run_cli",
]
