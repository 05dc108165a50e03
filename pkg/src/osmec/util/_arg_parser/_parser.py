from __future__ import annotations

import sys
from argparse import ArgumentParser, HelpFormatter
from sys import exit as sexit
from typing import TYPE_CHECKING, Any, NoReturn, TextIO, override

from osmec.util._console_io import perr, write
from osmec.util._enum import ExitCode

if TYPE_CHECKING:
    from argparse import Action


class _Formatter(HelpFormatter):
    @override
    def start_section(self, heading: str | None) -> None:
        super().start_section(f"<grn>*{(heading or '').capitalize()}*</grn>")

    @override
    def _format_action_invocation(self, action: Action) -> str:
        return f"<cyn>*{super()._format_action_invocation(action)}*</cyn>"

    @override
    def _format_usage(self, usage: str | None, actions: Any, groups: Any, prefix: str | None) -> str:
        return super()._format_usage(usage, actions, groups, "<grn>*Usage:*</grn> ")


class ArgParser(ArgumentParser):
    """`ArgumentParser` whose help, usage and errors go through the colour markup console helpers."""

    @override
    def __init__(self, *args: Any, version: str | None = None, epilog: bool = False, **kwargs: Any) -> None:
        kwargs.setdefault("formatter_class", _Formatter)
        super().__init__(*args, **kwargs)

        if version is not None:
            self.add_argument(
                "-V",
                "--version",
                action="version",
                version=f"{self.prog} v{version}",
                help=f"Show {self.prog} version and exit.",
            )

        if epilog:
            self.epilog = f"Run <cyn>*{self.prog}* <<command>> *--help*</cyn> for information on a specific command."

        self._positionals.title = "arguments"
        self._optionals.title = "options"

    @override
    def _print_message(self, message: str, file: TextIO | None = None) -> None:
        if message:
            write(message, file=file or sys.stderr)

    @override
    def print_help(self, file: TextIO | None = None) -> None:
        self._print_message(self.format_help(), file or sys.stdout)

    @override
    def error(self, message: str, exit_code: ExitCode = ExitCode.CONFIG) -> NoReturn:
        perr(message, end="\n\n")
        self.print_usage(sys.stderr)
        sexit(exit_code.value)
