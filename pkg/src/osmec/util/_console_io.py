from __future__ import annotations

import os
import re
import sys
from sys import exit as sexit
from typing import TYPE_CHECKING, Any, TextIO

from colorama import Fore, Style

from osmec.util._enum import LogLevel

if TYPE_CHECKING:
    from collections.abc import Iterable

    from osmec.util._enum import ExitCode

_COLORS = {
    "blk": Fore.BLACK,
    "red": Fore.RED,
    "grn": Fore.GREEN,
    "ylw": Fore.YELLOW,
    "blu": Fore.BLUE,
    "mag": Fore.MAGENTA,
    "cyn": Fore.CYAN,
    "wht": Fore.WHITE,
}

_BOLD = re.compile(r"\*([^*]*)\*")
_DIM = re.compile(r"\$([^$]*)\$")
_OPEN_TAG = re.compile(r"<(" + "|".join(_COLORS) + r")>")
_CLOSE_TAG = re.compile(r"</(" + "|".join(_COLORS) + r")>")

LOG_LEVEL_ENV = "OSMEC_LOG_LEVEL"


def _parse_style(txt: str) -> str:
    """Render `<color>..</color>`, `*bold*` and `$dim$` markup; `<<` / `>>` escape angle brackets."""

    txt = txt.replace("<<", "\0lt\0").replace(">>", "\0gt\0")
    txt = _BOLD.sub(lambda m: f"{Style.BRIGHT}{m[1]}{Style.NORMAL}", txt)
    txt = _DIM.sub(lambda m: f"{Style.DIM}{m[1]}{Style.NORMAL}", txt)
    txt = _OPEN_TAG.sub(lambda m: _COLORS[m[1]], txt)
    txt = _CLOSE_TAG.sub(Fore.RESET, txt)
    return txt.replace("\0lt\0", "<").replace("\0gt\0", ">")


def log_level() -> LogLevel:
    raw = os.environ.get(LOG_LEVEL_ENV, LogLevel.INFO).strip().lower()
    return LogLevel(raw) if raw in LogLevel else LogLevel.INFO


def _enabled(level: LogLevel) -> bool:
    return log_level().rank >= level.rank


def join_choices(choices: Iterable[Any], *, fmt_spec: str | None = None) -> str:
    if fmt_spec is None:
        fmt_spec = ""
    joined = ", ".join(f"<ylw>{val:{fmt_spec}}</ylw>" for val in choices)
    return f"({joined})"


def write(txt: str = "", file: TextIO | None = None, end: str = "", *, flush: bool = True, indent: int = 0) -> None:
    if not txt:
        return
    print(f"{' ' * indent}{_parse_style(txt)}", file=file or sys.stdout, end=end, flush=flush)


def writeln(txt: str = "", file: TextIO | None = None, end: str = "\n", *, indent: int = 0) -> None:
    if not txt:
        print(file=file or sys.stdout)
        return
    print(f"{' ' * indent}{_parse_style(txt)}", file=file or sys.stdout, end=end)


def perr(
    msg: str,
    exit_code: ExitCode | None = None,
    *,
    prefix: str = "<red>*[error]*</red> ",
    end: str = "\n",
) -> None:
    writeln(f"{prefix}{msg}", file=sys.stderr, end=end)

    if exit_code is not None:
        sexit(exit_code.value)


def pwarn(msg: str, *, prefix: str = "<ylw>*[warning]*</ylw> ", end: str = "\n") -> None:
    if _enabled(LogLevel.INFO):
        writeln(f"{prefix}{msg}", file=sys.stderr, end=end)


def pinfo(msg: str, *, indent: int = 0) -> None:
    if _enabled(LogLevel.INFO):
        writeln(msg, indent=indent)


def pdebug(msg: str, *, prefix: str = "<blu>$[debug]$</blu> ") -> None:
    if _enabled(LogLevel.DEBUG):
        writeln(f"{prefix}{msg}", file=sys.stderr)
