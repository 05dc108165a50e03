# /// script
# requires-python = ">=3.12"
# ///

from __future__ import annotations

import os
from sys import exit as sexit

from colorama import just_fix_windows_console

from osmec.command import run_cli
from osmec.util import ExitCode, LogLevel, perr, pwarn, writeln
from osmec.util._console_io import LOG_LEVEL_ENV


def main() -> None:
    """Osmec main entry point."""

    try:
        just_fix_windows_console()
        if (level := os.environ.get(LOG_LEVEL_ENV)) is not None and level.strip().lower() not in LogLevel:
            pwarn(f"{LOG_LEVEL_ENV}=`{level}` is not a log level; using `info`")
        sexit(run_cli().value)

    except KeyboardInterrupt:
        writeln("\n")
        perr("<cyn>*osmec*</cyn> was interrupted", ExitCode.KB_INT, prefix="<red>*[error::interrupt]*</red> ")


if __name__ == "__main__":
    main()
