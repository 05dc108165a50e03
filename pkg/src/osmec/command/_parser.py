from __future__ import annotations

from typing import TYPE_CHECKING

from osmec.__init__ import __version__
from osmec.util import Constant, ExportFormat, ProtocolKind
from osmec.util._arg_parser import (
    ArgParser,
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

if TYPE_CHECKING:
    from argparse import ArgumentParser


def _add_config(parser: ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        type=file_path,
        default=None,
        help=f"Settings file. [default: nearest {Constant.settings_file}]",
        metavar="<PATH>",
    )


def _add_session(parser: ArgumentParser) -> None:
    parser.add_argument(
        "--session",
        type=directory,
        default=directory(Constant.session_dir),
        help="Live-session directory. [default: %(default)s]",
        metavar="<DIR>",
    )


def init_parser() -> ArgParser:
    parser = ArgParser(
        prog="osmec",
        description="Edge computing control plane and deterministic edge-server simulator.",
        version=__version__,
        epilog=True,
    )

    commands = parser.add_subparsers(dest="command", title="Commands")

    #######################################################
    ###                    osmec run                   ####
    #######################################################

    desc_run = "Run a scenario and write its event log and metrics."
    cmd_run = commands.add_parser("run", description=desc_run, help=desc_run)

    cmd_run.add_argument(
        "--scenario",
        required=True,
        help="Scenario file, or the name of a bundled scenario.",
        metavar="<PATH>",
    )
    for long_opt, _type, default, _help, mvar in (
        ("--out", directory, directory("out"), "Output directory. [default: %(default)s]", "<DIR>"),
        ("--seed", seed, None, "Override the scenario seed.", "<N>"),
        ("--repetitions", identifier, None, "Override the scenario repetition count.", "<N>"),
        ("--format", export_format, ExportFormat.CSV, "Metrics format. [default: %(default)s]", "<FORMAT>"),
    ):
        cmd_run.add_argument(long_opt, type=_type, default=default, help=_help, metavar=mvar)
    _add_config(cmd_run)

    #######################################################
    ###                  osmec request                 ####
    #######################################################

    desc_request = "Submit a service request to the live session."
    cmd_request = commands.add_parser("request", description=desc_request, help=desc_request)

    cmd_request.add_argument("service_class", type=service_class, help="Application class of the service.")
    cmd_request.add_argument("service_name", help="Service within the class.")
    for long_opt, _type, default, _help, mvar in (
        ("--input", str, "{}", "Service input as a JSON object. [default: %(default)s]", "<JSON>"),
        ("--mode", mode, None, "Instantiation mode. [default: from settings]", "<MODE>"),
        ("--protocol", protocol, ProtocolKind.HTTP, "Wire protocol of the request. [default: %(default)s]", "<P>"),
        ("--seed", seed, None, "Seed of a new session. [default: 0]", "<N>"),
    ):
        cmd_request.add_argument(long_opt, type=_type, default=default, help=_help, metavar=mvar)
    _add_session(cmd_request)
    _add_config(cmd_request)

    #######################################################
    ###              osmec release-memory              ####
    #######################################################

    desc_release = "Release the memory a completed instance still holds."
    cmd_release = commands.add_parser("release-memory", description=desc_release, help=desc_release)

    cmd_release.add_argument("instance_id", type=identifier, help="Instance id.", metavar="instance-id")
    _add_session(cmd_release)
    _add_config(cmd_release)

    #######################################################
    ###                  osmec inspect                 ####
    #######################################################

    desc_inspect = "Show templates, an instance or a node of the live session."
    cmd_inspect = commands.add_parser("inspect", description=desc_inspect, help=desc_inspect)

    cmd_inspect.add_argument("target", type=inspect_target, help="templates, instance or node.")
    cmd_inspect.add_argument("ident", type=identifier, nargs="?", help="Instance or node id.", metavar="id")
    _add_session(cmd_inspect)
    _add_config(cmd_inspect)

    #######################################################
    ###                  osmec export                  ####
    #######################################################

    desc_export = "Rebuild metrics from an event log and write them out."
    cmd_export = commands.add_parser("export", description=desc_export, help=desc_export)

    for long_opt, _type, default, _help, mvar in (
        ("--log", file_path, None, f"Event log. [default: <<session>>/{Constant.events_log}]", "<PATH>"),
        ("--out", directory, directory("out"), "Output directory. [default: %(default)s]", "<DIR>"),
        ("--format", export_format, ExportFormat.CSV, "Metrics format. [default: %(default)s]", "<FORMAT>"),
    ):
        cmd_export.add_argument(long_opt, type=_type, default=default, help=_help, metavar=mvar)
    _add_session(cmd_export)

    #######################################################
    ###                 osmec validate                 ####
    #######################################################

    desc_validate = "Check a template file."
    cmd_validate = commands.add_parser("validate", description=desc_validate, help=desc_validate)

    cmd_validate.add_argument("template", type=file_path, help="Template file.", metavar="template-path")

    return parser
