from __future__ import annotations

from typing import TYPE_CHECKING, Any

from osmec.command._session import Session, apply_entry, release_entry, request_entry
from osmec.mano import TemplateRegistry, builtin_templates, load_template
from osmec.nf import BUILTIN_DESCRIPTORS
from osmec.simkit import EventLog, MetricsReport, export_report, find_scenario, run_scenario
from osmec.util import ConfigError, Constant, load_settings, parse_json, pinfo, write, writeln

if TYPE_CHECKING:
    from argparse import Namespace
    from pathlib import Path

    from osmec.simkit import EdgeSystem


def _show(value: Any, *, indent: int = 0) -> None:
    if isinstance(value, dict):
        for key, v in value.items():
            if isinstance(v, dict | list) and v:
                writeln(f"<cyn>{key}</cyn>:", indent=indent)
                _show(v, indent=indent + 2)
            else:
                writeln(f"<cyn>{key}</cyn>: {v}", indent=indent)
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, dict):
                writeln("-", indent=indent)
                _show(item, indent=indent + 2)
            else:
                writeln(f"- {item}", indent=indent)
    else:
        writeln(str(value), indent=indent)


def _wrote(paths: list[Path]) -> None:
    for path in paths:
        write("<grn>*Wrote*</grn> ", indent=4)
        writeln(str(path))


def _open_session(args: Namespace) -> tuple[Session, EdgeSystem]:
    session = Session.open(args.session, seed=getattr(args, "seed", None))
    return session, session.replay(load_settings(args.config))


def _run(args: Namespace) -> None:
    scenario = find_scenario(args.scenario)
    settings = load_settings(args.config)

    log = EventLog()
    report = run_scenario(scenario, settings=settings, seed=args.seed, repetitions=args.repetitions, log=log)
    _wrote([log.write(args.out / Constant.events_log), *export_report(report, args.out, args.format)])

    summary = report.summary()
    for group, mean in summary["instantiation"].items():
        pinfo(f"<mag>{group}</mag> mean instantiation {mean:g}", indent=4)
    for name, mean in summary["compute"].items():
        pinfo(f"<mag>{name}</mag> mean compute {mean:g}", indent=4)


def _request(args: Namespace) -> None:
    data = parse_json(args.input, source="--input")
    if not isinstance(data, dict):
        msg = f"--input: expected a JSON object, but got `{type(data).__name__}`"
        raise ConfigError(msg)

    session, system = _open_session(args)
    entry = request_entry(args.service_class, args.service_name, data, mode=args.mode, protocol=args.protocol)
    result = system.execute(apply_entry(system, entry))
    session.record(entry)
    session.save(system)

    result.raise_for_error()
    writeln(f"<cyn>*inst-{result.instance_id}*</cyn> <grn>{result.state}</grn> (req-{result.request_id})")
    if result.result is not None:
        _show({"result": result.result}, indent=2)


def _release_memory(args: Namespace) -> None:
    session, system = _open_session(args)
    entry = release_entry(args.instance_id)
    try:
        data = system.execute(apply_entry(system, entry))
    finally:
        # rejected releases are journalled too; replay rejects them the same way
        session.record(entry)
        session.save(system)

    writeln(f"<cyn>*inst-{args.instance_id}*</cyn> <grn>{data['state']}</grn>")


def _inspect(args: Namespace) -> None:
    if args.target != "templates" and args.ident is None:
        msg = f"inspect {args.target}: an id is required"
        raise ConfigError(msg)

    _, system = _open_session(args)
    path = "templates" if args.target == "templates" else f"{args.target}s/{args.ident}"
    _show(system.execute(system.inspect(path)))


def _export(args: Namespace) -> None:
    log = EventLog.read(args.log or args.session / Constant.events_log)
    _wrote(export_report(MetricsReport.from_log(log), args.out, args.format))


def _validate(args: Namespace) -> None:
    template = load_template(args.template)

    registry = TemplateRegistry({d.nf_id: d for d in BUILTIN_DESCRIPTORS})
    for other in builtin_templates():
        if other.app_class is not template.app_class:
            registry.register(other)
    registry.register(template)

    write("<grn>*Valid*</grn> ", indent=3)
    writeln(f"`{template.template_id}` ({template.app_class}, {len(template.managed_nfs)} managed NFs)")


cmd_map = {
    "run": {
        "function": _run,
        "fail_msg": "scenario run was interrupted; outputs may be incomplete.",
    },
    "request": {
        "function": _request,
        "fail_msg": "request may not have been recorded in the session.",
    },
    "release-memory": {
        "function": _release_memory,
        "fail_msg": "release may not have been recorded in the session.",
    },
    "inspect": {
        "function": _inspect,
    },
    "export": {
        "function": _export,
    },
    "validate": {
        "function": _validate,
    },
}
