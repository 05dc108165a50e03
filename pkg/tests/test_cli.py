from __future__ import annotations

import json
from importlib import resources
from typing import TYPE_CHECKING, Any

import pytest
import toml

from osmec.command import Session, run_cli
from osmec.simkit import EventLog
from osmec.util import EventKind, ExitCode, load_settings

if TYPE_CHECKING:
    from pathlib import Path


@pytest.fixture(autouse=True)
def _workdir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def config(tmp_path: Path) -> Path:
    path = tmp_path / "quiet.toml"
    path.write_text("[workloads]\njitter = 0.0\n", encoding="utf-8")
    return path


def _template(app_class: str) -> dict[str, Any]:
    return json.loads((resources.files("osmec.data") / "templates" / f"{app_class}.json").read_text(encoding="utf-8"))


def _session_log(session: Path) -> EventLog:
    return EventLog.read(session / "events.log")


# run / export


def test_run_bundled_scenario(tmp_path: Path) -> None:
    out = tmp_path / "out"

    assert run_cli(["run", "--scenario", "use_cases", "--out", str(out)]) is ExitCode.SUCCESS
    assert sorted(p.name for p in out.iterdir()) == [
        "compute.csv",
        "compute_hist.csv",
        "events.log",
        "instantiation.csv",
        "instantiation_hist.csv",
        "usage.csv",
        "video.csv",
    ]
    assert len(EventLog.read(out / "events.log").of_kind(EventKind.INSTANCE_RELEASED)) == 4


def test_run_writes_samples_and_histogram(tmp_path: Path) -> None:
    out = tmp_path / "out"

    assert run_cli(["run", "--scenario", "fig7_1", "--repetitions", "1", "--out", str(out)]) is ExitCode.SUCCESS
    samples = (out / "instantiation.csv").read_text(encoding="utf-8").splitlines()
    hist = (out / "instantiation_hist.csv").read_text(encoding="utf-8").splitlines()

    assert len(samples) == 1 + 2 * 4
    assert hist[0] == "group,bin_lo,bin_hi,count"
    assert sum(int(row.rsplit(",", 1)[1]) for row in hist[1:]) == len(samples) - 1
    assert {row.split(",", 1)[0] for row in hist[1:]} == {
        f"{t}:{m}" for t in ("computation-intensive", "high-throughput") for m in ("parallel", "sequential")
    }


def test_run_histograms(tmp_path: Path) -> None:
    out = tmp_path / "hist"
    argv = ["run", "--scenario", "fig7_1", "--repetitions", "1", "--format", "histogram-csv", "--out", str(out)]

    assert run_cli(argv) is ExitCode.SUCCESS
    assert (out / "instantiation_hist.csv").is_file()
    assert (out / "compute_hist.csv").is_file()


def test_run_bad_scenarios(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    assert run_cli(["run", "--scenario", str(tmp_path / "missing.json")]) is ExitCode.IO

    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    assert run_cli(["run", "--scenario", str(bad)]) is ExitCode.CONFIG
    assert "ConfigError" in capsys.readouterr().err


def test_no_command_prints_help(capsys: pytest.CaptureFixture[str]) -> None:
    assert run_cli([]) is ExitCode.SUCCESS
    assert "release-memory" in capsys.readouterr().out


# live session


def test_request_and_release(tmp_path: Path, config: Path, capsys: pytest.CaptureFixture[str]) -> None:
    session = tmp_path / "s"
    common = ["--session", str(session), "--config", str(config)]

    code = run_cli(["request", "intensive_computation", "prime_sum", "--input", '{"n": 10}', *common])
    out = capsys.readouterr().out
    assert code is ExitCode.SUCCESS
    assert "inst-1" in out
    assert "MemoryHeld" in out
    assert "17" in out

    assert run_cli(["release-memory", "1", *common]) is ExitCode.SUCCESS
    assert "Released" in capsys.readouterr().out
    assert run_cli(["release-memory", "1", *common]) is ExitCode.SUCCESS
    assert run_cli(["release-memory", "7", *common]) is ExitCode.RUNTIME

    journal = toml.loads((session / "session.toml").read_text(encoding="utf-8"))
    assert [c["verb"] for c in journal["commands"]] == ["request", "release-memory", "release-memory", "release-memory"]

    log = _session_log(session)
    assert len(log.of_kind(EventKind.INSTANCE_RELEASED)) == 1
    assert {r.get("origin") for r in log.of_kind(EventKind.COMMAND_ISSUED)} == {"cli"}


def test_legacy_request_is_converted(tmp_path: Path, config: Path) -> None:
    session = tmp_path / "s"
    argv = [
        "request",
        "intensive_computation",
        "face_recognition",
        "--input",
        '{"blob_id": "visitor-0042.jpg", "size_mb": 2}',
        "--protocol",
        "legacy",
        "--session",
        str(session),
        "--config",
        str(config),
    ]

    assert run_cli(argv) is ExitCode.SUCCESS
    assert [r.get("request_id") for r in _session_log(session).of_kind(EventKind.CONVERTED)] == [1]


def test_request_errors(tmp_path: Path, config: Path) -> None:
    common = ["--session", str(tmp_path / "s"), "--config", str(config)]

    assert run_cli(["request", "gaming", "chess", *common]) is ExitCode.CONFIG
    assert run_cli(["request", "intensive_computation", "sum", "--input", "[1, 2]", *common]) is ExitCode.CONFIG
    assert run_cli(["request", "intensive_computation", "sum", "--seed", "3", *common]) is ExitCode.CONFIG


def test_invalid_input_is_an_exit_code(tmp_path: Path, config: Path, capsys: pytest.CaptureFixture[str]) -> None:
    session = tmp_path / "s"
    common = ["--session", str(session), "--config", str(config)]

    assert run_cli(["request", "intensive_computation", "sum", "--input", '{"n": -1}', *common]) is ExitCode.CONFIG
    assert "InvalidInput" in capsys.readouterr().err

    opened = Session.open(session)
    assert [c["verb"] for c in opened.commands] == ["request"]
    system = opened.replay(load_settings(config))
    assert system.cluster.nodes[1].free == system.cluster.nodes[1].capacity
    assert [r.get("reason") for r in system.log.of_kind(EventKind.INSTANCE_FAILED)] == ["InvalidInput"]


def test_session_replay_is_stable(tmp_path: Path, config: Path) -> None:
    session = tmp_path / "s"
    common = ["--session", str(session), "--config", str(config)]
    run_cli(["request", "intensive_computation", "sum", "--input", '{"n": 5}', "--seed", "4", *common])
    run_cli(["request", "high_throughput", "video", "--input", '{"video_id": "concert"}', *common])
    first = _session_log(session).text()

    assert run_cli(["inspect", "templates", *common]) is ExitCode.SUCCESS
    assert _session_log(session).text() == first

    opened = Session.open(session)
    assert opened.seed == 4
    replayed = opened.replay(load_settings(config))
    assert replayed.log.text() == first


def test_inspect(tmp_path: Path, config: Path, capsys: pytest.CaptureFixture[str]) -> None:
    common = ["--session", str(tmp_path / "s"), "--config", str(config)]

    assert run_cli(["inspect", "templates", *common]) is ExitCode.SUCCESS
    out = capsys.readouterr().out
    assert "computation-intensive" in out
    assert "high-throughput" in out

    assert run_cli(["inspect", "node", "1", *common]) is ExitCode.SUCCESS
    assert "capacity" in capsys.readouterr().out
    assert run_cli(["inspect", "instance", "42", *common]) is ExitCode.RUNTIME
    assert run_cli(["inspect", "node", *common]) is ExitCode.CONFIG


def test_export_from_session(tmp_path: Path, config: Path) -> None:
    session = tmp_path / "s"
    run_cli(["request", "intensive_computation", "sum", "--session", str(session), "--config", str(config)])

    out = tmp_path / "metrics"
    assert run_cli(["export", "--session", str(session), "--out", str(out)]) is ExitCode.SUCCESS
    assert len((out / "instantiation.csv").read_text(encoding="utf-8").splitlines()) == 2
    assert run_cli(["export", "--log", str(tmp_path / "none.log")]) is ExitCode.IO


# validate


def test_validate(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    good = tmp_path / "good.json"
    good.write_text(json.dumps(_template("intensive_computation")), encoding="utf-8")
    assert run_cli(["validate", str(good)]) is ExitCode.SUCCESS
    assert "Valid" in capsys.readouterr().out

    data = _template("intensive_computation")
    data["managed_nfs"].remove("srf")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    assert run_cli(["validate", str(bad)]) is ExitCode.CONFIG
    assert "shared set" in capsys.readouterr().err


# CLI and scenario paths


def _without_origin(log: EventLog) -> list[tuple[Any, ...]]:
    return [
        (r.seq, r.t, r.kind, r.subject, {k: v for k, v in r.payload.items() if k != "origin"}) for r in log.records
    ]


def test_cli_and_scenario_logs_match(tmp_path: Path, config: Path) -> None:
    scenario = tmp_path / "single.json"
    scenario.write_text(
        json.dumps(
            {
                "name": "single",
                "requests": [
                    {"service_class": "intensive_computation", "service_name": "prime_sum", "input": {"n": 10}},
                ],
            },
        ),
        encoding="utf-8",
    )
    out, session = tmp_path / "out", tmp_path / "s"

    assert run_cli(["run", "--scenario", str(scenario), "--out", str(out), "--config", str(config)]) is ExitCode.SUCCESS
    argv = ["request", "intensive_computation", "prime_sum", "--input", '{"n": 10}', "--session", str(session)]
    assert run_cli([*argv, "--config", str(config)]) is ExitCode.SUCCESS

    from_scenario = EventLog.read(out / "events.log")
    from_cli = _session_log(session)
    assert _without_origin(from_scenario) == _without_origin(from_cli)
    assert from_scenario.text() != from_cli.text()
