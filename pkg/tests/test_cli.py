import json

import pytest

from src.cli import COMMANDS, build_parser, main


def test_parser_options():
    args = build_parser().parse_args(["run", "--config", "c.json", "--eps", "0.05", "--snapshots", "every:2"])
    assert args.command == "run"
    assert args.eps == 0.05
    assert args.snapshots == "every:2"
    assert not args.strict

    args = build_parser().parse_args(["sweep", "--config", "c.json", "--eps", "0.1", "0.05", "--strict"])
    assert args.eps == [0.1, 0.05]
    assert args.strict
    assert not args.no_timestamp


@pytest.mark.parametrize("command", COMMANDS)
def test_config_is_required(command):
    with pytest.raises(SystemExit):
        build_parser().parse_args([command])


def test_missing_config_exits_with_error(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["run", "--config", str(tmp_path / "nada.json")]) == 1


def test_profile_command(profile_path, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    out = tmp_path / "perfil"
    assert main(["profile", "--config", str(profile_path), "--out", str(out), "--strict"]) == 0
    assert (out / "profile.csv").exists()


def test_run_command(front_raw, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    path = tmp_path / "front.json"
    path.write_text(json.dumps(front_raw), encoding="utf-8")
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "run")]) == 0
    assert (tmp_path / "run" / "timeseries.csv").exists()


def test_run_command_fails_on_invalid_setup(circle_raw, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    circle_raw["solver"]["T_final"] = 0.05
    path = tmp_path / "circle.json"
    path.write_text(json.dumps(circle_raw), encoding="utf-8")
    assert main(["run", "--config", str(path)]) == 1
