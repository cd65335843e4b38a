import json
import math

import pytest

from src.analysis.diagnostics import CSV_COLUMNS
from src.config.run_config import load_config, parse_config
from src.pipeline.export import read_timeseries
from src.pipeline.goldens import make_goldens
from src.pipeline.run import run_simulation
from src.pipeline.studies import run_connect, run_geometry_check, run_init_check, run_profile
from src.solver.snapshot import read_snapshot


def test_front_run_writes_outputs(front_config, tmp_path):
    result = run_simulation(front_config, output_dir=tmp_path, snapshots="final")
    assert result.success, result.error
    assert result.eps == 0.1
    assert result.h == pytest.approx(0.025)

    df = read_timeseries(result.csv_path)
    assert list(df.columns) == CSV_COLUMNS
    assert len(df) == result.records
    assert df["t"].iloc[0] == 0.0

    summary = json.loads(result.summary_path.read_text(encoding="utf-8"))
    for key in ("cF", "dt", "steps", "energy_history", "stress_check", "metrics"):
        assert key in summary
    assert summary["metrics"]["eps"] == 0.1

    snaps = sorted((tmp_path / "snapshots").glob("*.snap"))
    assert [p.name for p in snaps] == [f"step_{summary['steps']:08d}.snap"]
    header, state = read_snapshot(snaps[0])
    assert header["eps"] == 0.1
    assert state.t == pytest.approx(front_config.solver.T_final)


def test_circle_run_snapshots_every_record(circle_config, tmp_path):
    result = run_simulation(circle_config, output_dir=tmp_path, snapshots="every:1")
    assert result.success, result.error
    assert len(list((tmp_path / "snapshots").glob("*.snap"))) == result.records
    assert math.isfinite(result.metrics["radius_err_max"])
    assert "perim_plus_gap_final" in result.metrics


def test_snapshot_interval_counts_records(circle_config, tmp_path):
    result = run_simulation(circle_config, output_dir=tmp_path, snapshots="every:2")
    assert result.success, result.error
    snaps = sorted((tmp_path / "snapshots").glob("*.snap"))
    assert len(snaps) == (result.records + 1) // 2
    assert snaps[0].name == "step_00000000.snap"


def test_run_without_snapshots(front_config, tmp_path):
    result = run_simulation(front_config, output_dir=tmp_path, eps=0.08, snapshots="none")
    assert result.success, result.error
    assert result.eps == 0.08
    assert not (tmp_path / "snapshots").exists()


def test_run_reports_invalid_horizon(circle_raw, tmp_path):
    circle_raw["solver"]["T_final"] = 0.05
    result = run_simulation(parse_config(circle_raw), output_dir=tmp_path)
    assert not result.success
    assert result.error.startswith("ConfigInvalid")
    assert not (tmp_path / "timeseries.csv").exists()


def test_goldens(circle_config, tmp_path):
    result = make_goldens(circle_config, tmp_path)
    assert result.success, result.error
    values = result.values
    assert values["cF"] == pytest.approx(values["cF_trapezoid"], abs=1e-6)
    assert values["cF"] == pytest.approx(values["cF_tilde"], rel=1e-6)
    assert values["dt_imex"] >= values["dt_heun"]
    assert "connection_action" not in values
    payload = json.loads((tmp_path / "goldens.json").read_text(encoding="utf-8"))
    assert payload["generated_with"]["name"] == "circle_test"


def test_profile_study(profile_path, tmp_path):
    result = run_profile(load_config(profile_path, validate=False), tmp_path)
    assert result.success, result.error
    assert result.passed, result.flags
    assert result.values["tail_rate"] > 0


def test_connection_between_non_minimal_points(profile_path, tmp_path):
    raw = json.loads(profile_path.read_text(encoding="utf-8"))
    raw["connection"] = {"p_plus": [2.0, 1.0], "p_minus": [-1.0, 0.0], "nodes": 501}
    result = run_connect(parse_config(raw), tmp_path, workers=1)
    assert result.success, result.error
    assert result.values["minimal_pair"] is False
    assert set(result.flags) == {"exceso_positivo"}
    assert (tmp_path / "connection.csv").exists()
    assert (tmp_path / "connection.json").exists()


def test_init_check(front_config, tmp_path):
    result = run_init_check(front_config, tmp_path, eps_list=[0.1, 0.08])
    assert result.success, result.error
    assert set(result.flags) == {"E_over_eps_acotado", "B_over_eps_acotado"}
    assert (tmp_path / "init_check.csv").exists()


def test_geometry_check(circle_config, tmp_path):
    result = run_geometry_check(circle_config, tmp_path, samples=8)
    assert result.success, result.error
    assert set(result.flags) == {"identidad_a", "identidad_b", "identidad_c", "identidad_d"}
    # 3 tiempos x 3 pasos
    assert len(result.reports) == 9
    assert (tmp_path / "geometry_check.json").exists()
