import pandas as pd
import pytest

from src.analysis.reports import generate_sweep_report
from src.config.run_config import parse_config
from src.errors import ConfigInvalid
from src.pipeline.run import RunResult
from src.pipeline.sweep import build_report, evaluate_acceptance, plan_members, run_sweep


def test_plan_members_sorted_by_eps(front_config):
    members = plan_members(front_config)
    assert [eps for eps, _ in members] == [0.1, 0.08, 0.06]
    assert plan_members(front_config, [0.05, 0.1])[0][0] == 0.1


def test_plan_members_scales_grid(front_raw):
    front_raw["sweep"]["h_over_eps"] = 0.25
    members = plan_members(parse_config(front_raw), [0.1, 0.05])
    assert [grid.counts for _, grid in members] == [(81,), (161,)]


def test_plan_members_errors(front_config, circle_raw):
    with pytest.raises(ConfigInvalid):
        plan_members(front_config, [])
    with pytest.raises(ConfigInvalid):
        plan_members(front_config, [0.1, -0.05])
    circle_raw["sweep"] = {"eps_list": [0.1, 0.05, 0.025], "grid_counts": [[33, 33], [65, 65]]}
    with pytest.raises(ConfigInvalid):
        plan_members(parse_config(circle_raw))


@pytest.fixture
def metrics():
    return pd.DataFrame({
        "eps": [0.1, 0.05, 0.025],
        "E_sup": [0.1, 0.05, 0.025],
        "B0_over_eps": [1.0, 1.5, 2.0],
        "radius_ok": [1.0, 1.0, 1.0],
        "gap_final": [0.3, 0.2, 0.1],
        "energy_increase_rel": [0.0, 1e-12, 0.0],
    })


def test_acceptance_rules(metrics):
    fits = pd.DataFrame({"metrica": ["E_sup"], "pendiente": [1.0], "error_std": [0.0], "puntos": [3]})
    acceptance = {
        "E_sup": {"slope_min": 0.9},
        "B0_over_eps": {"ratio_max": 3.0},
        "radius_ok": {"all_true": True},
        "gap_final": {"decreasing": True, "final_max": 0.15},
        "energy_increase_rel": {"max": 1e-8, "min": 0.0},
    }
    flags = evaluate_acceptance(metrics, fits, acceptance)
    assert flags == {
        "B0_over_eps.ratio_max": True,
        "E_sup.slope_min": True,
        "energy_increase_rel.max": True,
        "energy_increase_rel.min": True,
        "gap_final.decreasing": True,
        "gap_final.final_max": True,
        "radius_ok.all_true": True,
    }


def test_acceptance_failures(metrics):
    flags = evaluate_acceptance(metrics, None, {
        "B0_over_eps": {"ratio_max": 1.5},
        "gap_final": {"final_max": 0.05},
        "E_sup": {"slope_min": 0.9},
        "missing": {"max": 1.0},
    })
    assert flags == {
        "B0_over_eps.ratio_max": False,
        "gap_final.final_max": False,
        "missing.presente": False,
    }


def test_unknown_rule(metrics):
    with pytest.raises(ConfigInvalid):
        evaluate_acceptance(metrics, None, {"E_sup": {"median": 1.0}})


def _runs(eps_list):
    return [
        RunResult(success=True, eps=eps, metrics={"eps": eps, "E_sup": eps**2, "l1_sup": eps})
        for eps in eps_list
    ]


def test_report_fits_slopes_with_three_eps():
    report = build_report("demo", _runs([0.025, 0.1, 0.05]), {"E_sup": {"slope_min": 1.9}})
    assert report.eps_list == [0.1, 0.05, 0.025]
    slopes = dict(zip(report.fits["metrica"], report.fits["pendiente"]))
    assert slopes["E_sup"] == pytest.approx(2.0)
    assert slopes["l1_sup"] == pytest.approx(1.0)
    assert report.passed


def test_report_without_slopes_for_two_eps():
    report = build_report("demo", _runs([0.1, 0.05]), {"E_sup": {"slope_min": 1.9}})
    assert report.fits is None
    assert report.flags == {}
    assert report.as_dict()["fits"] is None


def test_run_sweep_writes_tables(front_config, tmp_path):
    result = run_sweep(front_config, output_dir=tmp_path, workers=1)
    assert result.success, result.error
    assert [run.eps for run in result.runs] == [0.1, 0.08, 0.06]
    for name in ("sweep_metrics.csv", "sweep_rates.csv", "sweep_timeseries.csv",
                 "sweep_report.md", "sweep_report.json"):
        assert (tmp_path / name).exists()
    merged = pd.read_csv(tmp_path / "sweep_timeseries.csv")
    assert merged.columns[0] == "eps"
    assert list(merged["eps"].drop_duplicates()) == [0.1, 0.08, 0.06]
    assert (tmp_path / "eps_0.08" / "timeseries.csv").exists()
    assert "Pendientes log-log" in (tmp_path / "sweep_report.md").read_text(encoding="utf-8")


def test_run_sweep_reports_invalid_plan(front_config, tmp_path):
    result = run_sweep(front_config, eps_list=[-1.0], output_dir=tmp_path, workers=1)
    assert not result.success
    assert result.error.startswith("ConfigInvalid")


def test_report_without_timestamp_is_reproducible(tmp_path):
    report = build_report("demo", _runs([0.1, 0.05, 0.025]), {"E_sup": {"slope_min": 1.9}})
    paths = [
        generate_sweep_report(report.name, report.metrics, report.fits, report.flags,
                              tmp_path / f"report_{k}.md", timestamp=False)
        for k in range(2)
    ]
    first, second = (p.read_bytes() for p in paths)
    assert first == second
    assert "Generado" not in first.decode("utf-8")

    stamped = generate_sweep_report(report.name, report.metrics, report.fits, report.flags,
                                    tmp_path / "stamped.md")
    assert "**Generado:**" in stamped.read_text(encoding="utf-8")
