"""
Los goldens versionados en goldens/<nombre>/ se recalculan desde su
configuración y se comparan con los valores guardados.
"""
import json

import pytest

from src.config.run_config import load_config, parse_config, validate_config
from src.physics.profile_1d import compute_cF, compute_cF_tilde
from src.pipeline.goldens import make_goldens
from src.solver.gl_solver import dt_stability

GOLDEN_NAMES = ["circle_2d", "capsules_connect"]
REL_TOL = 1e-9


def _committed(goldens_dir, name):
    directory = goldens_dir / name
    payload = json.loads((directory / "goldens.json").read_text(encoding="utf-8"))
    return directory / "config.json", payload


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_golden_config_matches_committed(goldens_dir, name):
    config_path, payload = _committed(goldens_dir, name)
    assert payload["name"] == name
    assert payload["generated_with"] == json.loads(config_path.read_text(encoding="utf-8"))


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_closed_form_goldens(goldens_dir, name):
    config_path, payload = _committed(goldens_dir, name)
    values = payload["values"]
    config = load_config(config_path)
    setup = validate_config(config)
    potential = setup.potential

    assert potential.manifold.gap == pytest.approx(values["gap"], rel=REL_TOL)
    assert potential.params.delta0 == pytest.approx(values["delta0"], rel=REL_TOL)
    assert compute_cF(potential.ramp, potential.manifold.gap) == pytest.approx(values["cF"], rel=REL_TOL)
    assert compute_cF_tilde(potential.ramp, potential.manifold.gap) == pytest.approx(
        values["cF_tilde"], rel=REL_TOL
    )
    bound = potential.hessian_bound()
    assert bound == pytest.approx(values["hessian_bound"], rel=REL_TOL)
    for scheme in ("heun", "imex"):
        dt = dt_stability(setup.grid.h, config.solver.eps, setup.grid.dim, bound,
                          config.solver.dt_safety, scheme)
        assert dt == pytest.approx(values[f"dt_{scheme}"], rel=REL_TOL)


def test_default_grid_golden_through_make_goldens(goldens_dir, tmp_path):
    config_path, payload = _committed(goldens_dir, "circle_2d")
    config = load_config(config_path)
    assert config.grid.counts == (257, 257)
    assert config.solver.eps == 0.04

    result = make_goldens(config, tmp_path)
    assert result.success, result.error
    for key, expected in payload["values"].items():
        assert result.values[key] == pytest.approx(expected, rel=REL_TOL), key
    written = json.loads((tmp_path / "goldens.json").read_text(encoding="utf-8"))
    assert written["generated_with"] == payload["generated_with"]


def test_connection_excess_over_minimal(goldens_dir, tmp_path):
    config_path, payload = _committed(goldens_dir, "capsules_connect")
    raw = json.loads(config_path.read_text(encoding="utf-8"))
    # el exceso Δy²/(4·s_half) no depende del número de nodos
    raw["connection"]["nodes"] = 401
    result = make_goldens(parse_config(raw, name="capsules_connect"), tmp_path)
    assert result.success, result.error

    values = result.values
    assert values["connection_minimal_pair"] is payload["values"]["connection_minimal_pair"]
    assert values["connection_excess_over_minimal"] == pytest.approx(
        payload["values"]["connection_excess_over_minimal"], abs=1e-8
    )
    assert values["connection_action"] > values["connection_reference_action"]
