import json

import numpy as np
import pytest

from src.analysis.diagnostics import DiagnosticsContext
from src.analysis.traces import check_offsets, minimal_pair_deviation
from src.config.run_config import load_config, parse_config, validate_config
from src.errors import ConfigInvalid, InvalidOffset, TraceOffManifoldTube
from src.solver.grid import Field


@pytest.fixture
def setup(circle_config):
    return validate_config(circle_config)


@pytest.fixture
def ctx(setup):
    return DiagnosticsContext(setup.potential, setup.interface, 0.1, trace_samples=16)


def test_initial_traces_form_minimal_pair(ctx, setup):
    field = setup.initial_data.build_initial_field(setup.grid, 0.1)
    stats = minimal_pair_deviation(ctx, field, 0.0, [0.2])
    assert len(stats) == 1
    assert stats[0].deviations.shape == (16,)
    assert stats[0].maximum == pytest.approx(0.0, abs=1e-12)
    assert set(stats[0].as_dict()) == {"median", "p90", "max"}


def test_offsets_outside_window(ctx):
    with pytest.raises(InvalidOffset):
        check_offsets(ctx, 0.0, [0.05])
    with pytest.raises(InvalidOffset):
        check_offsets(ctx, 0.0, [0.25])


def test_offset_must_stay_inside_sphere(setup):
    ctx = DiagnosticsContext(setup.potential, setup.interface, 0.01)
    check_offsets(ctx, 0.0, [0.15])
    with pytest.raises(InvalidOffset):
        check_offsets(ctx, 0.04, [0.15])


def test_traces_far_from_wells(ctx, setup):
    field = Field(setup.grid, np.zeros(setup.grid.shape + (2,)))
    with pytest.raises(TraceOffManifoldTube):
        minimal_pair_deviation(ctx, field, 0.0, [0.2])


def test_antisymmetric_phases_break_minimal_pair(mismatched_path):
    config = load_config(mismatched_path)
    setup = validate_config(config)
    assert setup.maps.allow_mismatch
    eps = config.solver.eps
    ctx = DiagnosticsContext(setup.potential, setup.interface, eps, trace_samples=64)
    field = setup.initial_data.build_initial_field(setup.grid, eps)
    offsets = [k * eps for k in config.diagnostics.offsets_eps]
    stats = minimal_pair_deviation(ctx, field, 0.0, offsets)
    assert stats[0].median >= 0.1 * setup.potential.manifold.gap


def test_antisymmetric_phases_need_flag(mismatched_path):
    raw = json.loads(mismatched_path.read_text(encoding="utf-8"))
    raw["initial_data"]["allow_mismatch"] = False
    with pytest.raises(ConfigInvalid):
        validate_config(parse_config(raw))
