import math

import numpy as np
import pytest

from src.config.run_config import validate_config
from src.errors import ConfigInvalid, StabilityViolation
from src.solver.gl_solver import (
    GLSolver,
    SolverConfig,
    _interior_laplacian_matrix,
    dt_stability,
    gl_energy,
    laplacian,
)
from src.solver.grid import BoundaryData, Field, Grid


# ---------- malla ----------

@pytest.mark.parametrize(
    "lo, hi, counts",
    [
        ((0.0,), (1.0,), (10,)),
        ((0.0, 0.0), (1.0, 2.0), (17, 17)),
        ((0.0, 0.0), (1.0,), (17, 17)),
        ((1.0,), (0.0,), (17,)),
    ],
)
def test_grid_rejects_invalid_boxes(lo, hi, counts):
    with pytest.raises(ConfigInvalid):
        Grid(lo, hi, counts)


def test_grid_quadrature_and_refinement():
    grid = Grid((-1.0, -1.0), (1.0, 1.0), (33, 33))
    assert grid.h == pytest.approx(1 / 16)
    assert grid.integrate(np.ones(grid.shape)) == pytest.approx(4.0, rel=1e-14)
    assert grid.boundary_mask.sum() == 128
    fine = grid.refine()
    assert fine.counts == (65, 65)
    assert fine.h == pytest.approx(grid.h / 2)

    line = Grid((0.0,), (1.0,), (101,))
    x = line.points[..., 0]
    assert line.integrate(x**2) == pytest.approx(1 / 3, rel=1e-4)


def test_grid_gradient_is_exact_for_quadratics():
    grid = Grid((0.0, 0.0), (1.0, 1.0), (17, 17))
    x, y = grid.points[..., 0], grid.points[..., 1]
    values = np.stack([x**2, x * y], axis=-1)
    jac = grid.gradient(values)
    assert jac.shape == (17, 17, 2, 2)
    np.testing.assert_allclose(jac[..., 0, 0], 2 * x, atol=1e-12)
    np.testing.assert_allclose(jac[..., 1, 1], x, atol=1e-12)


def test_boundary_data_reimposes_values():
    grid = Grid((0.0,), (1.0,), (17,))
    g = np.zeros(grid.shape + (2,))
    g[0] = [1.0, 0.0]
    g[-1] = [-1.0, 0.0]
    boundary = BoundaryData(grid, g)
    values = boundary.apply(np.full(grid.shape + (2,), 0.5))
    assert boundary.deviation(values) == 0.0
    np.testing.assert_allclose(values[1:-1], 0.5)
    only = boundary.boundary_only()
    np.testing.assert_allclose(only[1:-1], 0.0)


# ---------- laplaciano ----------

def _laplacian_error(count):
    grid = Grid((0.0,), (1.0,), (count,))
    x = grid.points[..., 0]
    u = np.sin(np.pi * x)[:, None]
    lap = laplacian(u, grid.h)
    assert lap[0, 0] == 0.0 and lap[-1, 0] == 0.0
    return np.max(np.abs(lap[1:-1, 0] + np.pi**2 * u[1:-1, 0]))


def test_laplacian_is_second_order():
    ratio = _laplacian_error(33) / _laplacian_error(65)
    assert math.log2(ratio) == pytest.approx(2.0, abs=0.05)


def test_interior_matrix_matches_stencil():
    grid = Grid((0.0, 0.0), (1.0, 1.0), (17, 17))
    rng = np.random.default_rng(0)
    values = np.zeros(grid.shape + (1,))
    values[1:-1, 1:-1, 0] = rng.normal(size=(15, 15))
    matrix = _interior_laplacian_matrix(grid)
    expected = laplacian(values, grid.h)[1:-1, 1:-1, 0].ravel()
    np.testing.assert_allclose(matrix @ values[1:-1, 1:-1, 0].ravel(), expected, rtol=1e-12, atol=1e-9)


# ---------- paso de tiempo ----------

def test_dt_stability_formula():
    assert dt_stability(0.01, 0.1, 1, 37.5, 0.25) == pytest.approx(0.25 * 0.01**2 / 2)
    assert dt_stability(0.01, 0.1, 1, 37.5, 0.25, "imex") == pytest.approx(0.25 * 0.01 / 75)
    assert dt_stability(0.1, 0.1, 2, 37.5, 1.0) == pytest.approx(0.01 / 75)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"eps": 0.0},
        {"eps": 0.1, "dt_safety": 1.5},
        {"eps": 0.1, "T_final": -1.0},
        {"eps": 0.1, "record_every": 0},
        {"eps": 0.1, "scheme": "rk4"},
    ],
)
def test_solver_config_validation(kwargs):
    with pytest.raises(ConfigInvalid):
        SolverConfig(**kwargs)


@pytest.fixture
def front_setup(front_config):
    return validate_config(front_config)


@pytest.fixture
def front_solver(front_setup):
    boundary = front_setup.initial_data.boundary_data(front_setup.grid)
    return GLSolver(front_setup.potential, boundary, front_setup.solver)


@pytest.fixture
def front_field(front_setup):
    return front_setup.initial_data.build_initial_field(front_setup.grid, 0.1)


def test_schedule_respects_stability_limit(front_solver):
    steps, dt = front_solver.schedule()
    assert steps >= 3
    assert dt <= front_solver.dt_max * (1 + 1e-12)
    assert steps * dt == pytest.approx(1e-4, rel=1e-12)


def test_wells_are_stationary(front_setup):
    grid = front_setup.grid
    values = np.broadcast_to([-1.0, 0.0], grid.shape + (2,)).copy()
    boundary = BoundaryData(grid, values.copy())
    assert gl_energy(values, grid, front_setup.potential, 0.1) == 0.0
    for scheme in ("heun", "imex"):
        solver = GLSolver(front_setup.potential, boundary, SolverConfig(eps=0.1, scheme=scheme))
        moved = solver.step(Field(grid, values.copy()), solver.dt_max)
        np.testing.assert_allclose(moved.values, values, atol=1e-14)


def test_step_keeps_dirichlet_data(front_solver, front_field):
    stepped = front_solver.step(front_field, front_solver.dt_max)
    assert front_solver.boundary.deviation(stepped.values) == 0.0
    assert stepped.t == pytest.approx(front_solver.dt_max)


def test_oversized_step_is_rejected(front_solver, front_field):
    with pytest.raises(StabilityViolation):
        front_solver.step(front_field, 1.0)


def test_run_dissipates_energy(front_solver, front_field):
    times = []
    trajectory = front_solver.run(front_field, monitor=lambda f: times.append(f.t) or f.t)
    assert trajectory.final.t == pytest.approx(1e-4, rel=1e-12)
    assert trajectory.records == times
    assert times[0] == 0.0 and times[-1] == pytest.approx(1e-4)
    assert len(trajectory.energy_history) == trajectory.steps + 1
    assert trajectory.max_energy_increase <= 1e-10 * trajectory.energy_history[0]
    assert max(trajectory.max_norm_history) <= 1.0 + 1e-9


def test_imex_run_agrees_with_heun(front_setup, front_field):
    boundary = front_setup.initial_data.boundary_data(front_setup.grid)
    results = {}
    for scheme in ("heun", "imex"):
        config = SolverConfig(eps=0.1, scheme=scheme, T_final=1e-4, record_every=10)
        results[scheme] = GLSolver(front_setup.potential, boundary, config).run(front_field).final
    diff = np.abs(results["heun"].values - results["imex"].values).max()
    assert diff <= 1e-3
