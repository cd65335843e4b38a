import math

import numpy as np
import pytest

from src.analysis.level_sets import area_control_level, extract_interface, level_set_perimeter
from src.errors import EmptyLevelSet
from src.geometry.interface import smoothstep5
from src.solver.grid import Grid


@pytest.fixture
def disk():
    grid = Grid((-1.0, -1.0), (1.0, 1.0), (129, 129))
    rho = np.linalg.norm(grid.points, axis=-1)
    return grid, 1.0 - smoothstep5((rho - 0.15) / 0.2)


def test_area_control_level():
    assert area_control_level(6) == pytest.approx(0.25)


def test_circle_perimeter(disk):
    grid, psi = disk
    assert level_set_perimeter(psi, grid, 0.5) == pytest.approx(2 * math.pi * 0.25, rel=1e-2)


def test_extract_circle(disk):
    grid, psi = disk
    points, radius = extract_interface(psi, grid, 0.5, np.zeros(2))
    assert points.shape[1] == 2
    assert radius == pytest.approx(0.25, abs=1e-3)


def test_level_outside_range(disk):
    grid, psi = disk
    with pytest.raises(EmptyLevelSet):
        level_set_perimeter(psi, grid, 2.0)
    with pytest.raises(EmptyLevelSet):
        extract_interface(psi, grid, -0.5, np.zeros(2))


def test_crossings_in_1d():
    grid = Grid((-1.0,), (1.0,), (81,))
    psi = np.cos(np.pi * grid.axes[0])
    assert level_set_perimeter(psi, grid, 0.0) == 2.0
    points, radius = extract_interface(psi, grid, 0.0, np.zeros(1))
    np.testing.assert_allclose(points[:, 0], [-0.5, 0.5], atol=1e-12)
    assert radius == pytest.approx(0.5)


def test_sphere_area_in_3d():
    grid = Grid((-1.0, -1.0, -1.0), (1.0, 1.0, 1.0), (33, 33, 33))
    psi = np.linalg.norm(grid.points, axis=-1)
    assert level_set_perimeter(psi, grid, 0.5) == pytest.approx(math.pi, rel=5e-2)
    _, radius = extract_interface(psi, grid, 0.5, np.zeros(3))
    assert radius == pytest.approx(0.5, rel=1e-2)
