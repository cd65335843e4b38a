"""
Fixtures compartidas: pozos de referencia, potenciales y configuraciones
pequeñas para correr el pipeline completo en segundos.
"""
import copy
from pathlib import Path

import pytest

from src.config.run_config import parse_config
from src.geometry.interface import InterfaceDescriptor
from src.geometry.target_manifold import ManifoldPair
from src.physics.potential import Potential

ROOT_DIR = Path(__file__).resolve().parent.parent
CONFIGS_DIR = ROOT_DIR / "configs"
GOLDENS_DIR = ROOT_DIR / "goldens"

SPHERES = {
    "kind": "two_spheres",
    "center_plus": [2.0, 0.0],
    "radius_plus": 1.0,
    "center_minus": [-2.0, 0.0],
    "radius_minus": 1.0,
    "tube_radius": 0.4,
}

FRONT_RAW = {
    "version": 1,
    "name": "front_test",
    "manifold": SPHERES,
    "potential": {"c3": 1.0, "ramp": "cubic"},
    "interface": {"kind": "stationary_point", "x0": 0.0},
    "initial_data": {"kind": "constant_minimal_pair"},
    "grid": {"lo": [-1.0], "hi": [1.0], "counts": [81]},
    "solver": {"eps": 0.1, "scheme": "heun", "dt_safety": 0.25, "T_final": 1e-4, "record_every": 4},
    "diagnostics": {"trace_samples": 1},
    "sweep": {"eps_list": [0.1, 0.08, 0.06]},
}

CIRCLE_RAW = {
    "version": 1,
    "name": "circle_test",
    "manifold": SPHERES,
    "potential": {"c3": 1.0, "ramp": "cubic"},
    "interface": {"kind": "shrinking_sphere", "center": [0.0, 0.0], "r0": 0.3, "delta0_geo": 0.1},
    "initial_data": {"kind": "constant_minimal_pair", "delta": 0.025},
    "grid": {"lo": [-1.0, -1.0], "hi": [1.0, 1.0], "counts": [33, 33]},
    "solver": {"eps": 0.1, "scheme": "heun", "dt_safety": 0.25, "T_final": 2e-4, "record_every": 3},
    "diagnostics": {"trace_samples": 16},
}


@pytest.fixture
def spheres() -> ManifoldPair:
    """Círculos de radio 1 centrados en (±2, 0): dist_m = 2."""
    return ManifoldPair.two_spheres([2.0, 0.0], 1.0, [-2.0, 0.0], 1.0)


@pytest.fixture
def capsules() -> ManifoldPair:
    """Cápsulas sobre x = ±3, y ∈ [−1, 1], radio 0.5: dist_m = 5."""
    return ManifoldPair.two_capsules([[3.0, -1.0], [3.0, 1.0]], 0.5, [[-3.0, -1.0], [-3.0, 1.0]], 0.5)


@pytest.fixture
def potential(spheres) -> Potential:
    """c3 = 1, δ₀ = 0.5 sobre los círculos."""
    return Potential(spheres, c3=1.0, ramp="cubic", delta0=0.5)


@pytest.fixture
def tube_potential() -> Potential:
    """Mismo par con δ₀ = radio de tubo 0.4 (el de las configuraciones)."""
    manifold = ManifoldPair.two_spheres([2.0, 0.0], 1.0, [-2.0, 0.0], 1.0, tube_radius=0.4)
    return Potential(manifold)


@pytest.fixture
def circle() -> InterfaceDescriptor:
    return InterfaceDescriptor.shrinking_sphere([0.0, 0.0], 0.3, 0.1)


@pytest.fixture
def front_raw() -> dict:
    return copy.deepcopy(FRONT_RAW)


@pytest.fixture
def circle_raw() -> dict:
    return copy.deepcopy(CIRCLE_RAW)


@pytest.fixture
def front_config(front_raw):
    return parse_config(front_raw)


@pytest.fixture
def circle_config(circle_raw):
    return parse_config(circle_raw)


@pytest.fixture
def profile_path() -> Path:
    return CONFIGS_DIR / "profile.json"


@pytest.fixture
def mismatched_path() -> Path:
    return CONFIGS_DIR / "mismatched_2d.json"


@pytest.fixture
def goldens_dir() -> Path:
    return GOLDENS_DIR
