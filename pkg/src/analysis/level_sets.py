"""
Conjuntos de nivel de ψ_ε: perímetros y extracción de la interfaz.
"""
import numpy as np
from skimage import measure

from src.errors import EmptyLevelSet
from src.solver.grid import Grid


def area_control_level(k: int) -> float:
    """b = 1.5/k, punto medio de la ventana [1/k, 2/k]."""
    return 1.5 / k


def _check_range(psi: np.ndarray, level: float) -> None:
    if not psi.min() < level < psi.max():
        raise EmptyLevelSet(
            f"nivel {level:.6g} fuera del rango [{psi.min():.6g}, {psi.max():.6g}]"
        )


def _crossings_1d(psi: np.ndarray, axis: np.ndarray, level: float) -> np.ndarray:
    shifted = psi - level
    idx = np.nonzero(np.sign(shifted[:-1]) * np.sign(shifted[1:]) < 0)[0]
    exact = np.nonzero(shifted == 0.0)[0]
    a, b = shifted[idx], shifted[idx + 1]
    x = axis[idx] + (axis[idx + 1] - axis[idx]) * a / (a - b)
    return np.sort(np.concatenate([x, axis[exact]]))


def _contours_2d(psi: np.ndarray, grid: Grid, level: float) -> list[np.ndarray]:
    contours = measure.find_contours(psi, level)
    lo = np.asarray(grid.lo)
    return [lo + grid.h * c for c in contours]


def level_set_perimeter(psi: np.ndarray, grid: Grid, level: float) -> float:
    """
    H^{d−1}({ψ = level}): número de cruces (d=1), longitud de las poligonales
    de marching squares (d=2) o área de la malla de marching cubes (d=3).

    Raises:
        EmptyLevelSet: si el nivel no está dentro del rango de ψ
    """
    _check_range(psi, level)
    if grid.dim == 1:
        return float(_crossings_1d(psi, grid.axes[0], level).size)
    if grid.dim == 2:
        contours = _contours_2d(psi, grid, level)
        if not contours:
            raise EmptyLevelSet(f"sin contornos en el nivel {level:.6g}")
        return float(sum(np.linalg.norm(np.diff(c, axis=0), axis=-1).sum() for c in contours))
    verts, faces, _, _ = measure.marching_cubes(psi, level, spacing=(grid.h,) * 3)
    return float(measure.mesh_surface_area(verts, faces))


def extract_interface(
    psi: np.ndarray, grid: Grid, level: float, center: np.ndarray
) -> tuple[np.ndarray, float]:
    """
    Vértices de {ψ = level} en coordenadas físicas y distancia media al centro.

    Para d=1 los vértices son los cruces; con la interfaz plana el radio es
    la deriva |x_frente − x0|.
    """
    _check_range(psi, level)
    if grid.dim == 1:
        points = _crossings_1d(psi, grid.axes[0], level)[:, None]
    elif grid.dim == 2:
        contours = _contours_2d(psi, grid, level)
        if not contours:
            raise EmptyLevelSet(f"sin contornos en el nivel {level:.6g}")
        points = np.concatenate(contours)
    else:
        verts, _, _, _ = measure.marching_cubes(psi, level, spacing=(grid.h,) * 3)
        points = verts + np.asarray(grid.lo)
    if points.size == 0:
        raise EmptyLevelSet(f"sin cruces en el nivel {level:.6g}")
    radius = float(np.mean(np.linalg.norm(points - center, axis=-1)))
    return points, radius
