"""
Malla tensorial uniforme, campos nodales y datos de Dirichlet.
"""
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from src.errors import ConfigInvalid

MIN_COUNT = 16
SPACING_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Grid:
    """
    Ω = Π [lo_i, hi_i] con counts[i] nodos por eje (extremos incluidos).

    El paso h debe coincidir en todos los ejes.
    """
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.counts)):
            raise ConfigInvalid("grid", "lo, hi y counts deben tener la misma longitud")
        if any(c < MIN_COUNT for c in self.counts):
            raise ConfigInvalid("grid.counts", f"se requieren al menos {MIN_COUNT} nodos por eje")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ConfigInvalid("grid.hi", "hi debe superar a lo en cada eje")
        steps = self.steps
        if max(steps) - min(steps) > SPACING_TOL:
            raise ConfigInvalid("grid.counts", f"pasos distintos por eje: {steps}")

    @property
    def steps(self) -> list[float]:
        return [(h - l) / (c - 1) for l, h, c in zip(self.lo, self.hi, self.counts)]

    @property
    def h(self) -> float:
        return self.steps[0]

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.counts)

    @property
    def node_count(self) -> int:
        return math.prod(self.counts)

    @cached_property
    def axes(self) -> list[np.ndarray]:
        return [np.linspace(l, h, c) for l, h, c in zip(self.lo, self.hi, self.counts)]

    @cached_property
    def points(self) -> np.ndarray:
        """Coordenadas nodales, forma counts + (d,)."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    @cached_property
    def boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for axis in range(self.dim):
            index = [slice(None)] * self.dim
            index[axis] = 0
            mask[tuple(index)] = True
            index[axis] = -1
            mask[tuple(index)] = True
        return mask

    @property
    def interior_mask(self) -> np.ndarray:
        return ~self.boundary_mask

    @cached_property
    def weights(self) -> np.ndarray:
        """Pesos de la regla del trapecio tensorial."""
        w = np.ones(self.shape)
        for axis, count in enumerate(self.counts):
            line = np.full(count, self.h)
            line[0] = line[-1] = self.h / 2
            shape = [1] * self.dim
            shape[axis] = count
            w = w * line.reshape(shape)
        return w

    def integrate(self, values: np.ndarray) -> float:
        """Cuadratura del trapecio con suma compensada (determinista)."""
        return math.fsum((self.weights * values).ravel())

    def gradient(self, values: np.ndarray) -> np.ndarray:
        """
        ∇ por diferencias centradas (laterales de segundo orden en el borde).

        Args:
            values: forma counts + (n,)

        Returns:
            Jacobiano de forma counts + (n, d)
        """
        parts = [
            np.gradient(values, self.h, axis=axis, edge_order=2) for axis in range(self.dim)
        ]
        return np.stack(parts, axis=-1)

    def refine(self) -> "Grid":
        """Malla con paso h/2 sobre el mismo Ω."""
        return Grid(self.lo, self.hi, tuple(2 * c - 1 for c in self.counts))


@dataclass
class Field:
    """u_ε en los nodos: values tiene forma counts + (n,)."""
    grid: Grid
    values: np.ndarray
    t: float = 0.0

    @property
    def target_dim(self) -> int:
        return self.values.shape[-1]

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.t)

    def max_norm(self) -> float:
        return float(np.linalg.norm(self.values, axis=-1).max())


@dataclass
class BoundaryData:
    """g en los nodos de ∂Ω; constante en el tiempo."""
    grid: Grid
    values: np.ndarray  # counts + (n,), solo se leen los nodos de borde
    mask: np.ndarray = field(init=False)

    def __post_init__(self):
        self.mask = self.grid.boundary_mask

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Reimpone g en los nodos de borde (en sitio) y devuelve values."""
        values[self.mask] = self.values[self.mask]
        return values

    def deviation(self, values: np.ndarray) -> float:
        return float(np.abs(values[self.mask] - self.values[self.mask]).max())

    def boundary_only(self) -> np.ndarray:
        """Campo igual a g en ∂Ω y cero en el interior."""
        out = np.zeros_like(self.values)
        out[self.mask] = self.values[self.mask]
        return out
