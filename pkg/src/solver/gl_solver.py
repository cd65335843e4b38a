"""
Integración temporal de ∂_t u = Δu − ε⁻²∂F(u) con datos de Dirichlet.

La energía discreta usa diferencias por arista, de modo que el laplaciano de
(2d+1) puntos es exactamente su gradiente en los nodos interiores.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from src.errors import ConfigInvalid, MaxPrincipleViolation, StabilityViolation
from src.geometry.interface import InterfaceDescriptor
from src.physics.potential import Potential
from src.solver.grid import BoundaryData, Field, Grid

logger = logging.getLogger(__name__)

Scheme = Literal["heun", "imex"]

GROWTH_LIMIT = 1.10
MAX_PRINCIPLE_SLACK = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    eps: float
    scheme: Scheme = "heun"
    dt_safety: float = 0.25
    T_final: float = 0.0
    record_every: int = 100

    def __post_init__(self):
        if self.eps <= 0:
            raise ConfigInvalid("solver.eps", f"ε debe ser positivo, recibido {self.eps}")
        if not 0 < self.dt_safety <= 1:
            raise ConfigInvalid("solver.dt_safety", "debe estar en (0, 1]")
        if self.T_final < 0:
            raise ConfigInvalid("solver.T_final", "debe ser ≥ 0")
        if self.record_every < 1:
            raise ConfigInvalid("solver.record_every", "debe ser ≥ 1")
        if self.scheme not in ("heun", "imex"):
            raise ConfigInvalid("solver.scheme", f"esquema desconocido: {self.scheme}")


@dataclass
class RunTrajectory:
    """Registros de diagnóstico más historias por paso."""
    records: list = field(default_factory=list)
    final: Field | None = None
    dt: float = 0.0
    steps: int = 0
    energy_history: list[float] = field(default_factory=list)
    max_norm_history: list[float] = field(default_factory=list)
    max_energy_increase: float = 0.0


def laplacian(values: np.ndarray, h: float) -> np.ndarray:
    """
    Laplaciano de (2d+1) puntos por componente; cero en los nodos de borde.

    Args:
        values: forma counts + (n,)
    """
    dim = values.ndim - 1
    out = np.zeros_like(values)
    interior = tuple(slice(1, -1) for _ in range(dim))
    center = values[interior]
    acc = np.zeros_like(center)
    for axis in range(dim):
        plus = list(interior)
        minus = list(interior)
        plus[axis] = slice(2, None)
        minus[axis] = slice(None, -2)
        acc += values[tuple(plus)] + values[tuple(minus)] - 2.0 * center
    out[interior] = acc / h**2
    return out


def dt_stability(h: float, eps: float, dim: int, hessian_bound: float, safety: float,
                 scheme: Scheme = "heun") -> float:
    """dt = safety·min(h²/(2d), ε²/(2Λ)); IMEX omite el límite difusivo."""
    reaction = eps**2 / (2.0 * hessian_bound)
    if scheme == "imex":
        return safety * reaction
    return safety * min(h**2 / (2.0 * dim), reaction)


def gl_energy(values: np.ndarray, grid: Grid, potential: Potential, eps: float) -> float:
    """A_ε = Σ_aristas h^d·(ε/2)|Δu/h|² + Σ_nodos w·F(u)/ε, con suma compensada."""
    h = grid.h
    parts = []
    for axis in range(grid.dim):
        diff = np.diff(values, axis=axis) / h
        parts.append((eps / 2) * h**grid.dim * np.sum(diff * diff, axis=-1).ravel())
    parts.append((grid.weights * potential.F_eval(values) / eps).ravel())
    return math.fsum(np.concatenate(parts))


def _interior_laplacian_matrix(grid: Grid) -> sparse.csc_matrix:
    """Suma de Kronecker de los operadores 1-D sobre los nodos interiores."""
    sizes = [c - 2 for c in grid.counts]
    ones = [sparse.identity(m, format="csr") for m in sizes]
    total = None
    for axis, m in enumerate(sizes):
        second = sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(m, m), format="csr")
        term = None
        for k in range(grid.dim):
            factor = second if k == axis else ones[k]
            term = factor if term is None else sparse.kron(term, factor, format="csr")
        total = term if total is None else total + term
    return (total / grid.h**2).tocsc()


class GLSolver:
    """
    Paso y bucle de integración del sistema de Ginzburg–Landau.

    Args:
        potential: Potencial F
        boundary: Datos de Dirichlet g
        config: Parámetros de integración
    """

    def __init__(self, potential: Potential, boundary: BoundaryData, config: SolverConfig):
        self.potential = potential
        self.boundary = boundary
        self.config = config
        self.grid = boundary.grid
        self.hessian_bound = potential.hessian_bound()
        self.dt_max = dt_stability(
            self.grid.h, config.eps, self.grid.dim, self.hessian_bound,
            config.dt_safety, config.scheme,
        )
        if not self.dt_max > 0:
            raise ConfigInvalid("solver.dt_safety", "dt de estabilidad no positivo")
        self._factor_dt = None
        self._factor = None

    @property
    def eps(self) -> float:
        return self.config.eps

    def reaction(self, values: np.ndarray) -> np.ndarray:
        return -self.potential.grad_F(values) / self.eps**2

    def rhs(self, values: np.ndarray) -> np.ndarray:
        return laplacian(values, self.grid.h) + self.reaction(values)

    def energy(self, values: np.ndarray) -> float:
        return gl_energy(values, self.grid, self.potential, self.eps)

    # ---------- pasos ----------

    def _heun(self, values: np.ndarray, dt: float) -> np.ndarray:
        k1 = self.rhs(values)
        stage = self.boundary.apply(values + dt * k1)
        k2 = self.rhs(stage)
        return values + 0.5 * dt * (k1 + k2)

    def _imex(self, values: np.ndarray, dt: float) -> np.ndarray:
        grid = self.grid
        if self._factor_dt != dt:
            size = math.prod(c - 2 for c in grid.counts)
            system = sparse.identity(size, format="csc") - dt * _interior_laplacian_matrix(grid)
            self._factor = splu(system.tocsc())
            self._factor_dt = dt
        interior = tuple(slice(1, -1) for _ in range(grid.dim))
        n = values.shape[-1]
        coupling = laplacian(self.boundary.boundary_only(), grid.h)[interior]
        rhs = values[interior] + dt * (self.reaction(values)[interior] + coupling)
        solved = self._factor.solve(np.ascontiguousarray(rhs.reshape(-1, n)))
        out = values.copy()
        out[interior] = solved.reshape(rhs.shape)
        return out

    def step(self, field: Field, dt: float) -> Field:
        """
        Un paso de tamaño dt; reimpone g en ∂Ω.

        Raises:
            StabilityViolation: si sup|u| crece más de un 10% en el paso
        """
        if self.config.scheme == "heun":
            values = self._heun(field.values, dt)
        else:
            values = self._imex(field.values, dt)
        self.boundary.apply(values)
        before, after = field.max_norm(), float(np.linalg.norm(values, axis=-1).max())
        if after > GROWTH_LIMIT * before:
            raise StabilityViolation(
                f"sup|u| pasó de {before:.6g} a {after:.6g} en t={field.t + dt:.6g}"
            )
        return Field(field.grid, values, field.t + dt)

    # ---------- bucle ----------

    def schedule(self) -> tuple[int, float]:
        """(pasos, dt) con dt = T_final/⌈T_final/dt_max⌉; (0, 0) si T_final = 0."""
        T = self.config.T_final
        steps = math.ceil(T / self.dt_max) if T > 0 else 0
        return steps, (T / steps if steps else 0.0)

    def run(
        self,
        initial: Field,
        monitor: Callable[[Field], object] | None = None,
        interface: InterfaceDescriptor | None = None,
        on_record: Callable[[Field, int], None] | None = None,
    ) -> RunTrajectory:
        """
        Integra hasta T_final con dt = T_final/⌈T_final/dt_max⌉.

        monitor se invoca en t=0, cada record_every pasos y al final; su
        resultado se agrega a records. on_record recibe (campo, paso) en los
        mismos instantes (p. ej. para escribir snapshots).

        Raises:
            ExtinctionReached: si la interfaz no sobrevive hasta T_final
            StabilityViolation, MaxPrincipleViolation
        """
        config = self.config
        if interface is not None:
            interface.check_horizon(config.T_final)

        steps, dt = self.schedule()
        bound = initial.max_norm() + self.potential.params.delta0 + MAX_PRINCIPLE_SLACK

        logger.info(
            f"Integrando {config.scheme}: ε={config.eps}, h={self.grid.h:.4g}, "
            f"dt={dt:.4g}, pasos={steps}, T={config.T_final}"
        )
        trajectory = RunTrajectory(dt=dt, steps=steps)
        current = initial.copy()
        self.boundary.apply(current.values)
        energy = self.energy(current.values)
        trajectory.energy_history.append(energy)
        trajectory.max_norm_history.append(current.max_norm())

        def record(state: Field, index: int):
            if monitor is not None:
                trajectory.records.append(monitor(state))
            if on_record is not None:
                on_record(state, index)

        record(current, 0)
        for k in range(1, steps + 1):
            current = self.step(current, dt)
            # evita la deriva acumulada de t
            current.t = k * dt
            new_energy = self.energy(current.values)
            trajectory.max_energy_increase = max(
                trajectory.max_energy_increase, new_energy - energy
            )
            energy = new_energy
            norm = current.max_norm()
            trajectory.energy_history.append(energy)
            trajectory.max_norm_history.append(norm)
            if norm > bound:
                raise MaxPrincipleViolation(
                    f"sup|u|={norm:.6g} supera la cota {bound:.6g} en t={current.t:.6g}"
                )
            if k % config.record_every == 0 or k == steps:
                record(current, k)
                logger.info(f"  t={current.t:.5g}  A_ε={energy:.8g}  sup|u|={norm:.6g}")

        trajectory.final = current
        increase = trajectory.max_energy_increase / max(trajectory.energy_history[0], 1e-300)
        logger.info(f"Integración terminada: máximo aumento relativo de A_ε = {increase:.3e}")
        return trajectory
