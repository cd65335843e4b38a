"""
Magnitudes de diagnóstico sobre un campo discreto y la interfaz analítica:
energías, errores de volumen, coercividad, disipación y tensor de tensiones.

∇ψ se obtiene por regla de la cadena discreta, ∇ψ = (∇u)ᵀ∂d_F(u), con ∇u por
diferencias centradas.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from src.analysis.level_sets import area_control_level, extract_interface, level_set_perimeter
from src.analysis.traces import minimal_pair_deviation
from src.errors import BoundaryNode, DataCorrupt, EmptyLevelSet, InvalidOffset, TraceOffManifoldTube
from src.geometry.interface import InterfaceDescriptor
from src.physics.potential import Potential
from src.solver.gl_solver import laplacian
from src.solver.grid import Field

logger = logging.getLogger(__name__)

GRAD_THRESHOLD = 1e-10
NEG_TOL = 1e-10

CSV_COLUMNS = [
    "t", "A_eps", "E_eps", "B_eps", "g_eps", "h_eps", "l1_front_error",
    "coer1", "coer2", "coer3", "coer4", "coer5",
    "max_norm", "radius_est", "perim_plus", "perim_minus", "mp_median", "mp_p90",
    "diss1", "diss2", "diss3",
]


@dataclass
class DiagnosticsRecord:
    t: float
    A_eps: float
    E_eps: float
    B_eps: float
    g_eps: float
    h_eps: float
    l1_front_error: float
    coercivity: tuple[float, float, float, float, float]
    max_norm: float
    radius_est: float
    perim_plus: float
    perim_minus: float
    mp_median: float
    mp_p90: float
    dissipation: tuple[float, float, float]
    stress_check: float = math.nan
    phase_volume_error: float = math.nan
    energy_area_gap: float = math.nan
    extras: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        row = {
            "t": self.t,
            "A_eps": self.A_eps,
            "E_eps": self.E_eps,
            "B_eps": self.B_eps,
            "g_eps": self.g_eps,
            "h_eps": self.h_eps,
            "l1_front_error": self.l1_front_error,
        }
        row.update({f"coer{i + 1}": v for i, v in enumerate(self.coercivity)})
        row.update({
            "max_norm": self.max_norm,
            "radius_est": self.radius_est,
            "perim_plus": self.perim_plus,
            "perim_minus": self.perim_minus,
            "mp_median": self.mp_median,
            "mp_p90": self.mp_p90,
        })
        row.update({f"diss{i + 1}": v for i, v in enumerate(self.dissipation)})
        return row


class FieldState:
    """Cantidades nodales de un campo en el instante t, calculadas una vez."""

    def __init__(self, ctx: "DiagnosticsContext", field: Field, t: float):
        self.ctx = ctx
        self.field = field
        self.t = t
        self.grid = field.grid
        self.u = field.values

    @cached_property
    def jacobian(self) -> np.ndarray:
        """∇u, forma counts + (n, d)."""
        return self.grid.gradient(self.u)

    @cached_property
    def grad_u_sq(self) -> np.ndarray:
        return np.sum(self.jacobian**2, axis=(-2, -1))

    @cached_property
    def F(self) -> np.ndarray:
        return np.asarray(self.ctx.potential.F_eval(self.u))

    @cached_property
    def psi(self) -> np.ndarray:
        return np.asarray(self.ctx.potential.quasi_dist(self.u))

    @cached_property
    def dF_quasi(self) -> np.ndarray:
        """∂d_F(u) nodal (rama elegida en las aristas de casos)."""
        return self.ctx.potential.grad_quasi_dist(self.u, strict=False)

    @cached_property
    def grad_psi(self) -> np.ndarray:
        return np.einsum("...ij,...i->...j", self.jacobian, self.dF_quasi)

    @cached_property
    def abs_grad_psi(self) -> np.ndarray:
        return np.linalg.norm(self.grad_psi, axis=-1)

    @cached_property
    def normal_eps(self) -> np.ndarray:
        """n_ε = ∇ψ/|∇ψ|, cero bajo el umbral."""
        norm = self.abs_grad_psi
        safe = np.where(norm < GRAD_THRESHOLD, 1.0, norm)
        return np.where(np.expand_dims(norm < GRAD_THRESHOLD, -1), 0.0,
                        self.grad_psi / np.expand_dims(safe, -1))

    @cached_property
    def points(self) -> np.ndarray:
        return self.grid.points

    @cached_property
    def d_sigma(self) -> np.ndarray:
        return np.asarray(self.ctx.interface.d_Sigma(self.points, self.t))

    @cached_property
    def chi(self) -> np.ndarray:
        return np.where(self.d_sigma >= 0.0, 1.0, -1.0)

    @cached_property
    def eta(self) -> np.ndarray:
        return np.asarray(self.ctx.interface.eta_trunc(self.d_sigma))

    @cached_property
    def xi(self) -> np.ndarray:
        return self.ctx.interface.xi(self.points, self.t)

    @cached_property
    def projection_direction(self) -> np.ndarray:
        """
        Dirección unitaria ν de Π: ∂d_m en el tubo δ₀, ∂d_F normalizado
        fuera de él, cero si ∂d_F = 0.
        """
        potential = self.ctx.potential
        _, d, grad_m = potential.manifold.nearest(self.u)
        in_tube = np.abs(d) < potential.params.delta0
        norm = np.linalg.norm(self.dF_quasi, axis=-1)
        safe = np.where(norm > 0.0, norm, 1.0)
        off_tube = np.where(np.expand_dims(norm > 0.0, -1),
                            self.dF_quasi / np.expand_dims(safe, -1), 0.0)
        return np.where(np.expand_dims(in_tube, -1), grad_m, off_tube)

    @cached_property
    def projected_jacobian(self) -> np.ndarray:
        """Π∇u = ν ⊗ (νᵀ∇u) columna a columna."""
        nu = self.projection_direction
        coeff = np.einsum("...i,...ij->...j", nu, self.jacobian)
        return np.einsum("...i,...j->...ij", nu, coeff)

    @cached_property
    def velocity(self) -> np.ndarray:
        """∂_t u = Δu − ε⁻²∂F(u) en el interior; cero en ∂Ω."""
        eps = self.ctx.eps
        value = laplacian(self.u, self.grid.h) - self.ctx.potential.grad_F(self.u) / eps**2
        value[self.grid.boundary_mask] = 0.0
        return value

    @cached_property
    def H_eps(self) -> np.ndarray:
        """H_ε = −(εΔu − ∂F/ε)·∇u/|∇u| = −ε∂_t u·∇u/|∇u|."""
        norm = np.sqrt(self.grad_u_sq)
        small = norm < GRAD_THRESHOLD
        safe = np.where(small, 1.0, norm)
        value = -self.ctx.eps * np.einsum("...i,...ij->...j", self.velocity, self.jacobian)
        return np.where(np.expand_dims(small, -1), 0.0, value / np.expand_dims(safe, -1))

    @cached_property
    def energy_density(self) -> np.ndarray:
        eps = self.ctx.eps
        return eps / 2 * self.grad_u_sq + self.F / eps


class DiagnosticsContext:
    """
    Diagnósticos de un run: potencial, interfaz analítica y ε fijos.

    Args:
        potential: Potencial F
        interface: Σ_t analítica
        eps: ε del run
        level_k: Índice k de los niveles b = 1.5/k de control de área
        offsets: Desplazamientos s de las trazas de pares mínimos
        trace_samples: Puntos sobre Σ_t para las trazas
    """

    def __init__(
        self,
        potential: Potential,
        interface: InterfaceDescriptor,
        eps: float,
        level_k: int | None = None,
        offsets: list[float] | None = None,
        trace_samples: int = 64,
    ):
        self.potential = potential
        self.interface = interface
        self.eps = float(eps)
        self.cF = potential.cF
        if level_k is None:
            level_k = default_level_k(potential)
        self.level_k = int(level_k)
        self.offsets = offsets if offsets is not None else default_offsets(potential, eps)
        self.trace_samples = trace_samples

    def state(self, field: Field, t: float | None = None) -> FieldState:
        return FieldState(self, field, field.t if t is None else t)

    # ---------- ψ y energías ----------

    def psi_field(self, field: Field) -> np.ndarray:
        return self.state(field).psi

    def gl_energy(self, field: Field, t: float | None = None) -> float:
        """A_ε = ∫(ε/2|∇u|² + F/ε), trapecio con ∇u centrado."""
        st = self.state(field, t)
        return st.grid.integrate(st.energy_density)

    def modulated_integrand(self, st: FieldState) -> np.ndarray:
        return st.energy_density - np.sum(st.xi * st.grad_psi, axis=-1)

    def modulated_energy(self, field: Field, t: float | None = None) -> float:
        """E_ε = ∫(ε/2|∇u|² + F/ε − ξ·∇ψ)."""
        st = self.state(field, t)
        return st.grid.integrate(self.modulated_integrand(st))

    def normalized_modulated_energy(self, field: Field, t: float | None = None) -> float:
        """∫(½|∇u|² + F/ε² − ξ·∇ψ/ε) = E_ε/ε."""
        return self.modulated_energy(field, t) / self.eps

    # ---------- error de volumen ----------

    def _weighted_integrands(self, st: FieldState) -> tuple[np.ndarray, np.ndarray]:
        cF = self.cF
        dpsi = st.psi - cF
        h_int = (cF * st.chi - cF + 2.0 * np.maximum(-dpsi, 0.0)) * st.eta
        g_int = np.maximum(dpsi, 0.0) * np.abs(st.eta)
        for name, values in (("h_ε", h_int), ("g_ε", g_int)):
            if values.min() < -NEG_TOL:
                raise DataCorrupt(f"integrando de {name} negativo: {values.min():.3e}")
        return g_int, h_int

    def weighted_parts(self, field: Field, t: float | None = None) -> tuple[float, float]:
        """(g_ε, h_ε)."""
        st = self.state(field, t)
        g_int, h_int = self._weighted_integrands(st)
        return st.grid.integrate(g_int), st.grid.integrate(h_int)

    def bulk_energy(self, field: Field, t: float | None = None) -> float:
        g, h = self.weighted_parts(field, t)
        return g + h

    def l1_front_error(self, field: Field, t: float | None = None) -> float:
        """∫|ψ − c_F·1_{Ω₊}|."""
        st = self.state(field, t)
        target = np.where(st.d_sigma >= 0.0, self.cF, 0.0)
        return st.grid.integrate(np.abs(st.psi - target))

    def phase_volume_error(self, field: Field, t: float | None = None) -> float:
        """|{ψ > c_F/2} Δ Ω₊| por cuadratura."""
        st = self.state(field, t)
        mismatch = (st.psi > self.cF / 2) != (st.d_sigma >= 0.0)
        return st.grid.integrate(mismatch.astype(float))

    # ---------- coercividad ----------

    def coercivity_terms(self, field: Field, t: float | None = None) -> tuple[float, ...]:
        """
        Cinco términos, en orden:
        ∫(ε/2|∇u|² + F/ε − |∇ψ|), ε∫|∇u − Π∇u|², ∫(√ε|Π∇u| − |∂d_F|/√ε)²,
        ∫(ε/2|∇u|² + F/ε + |∇ψ|)(1 − ξ·n_ε) y la misma densidad por min(d_Σ², 1).
        """
        st = self.state(field, t)
        eps = self.eps
        grid = st.grid
        density = st.energy_density
        proj = st.projected_jacobian
        proj_norm = np.sqrt(np.sum(proj**2, axis=(-2, -1)))
        dF_norm = np.linalg.norm(st.dF_quasi, axis=-1)
        calibration = 1.0 - np.sum(st.xi * st.normal_eps, axis=-1)
        weight_d = np.minimum(st.d_sigma**2, 1.0)
        return (
            grid.integrate(density - st.abs_grad_psi),
            grid.integrate(eps * np.sum((st.jacobian - proj) ** 2, axis=(-2, -1))),
            grid.integrate((math.sqrt(eps) * proj_norm - dF_norm / math.sqrt(eps)) ** 2),
            grid.integrate((density + st.abs_grad_psi) * calibration),
            grid.integrate((density + st.abs_grad_psi) * weight_d),
        )

    def projection_identity_residual(self, field: Field, t: float | None = None) -> float:
        """max | |∇ψ| − |Π∇u|·|∂d_F| | en los nodos."""
        st = self.state(field, t)
        proj_norm = np.sqrt(np.sum(st.projected_jacobian**2, axis=(-2, -1)))
        dF_norm = np.linalg.norm(st.dF_quasi, axis=-1)
        return float(np.max(np.abs(st.abs_grad_psi - proj_norm * dF_norm)))

    def energy_decomposition_residual(self, field: Field, t: float | None = None) -> float:
        """max | |∇u|² − |∇u − Π∇u|² − |Π∇u|² |."""
        st = self.state(field, t)
        proj = st.projected_jacobian
        rest = np.sum((st.jacobian - proj) ** 2, axis=(-2, -1))
        return float(np.max(np.abs(st.grad_u_sq - rest - np.sum(proj**2, axis=(-2, -1)))))

    def grid_psi_gradient_gap(self, field: Field, t: float | None = None) -> float:
        """max |∇ψ(regla de la cadena) − ∇ψ(diferencias sobre la malla)|."""
        st = self.state(field, t)
        fd = st.grid.gradient(np.expand_dims(st.psi, -1))[..., 0, :]
        return float(np.max(np.linalg.norm(fd - st.grad_psi, axis=-1)))

    # ---------- curvatura y disipación ----------

    def H_eps_field(self, field: Field) -> np.ndarray:
        return self.state(field).H_eps

    def dissipation_terms(self, field: Field, t: float | None = None) -> tuple[float, float, float]:
        """
        (1/2ε)∫(ε²|∂_t u|² − |H_ε|²), (1/2ε)∫|H_ε − ε|∇u|H|²,
        (1/2ε)∫|ε∂_t u − (div ξ)∂d_F(u)|².
        """
        st = self.state(field, t)
        eps = self.eps
        grid = st.grid
        H = self.interface.H_ext(st.points, st.t)
        div_xi = np.asarray(self.interface.div_xi(st.points, st.t))
        vel_sq = np.sum(st.velocity**2, axis=-1)
        H_eps_sq = np.sum(st.H_eps**2, axis=-1)
        mismatch = st.H_eps - eps * np.expand_dims(np.sqrt(st.grad_u_sq), -1) * H
        transport = eps * st.velocity - np.expand_dims(div_xi, -1) * st.dF_quasi
        return (
            grid.integrate(eps**2 * vel_sq - H_eps_sq) / (2 * eps),
            grid.integrate(np.sum(mismatch**2, axis=-1)) / (2 * eps),
            grid.integrate(np.sum(transport**2, axis=-1)) / (2 * eps),
        )

    # ---------- tensor de tensiones ----------

    def _stress_field(self, st: FieldState) -> np.ndarray:
        dim = st.grid.dim
        eye = np.eye(dim)
        outer = np.einsum("...ki,...kj->...ij", st.jacobian, st.jacobian)
        return np.expand_dims(st.energy_density, (-2, -1)) * eye - self.eps * outer

    def stress_tensor(self, field: Field, index: tuple[int, ...]) -> np.ndarray:
        """
        T_ε = (ε/2|∇u|² + F/ε)·I − ε ∂_i u·∂_j u en un nodo interior.

        Raises:
            BoundaryNode: si index está sobre ∂Ω
        """
        grid = field.grid
        if grid.boundary_mask[tuple(index)]:
            raise BoundaryNode(f"nodo {tuple(index)} sobre ∂Ω")
        st = self.state(field)
        T = self._stress_field(st)[tuple(index)]
        return 0.5 * (T + T.T)

    def stress_divergence_residual(self, field: Field) -> float:
        """max |∇·T_ε − H_ε|∇u|| lejos del borde (dos capas)."""
        st = self.state(field)
        grid = st.grid
        T = self._stress_field(st)
        div = np.zeros(grid.shape + (grid.dim,))
        for j in range(grid.dim):
            div += np.gradient(T[..., :, j], grid.h, axis=j, edge_order=2)
        target = st.H_eps * np.expand_dims(np.sqrt(st.grad_u_sq), -1)
        inner = tuple(slice(2, -2) for _ in range(grid.dim))
        return float(np.max(np.linalg.norm((div - target)[inner], axis=-1)))

    # ---------- registro completo ----------

    def _perimeters(self, st: FieldState) -> tuple[float, float, float]:
        b = area_control_level(self.level_k)
        try:
            _, radius = extract_interface(st.psi, st.grid, self.cF / 2, self.interface.center)
            perim_plus = level_set_perimeter(st.psi, st.grid, self.cF - b)
            perim_minus = level_set_perimeter(st.psi, st.grid, b)
        except EmptyLevelSet as exc:
            logger.warning(f"t={st.t:.5g}: conjunto de nivel vacío ({exc})")
            return math.nan, math.nan, math.nan
        return radius, perim_plus, perim_minus

    def _traces(self, field: Field, t: float) -> tuple[float, float, dict]:
        try:
            stats = minimal_pair_deviation(self, field, t, self.offsets)
        except (TraceOffManifoldTube, InvalidOffset) as exc:
            logger.warning(f"t={t:.5g}: trazas de pares mínimos no disponibles ({exc})")
            return math.nan, math.nan, {}
        if not stats:
            return math.nan, math.nan, {}
        first = stats[0]
        return first.median, first.p90, {f"mp_s={s.offset:.6g}": s.as_dict() for s in stats}

    def record(self, field: Field) -> DiagnosticsRecord:
        """Registro completo en field.t; es el monitor del integrador."""
        t = field.t
        st = self.state(field, t)
        grid = st.grid
        A = grid.integrate(st.energy_density)
        E = grid.integrate(self.modulated_integrand(st))
        g_int, h_int = self._weighted_integrands(st)
        g, h = grid.integrate(g_int), grid.integrate(h_int)
        target = np.where(st.d_sigma >= 0.0, self.cF, 0.0)
        l1 = grid.integrate(np.abs(st.psi - target))
        radius, perim_plus, perim_minus = self._perimeters(st)
        mp_median, mp_p90, mp_extras = self._traces(field, t)
        if E < -NEG_TOL * max(A, 1.0):
            logger.warning(f"t={t:.5g}: E_ε={E:.3e} negativa más allá de la tolerancia")
        record = DiagnosticsRecord(
            t=t,
            A_eps=A,
            E_eps=E,
            B_eps=g + h,
            g_eps=g,
            h_eps=h,
            l1_front_error=l1,
            coercivity=self.coercivity_terms(field, t),
            max_norm=field.max_norm(),
            radius_est=radius,
            perim_plus=perim_plus,
            perim_minus=perim_minus,
            mp_median=mp_median,
            mp_p90=mp_p90,
            dissipation=self.dissipation_terms(field, t),
            stress_check=self.stress_divergence_residual(field) if grid.dim <= 2 else math.nan,
            phase_volume_error=self.phase_volume_error(field, t),
            energy_area_gap=abs(A - self.cF * self.interface.area(t)),
            extras=mp_extras,
        )
        logger.debug(f"Registro t={t:.5g}: A_ε={A:.6g}, E_ε={E:.3e}, B={g + h:.3e}")
        return record


def default_level_k(potential: Potential) -> int:
    """Menor k con 2/k < δ₀ y 2/k < c_F/4."""
    bound = min(potential.params.delta0, potential.cF / 4)
    return int(math.floor(2.0 / bound)) + 1


def default_offsets(potential: Potential, eps: float) -> list[float]:
    """[4ε] recortado a [2ε, δ₀/2]; vacío si la ventana no existe."""
    upper = potential.params.delta0 / 2
    if 2 * eps > upper:
        return []
    return [min(max(4 * eps, 2 * eps), upper)]
