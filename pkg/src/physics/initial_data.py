"""
Datos iniciales bien preparados u_ε^in a partir de un par de mapas u_in^±.

u_ε^in = (u₀⁺ + u₀⁻)/2 + S_ε·(u₀⁺ − u₀⁻)/dist_m, con u₀^± = u_in^± ∘ Ψ_δ fuera
del collar B_δ(Σ₀) y u_in^± ∘ P_Σ₀ dentro.
"""
import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from src.errors import (
    CollarTooWide,
    ConfigInvalid,
    InsideCollar,
    NotOnManifold,
    OutsideDomainOfSide,
)
from src.geometry.interface import InterfaceDescriptor, bump
from src.geometry.target_manifold import Side
from src.physics.potential import Potential
from src.solver.grid import BoundaryData, Field, Grid

logger = logging.getLogger(__name__)

InitialKind = Literal["constant_minimal_pair", "sliding_segment_pair"]


@dataclass(frozen=True)
class LinearPhase:
    """φ_map(x) = clip(slope·x[axis] + offset, −1, 1)."""
    axis: int
    slope: float
    offset: float = 0.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.clip(self.slope * x[..., self.axis] + self.offset, -1.0, 1.0)


@dataclass(frozen=True, eq=False)
class InitialMaps:
    """
    Par de mapas u_in^± : Ω → m±.

    constant_minimal_pair usa p_plus/p_minus. sliding_segment_pair recorre los
    segmentos enfrentados de dos cápsulas con la fase phase_plus (y
    phase_minus, que por defecto es la misma).
    """
    kind: InitialKind
    p_plus: np.ndarray | None = None
    p_minus: np.ndarray | None = None
    phase_plus: LinearPhase | None = None
    phase_minus: LinearPhase | None = None
    delta: float | None = None
    allow_mismatch: bool = False

    @classmethod
    def constant(cls, p_plus, p_minus, delta: float | None = None,
                 allow_mismatch: bool = False) -> "InitialMaps":
        return cls(
            "constant_minimal_pair",
            p_plus=np.asarray(p_plus, dtype=float),
            p_minus=np.asarray(p_minus, dtype=float),
            delta=delta,
            allow_mismatch=allow_mismatch,
        )

    @classmethod
    def sliding(
        cls,
        phase_plus: LinearPhase,
        phase_minus: LinearPhase | None = None,
        delta: float | None = None,
        allow_mismatch: bool = False,
    ) -> "InitialMaps":
        return cls(
            "sliding_segment_pair",
            phase_plus=phase_plus,
            phase_minus=phase_minus or phase_plus,
            delta=delta,
            allow_mismatch=allow_mismatch,
        )

    def evaluate(self, x, side: Side, potential: Potential) -> np.ndarray:
        """u_in^side(x), forma x.shape[:-1] + (n,)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "constant_minimal_pair":
            point = self.p_plus if side == "+" else self.p_minus
            return np.broadcast_to(point, x.shape[:-1] + point.shape).copy()
        minimal = potential.manifold.minimal_sets()
        ends = minimal.plus if side == "+" else minimal.minus
        phase = self.phase_plus if side == "+" else self.phase_minus
        tau = np.expand_dims((phase(x) + 1.0) / 2.0, -1)
        return ends[0] + tau * (ends[1] - ends[0])

    def validate(self, potential: Potential) -> None:
        manifold = potential.manifold
        if self.kind == "constant_minimal_pair":
            if self.p_plus is None or self.p_minus is None:
                raise ConfigInvalid("initial_data.p_plus", "faltan los extremos p⁺/p⁻")
            try:
                minimal = manifold.is_minimal_pair(self.p_plus, self.p_minus)
            except NotOnManifold as exc:
                raise ConfigInvalid("initial_data.p_plus", str(exc)) from exc
            if not minimal and not self.allow_mismatch:
                raise ConfigInvalid("initial_data.p_plus", "(p⁺, p⁻) no es un par mínimo")
        else:
            if manifold.minimal_sets().kind != "segment":
                raise ConfigInvalid(
                    "initial_data.kind", "sliding_segment_pair requiere cápsulas paralelas"
                )
            if self.phase_plus is None:
                raise ConfigInvalid("initial_data.phase_plus", "falta la fase")

    def minimal_on_interface(
        self, interface: InterfaceDescriptor, potential: Potential, samples: int = 64
    ) -> bool:
        """Comprueba que (u_in⁺(p), u_in⁻(p)) sea par mínimo en puntos de Σ₀."""
        points = interface.sample_surface(0.0, samples)
        plus = self.evaluate(points, "+", potential)
        minus = self.evaluate(points, "-", potential)
        dist = np.linalg.norm(plus - minus, axis=-1)
        return bool(np.all(np.abs(dist - potential.manifold.gap) <= 1e-9))


class InitialData:
    """
    Construcción de u_ε^in para una interfaz, un potencial y un par de mapas.

    Args:
        maps: Mapas u_in^±
        interface: Σ₀ (se usa t=0)
        potential: Potencial; aporta dist_m y el perfil α
    """

    def __init__(self, maps: InitialMaps, interface: InterfaceDescriptor, potential: Potential):
        maps.validate(potential)
        delta = maps.delta if maps.delta is not None else interface.delta0_geo / 4
        if delta <= 0:
            raise ConfigInvalid("initial_data.delta", f"δ debe ser positivo, recibido {delta}")
        if 2 * delta >= interface.delta0_geo:
            raise CollarTooWide(f"2δ={2 * delta:.6g} ≥ δ₀={interface.delta0_geo:.6g}")
        self.maps = maps
        self.interface = interface
        self.potential = potential
        self.delta = float(delta)
        self.gap = potential.manifold.gap
        # ρ̃ en [δ, 2δ]: Hermite monótono con ρ̃(δ)=0, ρ̃(2δ)=2δ, pendientes 2 y 1
        self._blend = CubicHermiteSpline(
            [self.delta, 2 * self.delta], [0.0, 2 * self.delta], [2.0, 1.0]
        )

    # ---------- Ψ_δ ----------

    def _squeezed_offset(self, sigma: np.ndarray) -> np.ndarray:
        """σ ↦ σ̃ (σ = −d_Σ); en el collar devuelve 0 (proyección a Σ₀)."""
        a = np.abs(sigma)
        inner = self._blend(np.clip(a, self.delta, 2 * self.delta))
        return np.where(a >= 2 * self.delta, sigma, np.sign(sigma) * inner)

    def _collapse(self, x: np.ndarray) -> np.ndarray:
        """Ψ_δ fuera del collar y P_Σ₀ dentro."""
        sigma = -np.asarray(self.interface.d_Sigma(x, 0.0))
        shift = self._squeezed_offset(sigma) - sigma
        normal, _ = self.interface.grad_d(x)
        return x - np.expand_dims(shift, -1) * normal

    def psi_delta(self, x):
        """
        Ψ_δ: estira Ω₀^± ∖ B_δ(Σ₀) sobre Ω₀^±; identidad fuera de B_{2δ}(Σ₀).

        Raises:
            InsideCollar: si algún punto cumple |d_Σ₀| < δ
        """
        x = np.asarray(x, dtype=float)
        d = np.asarray(self.interface.d_Sigma(x, 0.0))
        if np.any(np.abs(d) < self.delta):
            raise InsideCollar(f"|d_Σ₀| < δ={self.delta:.6g}")
        return self._collapse(x)

    def rho_tilde(self, sigma):
        """Perfil radial σ ↦ σ̃ del estiramiento (σ = −d_Σ₀)."""
        return self._squeezed_offset(np.asarray(sigma, dtype=float))

    def extend_u0(self, x, side: Side) -> np.ndarray:
        """
        u₀^side: u_in ∘ Ψ_δ fuera del collar, u_in ∘ P_Σ₀ en el collar cerrado.

        Raises:
            OutsideDomainOfSide: si x no está en Ω₀^side ∪ B̄_δ(Σ₀)
        """
        x = np.asarray(x, dtype=float)
        d = np.asarray(self.interface.d_Sigma(x, 0.0))
        on_side = d >= 0 if side == "+" else d < 0
        if np.any(~on_side & (np.abs(d) > self.delta)):
            raise OutsideDomainOfSide(f"punto fuera de Ω₀^{side} ∪ B̄_δ(Σ₀)")
        return self.maps.evaluate(self._collapse(x), side, self.potential)

    # ---------- S_ε ----------

    def eta_delta(self, x):
        """η_δ: 1 en B_{δ/2}(Σ₀), 0 fuera de B_δ(Σ₀)."""
        return bump(self.interface.d_Sigma(x, 0.0), self.delta / 2, self.delta)

    def S_eps(self, x, eps: float):
        """S_ε = η_δ·α(d_Σ/ε) + (1 − η_δ)·(dist_m/2)·χ."""
        d = np.asarray(self.interface.d_Sigma(x, 0.0), dtype=float)
        eta = bump(d, self.delta / 2, self.delta)
        profile = self.potential.profile()
        chi = np.where(d >= 0, 1.0, -1.0)
        value = eta * profile.eval_alpha(d / eps) + (1.0 - eta) * (self.gap / 2) * chi
        return float(value) if np.ndim(value) == 0 else value

    def S_hat(self, x, eps: float):
        """Término de cola Ŝ_ε = S_ε − α(d_Σ/ε)."""
        d = np.asarray(self.interface.d_Sigma(x, 0.0), dtype=float)
        value = np.asarray(self.S_eps(x, eps)) - self.potential.profile().eval_alpha(d / eps)
        return float(value) if np.ndim(value) == 0 else value

    # ---------- campo ----------

    def initial_values(self, x: np.ndarray, eps: float) -> np.ndarray:
        """u_ε^in en puntos arbitrarios (forma ... × d)."""
        x = np.asarray(x, dtype=float)
        d = np.asarray(self.interface.d_Sigma(x, 0.0))
        collapsed = self._collapse(x)
        u_plus = self.maps.evaluate(collapsed, "+", self.potential)
        u_minus = self.maps.evaluate(collapsed, "-", self.potential)
        S = np.expand_dims(np.asarray(self.S_eps(x, eps)), -1)
        values = 0.5 * (u_plus + u_minus) + S * (u_plus - u_minus) / self.gap

        # fuera del collar η_δ = 0 y u coincide exactamente con u₀^±
        outside = np.abs(d) >= self.delta
        plus_side = np.expand_dims(outside & (d >= 0), -1)
        minus_side = np.expand_dims(outside & (d < 0), -1)
        values = np.where(plus_side, u_plus, values)
        return np.where(minus_side, u_minus, values)

    def _check_clearance(self, grid: Grid) -> None:
        d_boundary = np.abs(self.interface.d_Sigma(grid.points[grid.boundary_mask], 0.0))
        if d_boundary.min() < self.interface.delta0_geo:
            raise ConfigInvalid(
                "interface",
                f"Σ₀ a distancia {d_boundary.min():.6g} de ∂Ω (< δ₀={self.interface.delta0_geo})",
            )

    def build_initial_field(self, grid: Grid, eps: float) -> Field:
        if eps <= 0:
            raise ConfigInvalid("solver.eps", f"ε debe ser positivo, recibido {eps}")
        self._check_clearance(grid)
        values = self.initial_values(grid.points, eps)
        logger.info(
            f"Dato inicial: {grid.node_count} nodos, ε={eps}, δ={self.delta:.6g}, "
            f"sup|u|={np.linalg.norm(values, axis=-1).max():.6g}"
        )
        return Field(grid, values, 0.0)

    def boundary_data(self, grid: Grid) -> BoundaryData:
        """g = u_in^± en ∂Ω según el lado de cada nodo de borde."""
        self._check_clearance(grid)
        points = grid.points
        d = np.asarray(self.interface.d_Sigma(points, 0.0))
        plus = self.maps.evaluate(points, "+", self.potential)
        minus = self.maps.evaluate(points, "-", self.potential)
        values = np.where(np.expand_dims(d >= 0, -1), plus, minus)
        return BoundaryData(grid, values)
