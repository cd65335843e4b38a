"""
Potencial de volumen F(u) = f(d_m²(u)), su gradiente, la cuasi-distancia d_F
y el potencial centralizado F̃.
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from src.errors import ConfigInvalid, NearKink, QuadratureFailure
from src.geometry.target_manifold import ManifoldPair
from src.physics.profile_1d import ProfileTable, adaptive_integral, build_profile, compute_cF
from src.physics.ramps import Ramp, RampKind

logger = logging.getLogger(__name__)

PRIMITIVE_TABLE_SIZE = 4096
KINK_TOL = 1e-8


@dataclass(frozen=True)
class PotentialParams:
    """Constantes del potencial; c_F la calcula profile_1d."""
    c3: float
    delta0: float
    ramp: RampKind
    c1: float
    c2: float
    c4: float
    cF: float


class Potential:
    """
    F, ∂F y d_F sobre un par de pozos.

    Args:
        manifold: Par de pozos
        c3: Valor de meseta de f
        ramp: "cubic" (por defecto) o "quintic"
        delta0: δ₀ de la rampa; por defecto el radio de tubo del par
    """

    def __init__(
        self,
        manifold: ManifoldPair,
        c3: float = 1.0,
        ramp: RampKind = "cubic",
        delta0: float | None = None,
    ):
        if c3 <= 0:
            raise ConfigInvalid("potential.c3", f"debe ser positivo, recibido {c3}")
        if delta0 is None:
            delta0 = manifold.tube_radius
        limit = min(manifold.plus.reach, manifold.minus.reach, manifold.gap / 2)
        if not 0 < delta0 < limit:
            raise ConfigInvalid("potential.delta0", f"se requiere 0 < δ₀ < {limit:.6g}")

        self.manifold = manifold
        self.ramp = Ramp(ramp, float(c3), float(delta0))
        cF = compute_cF(self.ramp, manifold.gap)
        self.params = PotentialParams(
            c3=self.ramp.c3,
            delta0=self.ramp.delta0,
            ramp=ramp,
            c1=self.ramp.c1,
            c2=self.ramp.c2,
            c4=self.ramp.c4,
            cF=cF,
        )
        self._primitive = self._build_primitive_table()
        self._slope = float(np.sqrt(2.0 * self.ramp.c3))
        self._primitive_at_delta0 = float(self._primitive(self.ramp.delta0))
        logger.debug(f"Potencial {ramp}: c3={c3}, δ₀={delta0:.6g}, c_F={cF:.12g}")

    @property
    def cF(self) -> float:
        return self.params.cF

    # ---------- tabla de I(a) = ∫₀^a √(2f(λ²)) dλ ----------

    def _integrand(self, lam: np.ndarray) -> np.ndarray:
        return np.sqrt(2.0 * self.ramp.value(lam * lam))

    def _build_primitive_table(self) -> CubicHermiteSpline:
        """Tabla de 4096 nodos en [0, δ₀] con Gauss–Legendre por panel."""
        delta0 = self.ramp.delta0
        nodes = np.linspace(0.0, delta0, PRIMITIVE_TABLE_SIZE)
        gl_x, gl_w = np.polynomial.legendre.leggauss(8)
        left, right = nodes[:-1], nodes[1:]
        mid, rad = 0.5 * (left + right), 0.5 * (right - left)
        samples = mid[:, None] + rad[:, None] * gl_x[None, :]
        panels = rad * (self._integrand(samples) @ gl_w)
        values = np.concatenate([[0.0], np.cumsum(panels)])

        reference = adaptive_integral(self._integrand, 0.0, delta0, tol=1e-12)
        if abs(values[-1] - reference) > 1e-10:
            raise QuadratureFailure(
                f"tabla de I(a): {values[-1]:.15g} vs cuadratura adaptativa {reference:.15g}"
            )
        return CubicHermiteSpline(nodes, values, self._integrand(nodes))

    def primitive(self, a):
        """I(a) para a ≥ 0; lineal con pendiente √(2c3) más allá de δ₀."""
        a_arr = np.abs(np.asarray(a, dtype=float))
        delta0 = self.ramp.delta0
        inner = self._primitive(np.minimum(a_arr, delta0))
        value = np.where(
            a_arr <= delta0, inner, self._primitive_at_delta0 + self._slope * (a_arr - delta0)
        )
        return float(value) if np.ndim(a) == 0 else value

    # ---------- F y ∂F ----------

    def F_eval(self, u):
        """F(u) = f(dist(u, m)²)."""
        u = np.asarray(u, dtype=float)
        dist = self.manifold.dist_to_m(u)
        value = self.ramp.value(dist * dist)
        return float(value) if np.ndim(value) == 0 else value

    def grad_F(self, u):
        """∂F(u) = 2f'(d²)·(u − P_m u); cero fuera del tubo δ₀."""
        u = np.asarray(u, dtype=float)
        _, d, normal = self.manifold.nearest(u)
        _, deriv = self.ramp.f_eval(np.asarray(d * d))
        return np.expand_dims(2.0 * deriv * d, -1) * normal

    def hessian_bound(self, samples: int = 2048) -> float:
        """
        Cota espectral del Hessiano de F en el tubo δ₀, por muestreo en |d|.

        Dirección normal: |2f' + 4d²f''|. Tangencial: 2|f'|·|d|κ/(1 − |d|κ).
        """
        d = np.linspace(0.0, self.ramp.delta0, samples)
        s = d * d
        _, first = self.ramp.f_eval(s)
        second = self.ramp.f_second(s)
        normal = np.abs(2 * first + 4 * s * second)
        kappa = self.manifold.curvature_bound
        tangential = 2 * np.abs(first) * d * kappa / (1 - d * kappa)
        return float(max(normal.max(), tangential.max()))

    # ---------- cuasi-distancia ----------

    def _branches(self, u: np.ndarray):
        d_plus, d_minus = self.manifold.distances(u)
        half = self.manifold.gap / 2
        near_plus = np.abs(d_plus) <= half
        near_minus = (np.abs(d_minus) <= half) & ~near_plus
        return d_plus, d_minus, near_plus, near_minus

    def quasi_dist(self, u):
        """
        d_F(u) ∈ [0, c_F].

        Cerca de m₋ vale I(|d_{m₋}|); cerca de m₊ vale c_F − I(|d_{m₊}|); en el
        resto (lejos de ambos, o en el interior profundo de U±) vale c_F/2.
        """
        u = np.asarray(u, dtype=float)
        d_plus, d_minus, near_plus, near_minus = self._branches(u)
        value = np.full(d_plus.shape, self.cF / 2)
        value = np.where(near_minus, self.primitive(d_minus), value)
        value = np.where(near_plus, self.cF - self.primitive(d_plus), value)
        return float(value) if np.ndim(value) == 0 else value

    def _branch_gradients(self, u: np.ndarray):
        d_plus, d_minus = self.manifold.distances(u)
        w_plus = -np.sign(d_plus) * np.sqrt(2.0 * self.ramp.value(d_plus * d_plus))
        w_minus = np.sign(d_minus) * np.sqrt(2.0 * self.ramp.value(d_minus * d_minus))
        g_plus = np.expand_dims(w_plus, -1) * self.manifold.plus.gradient(u)
        g_minus = np.expand_dims(w_minus, -1) * self.manifold.minus.gradient(u)
        return d_plus, d_minus, g_plus, g_minus

    def grad_quasi_dist(self, u, strict: bool = True):
        """
        Gradiente clásico de d_F.

        Args:
            u: Punto(s) en ℝⁿ
            strict: Si True, lanza NearKink a menos de 1e−8 de un borde de
                casos donde las ramas no coinciden; si False, devuelve el
                gradiente de la rama elegida (uso sobre mallas)
        """
        u = np.asarray(u, dtype=float)
        d_plus, d_minus, g_plus, g_minus = self._branch_gradients(u)
        half = self.manifold.gap / 2
        dist_plus, dist_minus = np.abs(d_plus), np.abs(d_minus)
        near_plus = dist_plus <= half
        near_minus = (dist_minus <= half) & ~near_plus

        grad = np.zeros_like(g_plus)
        grad = np.where(np.expand_dims(near_minus, -1), g_minus, grad)
        grad = np.where(np.expand_dims(near_plus, -1), g_plus, grad)

        if strict:
            self._check_kinks(dist_plus, dist_minus, g_plus, g_minus, half)
        return grad

    def _check_kinks(self, dist_plus, dist_minus, g_plus, g_minus, half):
        boundary = (np.abs(dist_plus - half) < KINK_TOL) | (np.abs(dist_minus - half) < KINK_TOL)
        if not np.any(boundary):
            return
        # candidatos: gradientes de cada caso aplicable dentro de la tolerancia
        plus_ok = dist_plus <= half + KINK_TOL
        minus_ok = dist_minus <= half + KINK_TOL
        const_ok = (dist_plus >= half - KINK_TOL) & (dist_minus >= half - KINK_TOL)
        zero = np.zeros_like(g_plus)
        candidates = [(plus_ok, g_plus), (minus_ok, g_minus), (const_ok, zero)]
        for i, (ok_a, g_a) in enumerate(candidates):
            for ok_b, g_b in candidates[i + 1:]:
                diff = np.linalg.norm(g_a - g_b, axis=-1)
                if np.any(boundary & ok_a & ok_b & (diff > KINK_TOL)):
                    raise NearKink("u está sobre un borde de casos de d_F")

    def centralized_potential(self, lam):
        """F̃(λ) = f((dist_m/2 − |λ|)²)."""
        return self.ramp.centralized(self.manifold.gap, lam)

    # ---------- perfil ----------

    @cached_property
    def _profile_table(self) -> ProfileTable:
        return build_profile(self.ramp, self.manifold.gap)

    def profile(self) -> ProfileTable:
        """Perfil óptimo α, construido una vez y compartido."""
        return self._profile_table
