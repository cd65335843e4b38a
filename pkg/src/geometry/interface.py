"""
Interfaz analítica Σ_t (soluciones exactas del flujo por curvatura media),
su distancia con signo y los campos extendidos ξ, H con sus cortes.

Convención: d_Σ > 0 en Ω₊ (interior de la esfera; x < x0 para el frente plano).
"""
import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from src.errors import AtCenter, ConfigInvalid, ExtinctionReached, SampleOutsideTube

logger = logging.getLogger(__name__)

InterfaceKind = Literal["shrinking_sphere", "stationary_point"]


def phi(z):
    """φ(z) = exp(1/(z²−1) + 1) en |z| < 1, cero fuera."""
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1.0
    zz = np.where(inside, z * z, 0.0)
    return np.where(inside, np.exp(1.0 / (zz - 1.0) + 1.0), 0.0)


def phi_prime(z):
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1.0
    zz = np.where(inside, z * z, 0.0)
    return np.where(inside, phi(z) * (-2.0 * z) / (zz - 1.0) ** 2, 0.0)


def smoothstep5(z):
    """6z⁵ − 15z⁴ + 10z³ recortado a [0, 1]; C²."""
    z = np.clip(np.asarray(z, dtype=float), 0.0, 1.0)
    return z**3 * (10.0 - 15.0 * z + 6.0 * z**2)


def bump(distance, inner: float, outer: float):
    """Corte C²: 1 si |distance| ≤ inner, 0 si ≥ outer, quíntico en medio."""
    a = np.abs(np.asarray(distance, dtype=float))
    return 1.0 - smoothstep5((a - inner) / (outer - inner))


@dataclass
class IdentityReport:
    """Residuos máximos de las cuatro identidades geométricas."""
    t: float
    fd_step: float
    residual_a: float
    residual_b: float
    residual_c: float
    residual_d: float
    d_sigma: np.ndarray
    per_sample: np.ndarray  # (muestras, 4)

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "fd_step": self.fd_step,
            "residual_a": self.residual_a,
            "residual_b": self.residual_b,
            "residual_c": self.residual_c,
            "residual_d": self.residual_d,
        }


@dataclass(frozen=True, eq=False)
class InterfaceDescriptor:
    """
    Interfaz Σ_t.

    Para shrinking_sphere, center es el centro y r0 el radio inicial. Para
    stationary_point (d=1), center = [x0] y r0 no se usa.
    """
    kind: InterfaceKind
    center: np.ndarray
    r0: float
    delta0_geo: float

    @classmethod
    def shrinking_sphere(cls, center, r0: float, delta0_geo: float) -> "InterfaceDescriptor":
        center = np.atleast_1d(np.asarray(center, dtype=float))
        if r0 <= 2 * delta0_geo:
            raise ConfigInvalid("interface.r0", f"r0={r0} debe superar 2·δ₀={2 * delta0_geo}")
        return cls("shrinking_sphere", center, float(r0), float(delta0_geo))

    @classmethod
    def stationary_point(cls, x0: float, delta0_geo: float) -> "InterfaceDescriptor":
        return cls("stationary_point", np.array([float(x0)]), 0.0, float(delta0_geo))

    @property
    def spatial_dim(self) -> int:
        return self.center.shape[0]

    # ---------- radio y horizonte ----------

    def radius(self, t: float) -> float:
        """r(t) = √(r0² − 2(d−1)t)."""
        if self.kind == "stationary_point":
            return 0.0
        value = self.r0**2 - 2.0 * (self.spatial_dim - 1) * t
        if value <= 0.0:
            raise ExtinctionReached(f"la esfera se extingue antes de t={t}")
        return math.sqrt(value)

    def check_horizon(self, T: float) -> None:
        if self.kind == "shrinking_sphere" and self.radius(T) <= 2 * self.delta0_geo:
            raise ExtinctionReached(
                f"r({T})={self.radius(T):.6g} ≤ 2·δ₀={2 * self.delta0_geo:.6g}"
            )

    def area(self, t: float) -> float:
        """|Σ_t|: número de puntos (d=1), perímetro (d=2) o área (d=3)."""
        if self.kind == "stationary_point":
            return 1.0
        d, r = self.spatial_dim, self.radius(t)
        if d == 1:
            return 2.0
        if d == 2:
            return 2 * math.pi * r
        return 4 * math.pi * r**2

    def sample_surface(self, t: float, count: int) -> np.ndarray:
        """Puntos sobre Σ_t: equiangulares en d=2, Fibonacci en d=3."""
        if self.kind == "stationary_point":
            return self.center[None].copy()
        d, r = self.spatial_dim, self.radius(t)
        if d == 1:
            return np.array([[self.center[0] - r], [self.center[0] + r]])
        if d == 2:
            theta = 2 * np.pi * np.arange(count) / count
            return self.center + r * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        ang = np.pi * (1 + 5**0.5) * k
        rho = np.sqrt(1 - z**2)
        return self.center + r * np.stack([rho * np.cos(ang), rho * np.sin(ang), z], axis=-1)

    # ---------- distancia, normal, velocidad ----------

    def d_Sigma(self, x, t: float):
        x = np.asarray(x, dtype=float)
        if self.kind == "stationary_point":
            value = self.center[0] - x[..., 0]
        else:
            value = self.radius(t) - np.linalg.norm(x - self.center, axis=-1)
        return float(value) if np.ndim(value) == 0 else value

    def grad_d(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(∇d_Σ, máscara de centro); ∇d_Σ no depende de t."""
        if self.kind == "stationary_point":
            grad = np.broadcast_to(np.array([-1.0]), x.shape).copy()
            return grad, np.zeros(x.shape[:-1], dtype=bool)
        diff = x - self.center
        rho = np.linalg.norm(diff, axis=-1)
        at_center = rho == 0.0
        safe = np.where(at_center, 1.0, rho)
        grad = -diff / np.expand_dims(safe, -1)
        return np.where(np.expand_dims(at_center, -1), 0.0, grad), at_center

    def normal(self, x, t: float):
        """Normal interior n = ∇d_Σ."""
        x = np.asarray(x, dtype=float)
        grad, at_center = self.grad_d(x)
        if np.any(at_center):
            raise AtCenter("la normal no está definida en el centro de la esfera")
        return grad

    def velocity(self, x, t: float):
        """V = −∂_t d_Σ = (d−1)/r(t)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "stationary_point":
            value = 0.0
        else:
            value = (self.spatial_dim - 1) / self.radius(t)
        return np.full(x.shape[:-1], value) if x.ndim > 1 else float(value)

    def project(self, x, t: float):
        """P_Σ(x) = x − d_Σ·∇d_Σ."""
        x = np.asarray(x, dtype=float)
        grad, _ = self.grad_d(x)
        return x - np.expand_dims(self.d_Sigma(x, t), -1) * grad

    # ---------- cortes ----------

    def eta_trunc(self, v):
        """η(v) = clamp(v, −δ₀, δ₀)."""
        value = np.clip(v, -self.delta0_geo, self.delta0_geo)
        return float(value) if np.ndim(value) == 0 else value

    def chi(self, x, t: float):
        """χ = +1 en Ω₊ (incluida Σ_t), −1 en Ω₋."""
        value = np.where(np.asarray(self.d_Sigma(x, t)) >= 0.0, 1.0, -1.0)
        return float(value) if np.ndim(value) == 0 else value

    def eta0(self, x, t: float):
        """η₀: 1 en |d_Σ| ≤ δ₀, 0 en |d_Σ| ≥ 2δ₀."""
        value = bump(self.d_Sigma(x, t), self.delta0_geo, 2 * self.delta0_geo)
        return float(value) if np.ndim(value) == 0 else value

    def calibration_lower_bound(self, d):
        """Cota explícita 1 − ξ·n ≥ min(d²/(2δ₀²), 1 − φ(½)) para n unitario."""
        d = np.asarray(d, dtype=float)
        return np.minimum(d * d / (2 * self.delta0_geo**2), 1.0 - float(phi(0.5)))

    # ---------- campos extendidos ----------

    def _check_center(self, at_center: np.ndarray, weight) -> None:
        if np.any(at_center & (np.asarray(weight) > 0.0)):
            raise AtCenter("campo extendido evaluado en el centro dentro del soporte")

    def xi(self, x, t: float):
        """ξ = φ(d_Σ/δ₀)·∇d_Σ."""
        x = np.asarray(x, dtype=float)
        grad, at_center = self.grad_d(x)
        weight = phi(self.d_Sigma(x, t) / self.delta0_geo)
        self._check_center(at_center, weight)
        return np.expand_dims(weight, -1) * grad

    def div_xi(self, x, t: float):
        """div ξ = φ'(d/δ₀)/δ₀ + φ(d/δ₀)·Δd_Σ."""
        x = np.asarray(x, dtype=float)
        z = np.asarray(self.d_Sigma(x, t)) / self.delta0_geo
        value = phi_prime(z) / self.delta0_geo
        if self.kind == "shrinking_sphere":
            rho = np.linalg.norm(x - self.center, axis=-1)
            at_center = rho == 0.0
            self._check_center(at_center, phi(z))
            laplacian = -(self.spatial_dim - 1) / np.where(at_center, 1.0, rho)
            value = value + phi(z) * laplacian
        return float(value) if np.ndim(value) == 0 else value

    def curvature(self, x, t: float):
        """κ = −Δd_Σ(P_Σ x)·η₀ = (d−1)/r(t)·η₀."""
        if self.kind == "stationary_point":
            value = np.zeros(np.shape(x)[:-1])
        else:
            value = (self.spatial_dim - 1) / self.radius(t) * np.asarray(self.eta0(x, t))
        return float(value) if np.ndim(value) == 0 else value

    def H_ext(self, x, t: float):
        """H = κ·∇d_Σ, constante a lo largo de las normales en el tubo δ₀."""
        x = np.asarray(x, dtype=float)
        grad, at_center = self.grad_d(x)
        kappa = self.curvature(x, t)
        self._check_center(at_center, kappa)
        return np.expand_dims(kappa, -1) * grad

    # ---------- verificador ----------

    def verify_identities(self, t: float, samples, fd_step: float) -> IdentityReport:
        """
        Residuos por diferencias centradas (en x y en t) de:
        (a) div ξ + H·ξ, (b) ∂_t d + H·∇d, (c) ∂_t ξ + (H·∇)ξ + (∇H)ᵀξ,
        (d) ∂_t|ξ|² + (H·∇)|ξ|².

        Raises:
            SampleOutsideTube: si alguna muestra tiene |d_Σ| ≥ δ₀/2
        """
        x = np.atleast_2d(np.asarray(samples, dtype=float))
        d_sigma = np.asarray(self.d_Sigma(x, t))
        if np.any(np.abs(d_sigma) >= self.delta0_geo / 2):
            raise SampleOutsideTube(f"muestras con |d_Σ| ≥ δ₀/2 = {self.delta0_geo / 2:.6g}")

        h = fd_step
        dim = self.spatial_dim

        def dx(func, point):
            cols = []
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = h
                cols.append((func(point + e) - func(point - e)) / (2 * h))
            return np.stack(cols, axis=-1)

        def dt(func, point):
            return (func(point, t + h) - func(point, t - h)) / (2 * h)

        xi_t = lambda p, s=t: self.xi(p, s)
        xi_sq = lambda p, s=t: np.sum(self.xi(p, s) ** 2, axis=-1)
        H = self.H_ext(x, t)
        xi = self.xi(x, t)

        jac_xi = dx(lambda p: self.xi(p, t), x)  # [..., i, j] = ∂_j ξ_i
        jac_H = dx(lambda p: self.H_ext(p, t), x)
        grad_d = dx(lambda p: np.asarray(self.d_Sigma(p, t)), x)

        res_a = np.trace(jac_xi, axis1=-2, axis2=-1) + np.sum(H * xi, axis=-1)
        res_b = dt(lambda p, s: np.asarray(self.d_Sigma(p, s)), x) + np.sum(H * grad_d, axis=-1)
        transport = np.einsum("...ij,...j->...i", jac_xi, H)
        stretch = np.einsum("...ij,...i->...j", jac_H, xi)
        res_c = np.linalg.norm(dt(xi_t, x) + transport + stretch, axis=-1)
        res_d = dt(xi_sq, x) + np.sum(H * dx(lambda p: xi_sq(p, t), x), axis=-1)

        per_sample = np.abs(np.stack([res_a, res_b, res_c, res_d], axis=-1))
        report = IdentityReport(
            t=t,
            fd_step=h,
            residual_a=float(per_sample[:, 0].max()),
            residual_b=float(per_sample[:, 1].max()),
            residual_c=float(per_sample[:, 2].max()),
            residual_d=float(per_sample[:, 3].max()),
            d_sigma=d_sigma,
            per_sample=per_sample,
        )
        logger.info(
            f"Identidades en t={t}: a={report.residual_a:.3e}, b={report.residual_b:.3e}, "
            f"c={report.residual_c:.3e}, d={report.residual_d:.3e}"
        )
        return report
