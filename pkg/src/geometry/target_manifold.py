"""
Geometría de los pozos m± en el espacio objetivo ℝⁿ.

Cada pozo sabe calcular su distancia con signo (positiva dentro del dominio
encerrado U±), el gradiente unitario de esa distancia y la proyección al
punto más cercano. Todas las operaciones aceptan arrays de forma (..., n)
para poder evaluarse nodo a nodo sobre una malla completa.
"""
import logging
from dataclasses import dataclass
from typing import Literal, Protocol

import numpy as np

from src.errors import ConfigInvalid, NotOnManifold, OutsideHalfTubes, OutsideTube

logger = logging.getLogger(__name__)

Side = Literal["+", "-"]

PARALLEL_TOL = 1e-12


class Well(Protocol):
    """Interfaz común de una componente m±."""

    ambient_dim: int

    @property
    def reach(self) -> float: ...

    @property
    def curvature(self) -> float: ...

    def signed_distance(self, u: np.ndarray) -> np.ndarray: ...

    def gradient(self, u: np.ndarray) -> np.ndarray: ...

    def support_point(self, direction: np.ndarray) -> np.ndarray: ...


def _unit(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normaliza en el último eje; devuelve (unitario, norma). Vector nulo -> 0."""
    norm = np.asarray(np.linalg.norm(v, axis=-1))
    safe = np.where(norm > 0.0, norm, 1.0)
    unit = v / np.expand_dims(safe, -1)
    unit = np.where(np.expand_dims(norm > 0.0, -1), unit, 0.0)
    return unit, norm


def closest_points_on_segments(
    p0: np.ndarray, p1: np.ndarray, q0: np.ndarray, q1: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Puntos más cercanos entre los segmentos [p0, p1] y [q0, q1].

    Returns:
        (punto en el primer segmento, punto en el segundo)
    """
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)

    if a <= 0.0 and e <= 0.0:
        return p0.copy(), q0.copy()
    if a <= 0.0:
        s = 0.0
        t = float(np.clip(f / e, 0.0, 1.0))
    else:
        c = float(d1 @ r)
        if e <= 0.0:
            t = 0.0
            s = float(np.clip(-c / a, 0.0, 1.0))
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            s = float(np.clip((b * f - c * e) / denom, 0.0, 1.0)) if denom > 0.0 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = float(np.clip(-c / a, 0.0, 1.0))
            elif t > 1.0:
                t = 1.0
                s = float(np.clip((b - c) / a, 0.0, 1.0))
    return p0 + s * d1, q0 + t * d2


@dataclass(frozen=True, eq=False)
class SphereWell:
    """Esfera de centro c y radio r; U es la bola abierta."""
    center: np.ndarray
    radius: float

    @property
    def ambient_dim(self) -> int:
        return self.center.shape[0]

    @property
    def reach(self) -> float:
        return self.radius

    @property
    def curvature(self) -> float:
        return 1.0 / self.radius

    def signed_distance(self, u: np.ndarray) -> np.ndarray:
        return self.radius - np.linalg.norm(u - self.center, axis=-1)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        unit, _ = _unit(u - self.center)
        return -unit

    def support_point(self, direction: np.ndarray) -> np.ndarray:
        return self.center + self.radius * direction


@dataclass(frozen=True, eq=False)
class CapsuleWell:
    """Cápsula: puntos a distancia r del segmento [a, b]."""
    a: np.ndarray
    b: np.ndarray
    radius: float

    @property
    def ambient_dim(self) -> int:
        return self.a.shape[0]

    @property
    def reach(self) -> float:
        return self.radius

    @property
    def curvature(self) -> float:
        return 1.0 / self.radius

    def _nearest_on_segment(self, u: np.ndarray) -> np.ndarray:
        axis = self.b - self.a
        length2 = float(axis @ axis)
        if length2 == 0.0:
            return np.broadcast_to(self.a, u.shape)
        t = np.asarray(np.clip(((u - self.a) @ axis) / length2, 0.0, 1.0))
        return self.a + np.expand_dims(t, -1) * axis

    def signed_distance(self, u: np.ndarray) -> np.ndarray:
        q = self._nearest_on_segment(u)
        return self.radius - np.linalg.norm(u - q, axis=-1)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        unit, _ = _unit(u - self._nearest_on_segment(u))
        return -unit

    def support_point(self, direction: np.ndarray) -> np.ndarray:
        ha = float(direction @ self.a)
        hb = float(direction @ self.b)
        if abs(ha - hb) <= PARALLEL_TOL:
            base = 0.5 * (self.a + self.b)
        else:
            base = self.a if ha > hb else self.b
        return base + self.radius * direction


@dataclass(frozen=True, eq=False)
class PointWell:
    """Pozo puntual (caso escalar n=1); no encierra dominio."""
    a: np.ndarray

    @property
    def ambient_dim(self) -> int:
        return self.a.shape[0]

    @property
    def reach(self) -> float:
        return float("inf")

    @property
    def curvature(self) -> float:
        return 0.0

    def signed_distance(self, u: np.ndarray) -> np.ndarray:
        return -np.linalg.norm(u - self.a, axis=-1)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        unit, _ = _unit(u - self.a)
        return -unit

    def support_point(self, direction: np.ndarray) -> np.ndarray:
        return self.a.copy()


@dataclass(frozen=True)
class MinimalSets:
    """
    Descripción analítica de M±.

    Para kind="point" cada array tiene una fila; para kind="segment" tiene
    dos filas (extremos) y el conjunto es el segmento que las une.
    """
    kind: Literal["point", "segment"]
    plus: np.ndarray
    minus: np.ndarray
    direction: np.ndarray  # de M₊ hacia M₋, unitario

    def sample(self, count: int) -> tuple[np.ndarray, np.ndarray]:
        """Pares mínimos equiespaciados (p⁺_k, p⁻_k)."""
        if self.kind == "point":
            return (np.repeat(self.plus, count, axis=0), np.repeat(self.minus, count, axis=0))
        t = np.linspace(0.0, 1.0, count)[:, None]
        plus = (1 - t) * self.plus[0] + t * self.plus[1]
        minus = (1 - t) * self.minus[0] + t * self.minus[1]
        return plus, minus


class ManifoldPair:
    """
    Par de pozos disjuntos m₊, m₋ ⊂ ℝⁿ con la geometría que los usa el resto
    del laboratorio: distancias, proyecciones, gap y conjuntos mínimos.
    """

    def __init__(self, kind: str, plus: Well, minus: Well, tube_radius: float | None = None):
        if plus.ambient_dim != minus.ambient_dim:
            raise ConfigInvalid("manifold", "las dos componentes viven en dimensiones distintas")
        self.kind = kind
        self.plus = plus
        self.minus = minus
        self.ambient_dim = plus.ambient_dim
        self._minimal = self._compute_minimal_sets()
        self.gap = float(np.linalg.norm(self._minimal.plus[0] - self._minimal.minus[0]))

        if not self.gap > 0.0:
            raise ConfigInvalid("manifold", "las componentes se tocan o están anidadas (gap ≤ 0)")

        limit = min(plus.reach, minus.reach, self.gap / 2)
        if tube_radius is None:
            tube_radius = 0.25 * limit
        if not (tube_radius > 0.0 and 2 * tube_radius < limit):
            raise ConfigInvalid(
                "manifold.tube_radius",
                f"se requiere 0 < 2·δ₀ < {limit:.6g}, recibido δ₀={tube_radius}",
            )
        self.tube_radius = float(tube_radius)
        logger.debug(f"ManifoldPair {kind}: gap={self.gap:.6g}, δ₀={self.tube_radius:.6g}")

    # ---------- constructores ----------

    @classmethod
    def two_spheres(
        cls,
        center_plus,
        radius_plus: float,
        center_minus,
        radius_minus: float,
        tube_radius: float | None = None,
    ) -> "ManifoldPair":
        c_plus = np.asarray(center_plus, dtype=float)
        c_minus = np.asarray(center_minus, dtype=float)
        if np.linalg.norm(c_plus - c_minus) <= radius_plus + radius_minus:
            raise ConfigInvalid("manifold", "las esferas se cortan o están anidadas")
        return cls(
            "two_spheres",
            SphereWell(c_plus, float(radius_plus)),
            SphereWell(c_minus, float(radius_minus)),
            tube_radius,
        )

    @classmethod
    def two_capsules(
        cls,
        segment_plus,
        radius_plus: float,
        segment_minus,
        radius_minus: float,
        tube_radius: float | None = None,
    ) -> "ManifoldPair":
        a_plus, b_plus = (np.asarray(p, dtype=float) for p in segment_plus)
        a_minus, b_minus = (np.asarray(p, dtype=float) for p in segment_minus)
        q_plus, q_minus = closest_points_on_segments(a_plus, b_plus, a_minus, b_minus)
        if np.linalg.norm(q_plus - q_minus) <= radius_plus + radius_minus:
            raise ConfigInvalid("manifold", "las cápsulas se cortan")
        return cls(
            "two_capsules",
            CapsuleWell(a_plus, b_plus, float(radius_plus)),
            CapsuleWell(a_minus, b_minus, float(radius_minus)),
            tube_radius,
        )

    @classmethod
    def two_points(cls, a_plus, a_minus, tube_radius: float | None = None) -> "ManifoldPair":
        a_plus = np.atleast_1d(np.asarray(a_plus, dtype=float))
        a_minus = np.atleast_1d(np.asarray(a_minus, dtype=float))
        if a_plus.shape != (1,):
            raise ConfigInvalid("manifold", "two_points requiere n = 1")
        return cls("two_points", PointWell(a_plus), PointWell(a_minus), tube_radius)

    # ---------- distancias ----------

    def component(self, side: Side) -> Well:
        return self.plus if side == "+" else self.minus

    def signed_dist_component(self, u, side: Side):
        """d_{m±}(u): positiva en U±, negativa fuera, cero sobre el pozo."""
        value = self.component(side).signed_distance(np.asarray(u, dtype=float))
        return float(value) if np.ndim(value) == 0 else value

    def distances(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(d₊(u), d₋(u)) con signo."""
        return self.plus.signed_distance(u), self.minus.signed_distance(u)

    def dist_to_m(self, u: np.ndarray) -> np.ndarray:
        d_plus, d_minus = self.distances(u)
        return np.minimum(np.abs(d_plus), np.abs(d_minus))

    def nearest(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Componente más cercana, nodo a nodo.

        Returns:
            (is_plus, d con signo de esa componente, ∂d de esa componente)
        """
        d_plus, d_minus = self.distances(u)
        is_plus = np.abs(d_plus) <= np.abs(d_minus)
        d = np.where(is_plus, d_plus, d_minus)
        grad = np.where(np.expand_dims(is_plus, -1), self.plus.gradient(u), self.minus.gradient(u))
        return is_plus, d, grad

    def signed_dist_m(self, u) -> tuple[Side, float]:
        """
        Rama activa de d_m y su valor. En el conjunto equidistante gana '+'.
        """
        u = np.asarray(u, dtype=float)
        d_plus, d_minus = self.distances(u)
        half = self.gap / 2
        if abs(d_plus) <= half:
            return "+", float(d_plus)
        if abs(d_minus) <= half:
            return "-", float(d_minus)
        raise OutsideHalfTubes(
            f"u={u.tolist()} está a más de dist_m/2={half:.6g} de ambos pozos"
        )

    def project_m(self, u):
        """Proyección al punto más cercano de m; requiere dist(u, m) < 2δ₀."""
        u = np.asarray(u, dtype=float)
        _, d, grad = self.nearest(u)
        if np.any(np.abs(d) >= 2 * self.tube_radius):
            raise OutsideTube(f"dist(u, m) ≥ 2δ₀ = {2 * self.tube_radius:.6g}")
        return u - np.expand_dims(d, -1) * grad

    def project_component(self, u: np.ndarray, side: Side) -> np.ndarray:
        """Proyección sobre m_side sin chequeo de tubo."""
        well = self.component(side)
        d = well.signed_distance(u)
        return u - np.expand_dims(d, -1) * well.gradient(u)

    # ---------- conjuntos mínimos ----------

    def _compute_minimal_sets(self) -> MinimalSets:
        if isinstance(self.plus, SphereWell) and isinstance(self.minus, SphereWell):
            w, _ = _unit(self.minus.center - self.plus.center)
            p = self.plus.center + self.plus.radius * w
            q = self.minus.center - self.minus.radius * w
            return MinimalSets("point", p[None], q[None], w)

        if isinstance(self.plus, PointWell) and isinstance(self.minus, PointWell):
            w, _ = _unit(self.minus.a - self.plus.a)
            return MinimalSets("point", self.plus.a[None], self.minus.a[None], w)

        if isinstance(self.plus, CapsuleWell) and isinstance(self.minus, CapsuleWell):
            return self._capsule_minimal_sets()

        raise ConfigInvalid("manifold", "combinación de tipos de pozo no soportada")

    def _capsule_minimal_sets(self) -> MinimalSets:
        cp, cm = self.plus, self.minus
        d1 = cp.b - cp.a
        d2 = cm.b - cm.a
        q_plus, q_minus = closest_points_on_segments(cp.a, cp.b, cm.a, cm.b)
        separation = float(np.linalg.norm(q_minus - q_plus))

        a, e, b = float(d1 @ d1), float(d2 @ d2), float(d1 @ d2)
        parallel = a > 0 and e > 0 and b * b >= (1 - PARALLEL_TOL) * a * e
        if parallel:
            # tramo de [a₊, b₊] que enfrenta al otro segmento
            t0 = float((cm.a - cp.a) @ d1) / a
            t1 = float((cm.b - cp.a) @ d1) / a
            lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
            if hi > lo + PARALLEL_TOL:
                start = cp.a + lo * d1
                end = cp.a + hi * d1
                _, foot = closest_points_on_segments(start, start, cm.a, cm.b)
                w, offset = _unit(foot - start)
                if abs(offset - separation) <= 1e-12 * max(1.0, separation):
                    gap = separation - cp.radius - cm.radius
                    plus = np.stack([start, end]) + cp.radius * w
                    return MinimalSets("segment", plus, plus + gap * w, w)

        w, _ = _unit(q_minus - q_plus)
        return MinimalSets(
            "point", (q_plus + cp.radius * w)[None], (q_minus - cm.radius * w)[None], w
        )

    def minimal_sets(self) -> MinimalSets:
        return self._minimal

    def is_minimal_pair(self, p_plus, p_minus, tol: float = 1e-9) -> bool:
        p_plus = np.asarray(p_plus, dtype=float)
        p_minus = np.asarray(p_minus, dtype=float)
        if abs(self.plus.signed_distance(p_plus)) > tol:
            raise NotOnManifold(f"p⁺={p_plus.tolist()} no está sobre m₊")
        if abs(self.minus.signed_distance(p_minus)) > tol:
            raise NotOnManifold(f"p⁻={p_minus.tolist()} no está sobre m₋")
        return bool(abs(np.linalg.norm(p_plus - p_minus) - self.gap) <= tol)

    def minimal_partner(self, p_plus, tol: float = 1e-9) -> np.ndarray | None:
        """
        Punto q ∈ m₋ tal que (p⁺, q) es par mínimo, o None si p⁺ ∉ M₊.

        Raises:
            NotOnManifold: si p⁺ no está sobre m₊
        """
        p_plus = np.asarray(p_plus, dtype=float)
        if abs(float(self.plus.signed_distance(p_plus))) > tol:
            raise NotOnManifold(f"p⁺={p_plus.tolist()} no está sobre m₊")
        candidate = p_plus + self.gap * self._minimal.direction
        if abs(float(self.minus.signed_distance(candidate))) > tol:
            return None
        return candidate if self.is_minimal_pair(p_plus, candidate, tol) else None

    # ---------- utilidades ----------

    @property
    def curvature_bound(self) -> float:
        return max(self.plus.curvature, self.minus.curvature)

    def sample_component(self, side: Side, count: int, seed: int = 0) -> np.ndarray:
        """
        Muestras de m_side: equiangulares en n=2, Fibonacci en n=3 y direcciones
        normales aleatorias (semilla fija) en n > 3.
        """
        well = self.component(side)
        n = self.ambient_dim
        if n == 1:
            return well.support_point(np.ones(1))[None]
        if n == 2:
            theta = 2 * np.pi * np.arange(count) / count
            directions = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        elif n == 3:
            k = np.arange(count) + 0.5
            z = 1 - 2 * k / count
            phi = np.pi * (1 + 5**0.5) * k
            rho = np.sqrt(1 - z**2)
            directions = np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)
        else:
            rng = np.random.default_rng(seed)
            directions = rng.standard_normal((count, n))
            directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
        return np.stack([well.support_point(w) for w in directions])
