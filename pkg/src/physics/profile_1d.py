"""
Problemas de conexión unidimensionales: tensión superficial c_F, perfil
óptimo α y acción de conexión mínima C_F(p⁺, p⁻) por relajación de caminos.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import PchipInterpolator

from src.errors import EndpointOffManifold, EndpointSingularity, NoConvergence, QuadratureFailure
from src.physics.ramps import Ramp

if TYPE_CHECKING:
    from src.physics.potential import Potential

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-10
SPLICE_LEVEL = 1e-6
SPLICE_TOL = 1e-8
CLAMP_TOL = 1e-13


def adaptive_integral(func, a: float, b: float, tol: float = QUAD_TOL, points=None) -> float:
    """
    Integral adaptativa con scipy.integrate.quad.

    Raises:
        QuadratureFailure: si el error estimado supera tol
    """
    if b <= a:
        return 0.0
    inner = None
    if points is not None:
        inner = [p for p in points if a < p < b] or None
    result = quad(func, a, b, epsabs=tol / 10, epsrel=1e-12, limit=500, points=inner, full_output=1)
    value, abserr = result[0], result[1]
    if abserr > tol or not math.isfinite(value):
        raise QuadratureFailure(
            f"∫[{a:.6g}, {b:.6g}] con error estimado {abserr:.3g} > {tol:.3g}"
        )
    return float(value)


def compute_cF(ramp: Ramp, gap: float, tol: float = QUAD_TOL) -> float:
    """c_F = 2∫₀^{dist_m/2} √(2f(λ²)) dλ."""
    integrand = lambda lam: math.sqrt(2.0 * ramp.value(lam * lam))
    return 2.0 * adaptive_integral(integrand, 0.0, gap / 2, tol, points=[ramp.delta0])


def compute_cF_tilde(ramp: Ramp, gap: float, tol: float = QUAD_TOL) -> float:
    """c_F̃ = 2∫₀^{dist_m/2} √(2F̃(λ)) dλ; coincide con c_F."""
    integrand = lambda lam: math.sqrt(2.0 * ramp.centralized(gap, lam))
    return 2.0 * adaptive_integral(integrand, 0.0, gap / 2, tol, points=[gap / 2 - ramp.delta0])


@dataclass
class ProfileTable:
    """Perfil óptimo α tabulado sobre una malla simétrica en s."""
    s_grid: np.ndarray
    alpha: np.ndarray
    alpha_prime: np.ndarray
    s_max: float
    tail_rate: float
    gap: float
    s_splice: float
    _alpha_interp: PchipInterpolator = field(init=False, repr=False)
    _prime_interp: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        self._alpha_interp = PchipInterpolator(self.s_grid, self.alpha, extrapolate=False)
        self._prime_interp = PchipInterpolator(self.s_grid, self.alpha_prime, extrapolate=False)

    @property
    def spacing(self) -> float:
        return float(self.s_grid[1] - self.s_grid[0])

    def eval_alpha(self, s):
        """α(s); recortado a ±dist_m/2 fuera de ±s_max."""
        s_arr = np.asarray(s, dtype=float)
        inside = np.abs(s_arr) < self.s_max
        value = np.where(inside, self._alpha_interp(np.clip(s_arr, -self.s_max, self.s_max)),
                         np.sign(s_arr) * self.gap / 2)
        return float(value) if np.ndim(s) == 0 else value

    def eval_alpha_prime(self, s):
        """α'(s); cero fuera de ±s_max."""
        s_arr = np.asarray(s, dtype=float)
        inside = np.abs(s_arr) < self.s_max
        value = np.where(inside, self._prime_interp(np.clip(s_arr, -self.s_max, self.s_max)), 0.0)
        return float(value) if np.ndim(s) == 0 else value

    def ode_residual(self, ramp: Ramp) -> float:
        """max |α' − √(2F̃(α))| con α' por diferencias centradas en nodos interiores."""
        ds = self.spacing
        deriv = (self.alpha[2:] - self.alpha[:-2]) / (2 * ds)
        target = np.sqrt(2.0 * ramp.centralized(self.gap, self.alpha[1:-1]))
        return float(np.max(np.abs(deriv - target)))

    def second_order_residual(self, ramp: Ramp) -> float:
        """max |α'' − F̃'(α)| con segundas diferencias."""
        ds = self.spacing
        second = (self.alpha[2:] - 2 * self.alpha[1:-1] + self.alpha[:-2]) / ds**2
        target = ramp.centralized_derivative(self.gap, self.alpha[1:-1])
        return float(np.max(np.abs(second - target)))

    def tail_constant(self) -> float:
        """C mínima con |α(s) ∓ dist_m/2| ≤ C·e^{−tail_rate·|s|} sobre la tabla."""
        y = self.gap / 2 - np.abs(self.alpha)
        return float(np.max(y * np.exp(self.tail_rate * np.abs(self.s_grid))))


def build_profile(ramp: Ramp, gap: float, spacing: float | None = None) -> ProfileTable:
    """
    Tabula α resolviendo α' = √(2F̃(α)), α(0) = 0.

    En la meseta (F̃ = c3) α es lineal; en la cola se integra la distancia al
    pozo y = dist_m/2 − α hasta que F̃ < 1e−6·c3, y desde ahí se empalma la
    forma exponencial cerrada de la linealización F̃ ≈ c4·y².

    Raises:
        EndpointSingularity: si el tiempo del empalme no coincide con la
            inversión por cuadratura s(a) = ∫₀^a dλ/√(2F̃(λ))
    """
    half = gap / 2
    delta0 = ramp.delta0
    speed = math.sqrt(2.0 * ramp.c3)
    rate = math.sqrt(2.0 * ramp.c4)
    s_plateau = (half - delta0) / speed

    def rhs(_s, y):
        return [-math.sqrt(2.0 * ramp.value(max(y[0], 0.0) ** 2))]

    def reached_splice(_s, y):
        return ramp.value(max(y[0], 0.0) ** 2) - SPLICE_LEVEL * ramp.c3

    reached_splice.terminal = True
    reached_splice.direction = -1

    sol = solve_ivp(
        rhs,
        (s_plateau, s_plateau + 200.0 / rate),
        [delta0],
        method="DOP853",
        rtol=1e-13,
        atol=1e-17,
        dense_output=True,
        events=reached_splice,
    )
    if not sol.t_events[0].size:
        raise EndpointSingularity("la cola no alcanzó el nivel de empalme")
    s_splice = float(sol.t_events[0][0])
    y_splice = float(sol.y_events[0][0][0])

    tail_integrand = lambda y: 1.0 / math.sqrt(2.0 * ramp.value(y * y))
    s_quad = s_plateau + adaptive_integral(tail_integrand, y_splice, delta0, tol=1e-11)
    if abs(s_quad - s_splice) > SPLICE_TOL:
        raise EndpointSingularity(
            f"empalme en s={s_splice:.12g} vs cuadratura s={s_quad:.12g}"
        )

    s_max = s_splice + math.log(y_splice / CLAMP_TOL) / rate
    if spacing is None:
        spacing = 1e-3 * min(1.0 / rate, half / speed)
    n_half = int(math.ceil(s_max / spacing))
    ds = s_max / n_half
    s_pos = ds * np.arange(n_half + 1)

    y = np.empty_like(s_pos)
    plateau = s_pos <= s_plateau
    tail = s_pos >= s_splice
    middle = ~plateau & ~tail
    y[plateau] = half - speed * s_pos[plateau]
    y[middle] = sol.sol(s_pos[middle])[0]
    y[tail] = y_splice * np.exp(-rate * (s_pos[tail] - s_splice))

    alpha_pos = half - y
    alpha_pos[0] = 0.0
    alpha_pos[-1] = half
    prime_pos = np.sqrt(2.0 * ramp.value(np.maximum(y, 0.0) ** 2))
    prime_pos[-1] = 0.0

    s_grid = np.concatenate([-s_pos[:0:-1], s_pos])
    alpha = np.concatenate([-alpha_pos[:0:-1], alpha_pos])
    alpha_prime = np.concatenate([prime_pos[:0:-1], prime_pos])

    fit_mask = (s_pos >= s_splice) & (y > 1e-9)
    if np.count_nonzero(fit_mask) >= 2:
        slope, _ = np.polyfit(s_pos[fit_mask], np.log(y[fit_mask]), 1)
        tail_rate = -float(slope)
    else:
        tail_rate = rate

    logger.info(
        f"Perfil α: s_max={s_max:.6g}, ds={ds:.3g}, nodos={s_grid.size}, tasa de cola={tail_rate:.6g}"
    )
    return ProfileTable(s_grid, alpha, alpha_prime, s_max, tail_rate, gap, s_splice)


# ---------- conexiones mínimas ----------

@dataclass
class ConnectionResult:
    """Resultado de la relajación de un camino."""
    action: float
    action_trapezoid: float
    path: np.ndarray
    s_grid: np.ndarray
    iterations: int
    gradient_norm: float


def _discrete_action(potential: Potential, path: np.ndarray, ds: float) -> tuple[float, float]:
    """(acción con potencial en extremo izquierdo, variante trapecio)."""
    steps = np.diff(path, axis=0)
    kinetic = 0.5 * math.fsum(np.sum(steps * steps, axis=-1)) / ds
    energy = potential.F_eval(path)
    left = ds * math.fsum(energy[:-1])
    trapezoid = ds * 0.5 * math.fsum(energy[:-1] + energy[1:])
    return kinetic + left, kinetic + trapezoid


def _action_and_gradient(potential: Potential, path: np.ndarray, ds: float) -> tuple[float, np.ndarray]:
    action, _ = _discrete_action(potential, path, ds)
    grad = np.zeros_like(path)
    grad[1:-1] = (2 * path[1:-1] - path[:-2] - path[2:]) / ds + ds * potential.grad_F(path[1:-1])
    return action, grad


def minimal_connection(
    potential: Potential,
    p_plus,
    p_minus,
    nodes: int = 2001,
    s_half: float | None = None,
    profile: ProfileTable | None = None,
    max_iter: int = 100_000,
    gtol: float = 1e-8,
) -> ConnectionResult:
    """
    Minimiza la acción discreta Σ(½|γ_{k+1}−γ_k|²/Δs + F(γ_k)Δs) con extremos fijos.

    Descenso de gradiente con búsqueda de Armijo; el paso de prueba es el de
    Barzilai–Borwein. El camino inicial es el segmento recto de p⁻ a p⁺
    parametrizado por el perfil óptimo.

    Args:
        potential: Potencial F
        p_plus: Extremo sobre m₊ (en s = +s_half)
        p_minus: Extremo sobre m₋ (en s = −s_half)
        nodes: Número impar de nodos, ≥ 101
        s_half: Semilongitud del intervalo; por defecto 10·s_max
        profile: Perfil ya construido (se construye si falta)

    Returns:
        ConnectionResult con la acción convergida y el camino
    """
    manifold = potential.manifold
    p_plus = np.asarray(p_plus, dtype=float)
    p_minus = np.asarray(p_minus, dtype=float)
    if abs(manifold.plus.signed_distance(p_plus)) > 1e-9:
        raise EndpointOffManifold(f"p⁺={p_plus.tolist()} no está sobre m₊")
    if abs(manifold.minus.signed_distance(p_minus)) > 1e-9:
        raise EndpointOffManifold(f"p⁻={p_minus.tolist()} no está sobre m₋")
    if nodes < 101 or nodes % 2 == 0:
        raise ValueError(f"nodes debe ser impar y ≥ 101, recibido {nodes}")

    if profile is None:
        profile = potential.profile()
    if s_half is None:
        s_half = 10.0 * profile.s_max
    if s_half < 3.0 * profile.s_max:
        raise ValueError(f"s_half={s_half} < 3·s_max={3 * profile.s_max:.6g}")

    s_grid = np.linspace(-s_half, s_half, nodes)
    ds = float(s_grid[1] - s_grid[0])
    theta = profile.eval_alpha(s_grid) / manifold.gap + 0.5
    path = p_minus + theta[:, None] * (p_plus - p_minus)
    path[0], path[-1] = p_minus, p_plus

    action, grad = _action_and_gradient(potential, path, ds)
    step = ds / 4
    gnorm = float(np.linalg.norm(grad))
    iterations = 0
    while gnorm > gtol:
        if iterations >= max_iter:
            raise NoConvergence(
                f"{max_iter} iteraciones sin converger (|∇A|={gnorm:.3g})"
            )
        t = step
        while True:
            trial = path - t * grad
            trial_action, trial_grad = _action_and_gradient(potential, trial, ds)
            # tolerancia de redondeo en la comparación de acciones
            if trial_action <= action - 1e-4 * t * gnorm**2 + 1e-14 * abs(action):
                break
            t *= 0.5
            if t < 1e-30:
                raise NoConvergence("la búsqueda lineal no encontró descenso")

        s_vec = (trial - path).ravel()
        y_vec = (trial_grad - grad).ravel()
        sy = float(s_vec @ y_vec)
        step = float(s_vec @ s_vec) / sy if sy > 0 else 2 * t

        path, action, grad = trial, trial_action, trial_grad
        gnorm = float(np.linalg.norm(grad))
        iterations += 1
        if iterations % 1000 == 0:
            logger.debug(f"Relajación: iter={iterations}, A={action:.12g}, |∇A|={gnorm:.3g}")

    left, trapezoid = _discrete_action(potential, path, ds)
    logger.info(f"Conexión relajada en {iterations} iteraciones: acción={left:.10g}")
    return ConnectionResult(left, trapezoid, path, s_grid, iterations, gnorm)


@dataclass
class SampledInfimum:
    """Ínfimo muestreado de C_F sobre m₊ × m₋."""
    value: float
    p_plus: np.ndarray
    p_minus: np.ndarray
    actions: np.ndarray


def sampled_connection_infimum(
    potential: Potential,
    samples: int,
    nodes: int = 401,
    s_half: float | None = None,
    max_workers: int = 1,
    gtol: float = 1e-8,
) -> SampledInfimum:
    """
    Relaja todos los pares de muestras de m₊ × m₋ y devuelve el menor valor.

    No es un mínimo global certificado; solo una comprobación por muestreo.
    """
    profile = potential.profile()
    plus_points = potential.manifold.sample_component("+", samples)
    minus_points = potential.manifold.sample_component("-", samples)

    def relax(pair):
        i, j = pair
        return minimal_connection(
            potential, plus_points[i], minus_points[j], nodes, s_half, profile, gtol=gtol
        ).action

    pairs = [(i, j) for i in range(len(plus_points)) for j in range(len(minus_points))]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        values = list(pool.map(relax, pairs))

    actions = np.array(values).reshape(len(plus_points), len(minus_points))
    i, j = np.unravel_index(np.argmin(actions), actions.shape)
    logger.info(f"Ínfimo muestreado sobre {actions.size} pares: {actions[i, j]:.10g}")
    return SampledInfimum(float(actions[i, j]), plus_points[i], minus_points[j], actions)
