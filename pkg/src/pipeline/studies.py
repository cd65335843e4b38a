"""
Estudios sin integración temporal: perfil óptimo, conexión mínima, dato
inicial bien preparado e identidades geométricas.

Cada función devuelve un resultado con success/error y escribe sus tablas
en el directorio de salida; nada se lanza hacia la CLI.
"""
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from src.analysis.diagnostics import DiagnosticsContext
from src.config.run_config import RunConfig, build_setup, validate_config
from src.config.settings import SIL_OUTPUT_DIR, SIL_THREADS
from src.errors import LabError
from src.geometry.interface import InterfaceDescriptor
from src.physics.potential import Potential
from src.physics.profile_1d import (
    compute_cF_tilde,
    minimal_connection,
    sampled_connection_infimum,
)
from src.pipeline.export import write_csv, write_json

logger = logging.getLogger(__name__)

CF_TOL = 1e-8
ODE_TOL = 1e-6
SECOND_ORDER_TOL = 1e-5
ODD_TOL = 1e-12
CLAMP_TOL = 1e-12
ACTION_REL_TOL = 5e-3
SEGMENT_TOL = 1e-3
INIT_RATIO_MAX = 3.0
INIT_EPS = (0.08, 0.04, 0.02)
FD_STEPS = 3
EXACT_RESIDUAL = 1e-11
RICHARDSON_MIN = 1.8


@dataclass
class StudyResult:
    """Resultado de un estudio: valores escalares, banderas y archivos."""
    success: bool
    name: str = ""
    values: dict = field(default_factory=dict)
    flags: dict[str, bool] = field(default_factory=dict)
    paths: dict[str, Path] = field(default_factory=dict)
    duration_seconds: float = 0
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.success and all(self.flags.values())


@dataclass
class GeometryCheckResult(StudyResult):
    """Residuos por paso de diferencias y pendientes de Richardson."""
    reports: list[dict] = field(default_factory=list)
    slopes: dict[str, float] = field(default_factory=dict)


def _output_dir(config: RunConfig, output_dir) -> Path:
    return Path(output_dir or config.output_dir or SIL_OUTPUT_DIR)


def _failure(cls, config: RunConfig, exc: LabError, start_time: datetime):
    logger.error(f"Estudio abortado: {type(exc).__name__}: {exc}")
    return cls(
        success=False,
        name=config.name,
        error=f"{type(exc).__name__}: {exc}",
        duration_seconds=(datetime.now() - start_time).total_seconds(),
    )


def _potential(config: RunConfig) -> Potential:
    manifold = config.manifold.build()
    return config.potential.build(manifold)


# ---------- perfil óptimo ----------

def run_profile(config: RunConfig, output_dir: str | Path | None = None) -> StudyResult:
    """c_F por ambas fórmulas y perfil α con sus residuos."""
    start_time = datetime.now()
    out = _output_dir(config, output_dir)
    logger.info("=" * 60)
    logger.info(f"PERFIL ÓPTIMO: {config.name}")
    logger.info("=" * 60)
    try:
        potential = _potential(config)
        ramp, gap = potential.ramp, potential.manifold.gap
        cF = potential.cF
        cF_tilde = compute_cF_tilde(ramp, gap)
        profile = potential.profile()

        half = gap / 2
        values = {
            "cF": cF,
            "cF_tilde": cF_tilde,
            "cF_gap": abs(cF - cF_tilde),
            "ode_residual": profile.ode_residual(ramp),
            "second_order_residual": profile.second_order_residual(ramp),
            "oddness": float(np.max(np.abs(profile.alpha + profile.alpha[::-1]))),
            "clamp_error": float(max(
                abs(profile.eval_alpha(profile.s_max) - half),
                abs(profile.eval_alpha(-profile.s_max) + half),
            )),
            "s_max": profile.s_max,
            "tail_rate": profile.tail_rate,
            "tail_constant": profile.tail_constant(),
            "nodes": int(profile.s_grid.size),
        }
        flags = {
            "cF_consistente": values["cF_gap"] <= CF_TOL,
            "residuo_ode": values["ode_residual"] <= ODE_TOL,
            "residuo_segundo_orden": values["second_order_residual"] <= SECOND_ORDER_TOL,
            "imparidad": values["oddness"] <= ODD_TOL,
            "recorte_extremos": values["clamp_error"] <= CLAMP_TOL,
            "cola_exponencial": values["tail_rate"] > 0,
        }
        table = pd.DataFrame({
            "s": profile.s_grid,
            "alpha": profile.alpha,
            "alpha_prime": profile.alpha_prime,
        })
        paths = {
            "table": write_csv(table, out / "profile.csv").path,
            "summary": write_json({"name": config.name, "values": values, "flags": flags},
                                  out / "profile.json").path,
        }
    except LabError as exc:
        return _failure(StudyResult, config, exc, start_time)

    logger.info(f"c_F={cF:.12g}, |c_F − c_F̃|={values['cF_gap']:.3e}")
    return StudyResult(
        success=True,
        name=config.name,
        values=values,
        flags=flags,
        paths=paths,
        duration_seconds=(datetime.now() - start_time).total_seconds(),
    )


# ---------- conexión mínima ----------

def segment_distance(path: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distancia de cada nodo del camino al segmento [a, b]."""
    ab = b - a
    t = np.clip((path - a) @ ab / float(ab @ ab), 0.0, 1.0)
    return np.linalg.norm(path - a - t[:, None] * ab, axis=-1)


def run_connect(config: RunConfig, output_dir: str | Path | None = None,
                workers: int = SIL_THREADS) -> StudyResult:
    """
    Relaja el camino entre connection.p_plus y connection.p_minus (por
    defecto el primer par mínimo). Si los extremos forman un par mínimo se
    exige acción ≈ c_F y camino recto; si no, exceso positivo sobre c_F.
    Con connection.samples > 0 añade el ínfimo muestreado.
    """
    start_time = datetime.now()
    out = _output_dir(config, output_dir)
    spec = config.connection
    logger.info("=" * 60)
    logger.info(f"CONEXIÓN MÍNIMA: {config.name}")
    logger.info("=" * 60)
    try:
        potential = _potential(config)
        manifold = potential.manifold
        minimal = manifold.minimal_sets()
        p_plus = np.asarray(spec.p_plus if spec.p_plus is not None else minimal.plus[0], dtype=float)
        p_minus = np.asarray(spec.p_minus if spec.p_minus is not None else minimal.minus[0], dtype=float)
        is_minimal = manifold.is_minimal_pair(p_plus, p_minus)

        result = minimal_connection(potential, p_plus, p_minus, nodes=spec.nodes, s_half=spec.s_half)
        cF = potential.cF
        deviation = segment_distance(result.path, p_minus, p_plus)
        values = {
            "cF": cF,
            "action": result.action,
            "action_trapezoid": result.action_trapezoid,
            "relative_gap": (result.action - cF) / cF,
            "excess": result.action - cF,
            "segment_deviation": float(deviation.max()),
            "iterations": result.iterations,
            "gradient_norm": result.gradient_norm,
            "minimal_pair": is_minimal,
        }
        if is_minimal:
            flags = {
                "accion_cerca_de_cF": abs(values["relative_gap"]) <= ACTION_REL_TOL,
                "camino_recto": values["segment_deviation"] <= SEGMENT_TOL,
            }
        else:
            flags = {"exceso_positivo": values["excess"] > 0}

        if spec.samples > 0:
            infimum = sampled_connection_infimum(potential, spec.samples, max_workers=workers)
            values["sampled_infimum"] = infimum.value
            values["sampled_p_plus"] = infimum.p_plus
            values["sampled_p_minus"] = infimum.p_minus

        columns = {"s": result.s_grid}
        columns.update({f"gamma_{i}": result.path[:, i] for i in range(result.path.shape[1])})
        paths = {
            "path": write_csv(pd.DataFrame(columns), out / "connection.csv").path,
            "summary": write_json(
                {"name": config.name, "p_plus": p_plus, "p_minus": p_minus,
                 "values": values, "flags": flags},
                out / "connection.json",
            ).path,
        }
    except LabError as exc:
        return _failure(StudyResult, config, exc, start_time)

    logger.info(f"Acción={values['action']:.10g} (c_F={cF:.10g}), desvío del segmento={values['segment_deviation']:.3e}")
    return StudyResult(
        success=True,
        name=config.name,
        values=values,
        flags=flags,
        paths=paths,
        duration_seconds=(datetime.now() - start_time).total_seconds(),
    )


# ---------- dato inicial bien preparado ----------

def run_init_check(config: RunConfig, output_dir: str | Path | None = None,
                   eps_list: list[float] | None = None) -> StudyResult:
    """
    E_ε[u_ε^in]/ε y B[u_ε^in]/ε sobre una lista de ε; cada cociente debe
    variar a lo sumo un factor 3.
    """
    start_time = datetime.now()
    out = _output_dir(config, output_dir)
    eps_list = list(eps_list or config.sweep.eps_list or INIT_EPS)
    logger.info("=" * 60)
    logger.info(f"DATO INICIAL: {config.name}, ε={eps_list}")
    logger.info("=" * 60)
    try:
        rows = []
        for i, eps in enumerate(eps_list):
            member = config.with_eps(eps, config.grid_for_eps(eps, i))
            setup = validate_config(member)
            initial = setup.initial_data.build_initial_field(setup.grid, eps)
            ctx = DiagnosticsContext(setup.potential, setup.interface, eps)
            E = ctx.modulated_energy(initial)
            B = ctx.bulk_energy(initial)
            rows.append({
                "eps": eps,
                "h": setup.grid.h,
                "A_eps": ctx.gl_energy(initial),
                "E_eps": E,
                "B_eps": B,
                "E_over_eps": E / eps,
                "B_over_eps": B / eps,
            })
            logger.info(f"  ε={eps:g}: E/ε={E / eps:.6g}, B/ε={B / eps:.6g}")
        table = pd.DataFrame(rows).sort_values("eps", ascending=False).reset_index(drop=True)

        def spread(column: str) -> float:
            v = table[column].to_numpy()
            if np.any(v <= 0):
                return math.inf
            return float(v.max() / v.min())

        values = {
            "E_over_eps_ratio": spread("E_over_eps"),
            "B_over_eps_ratio": spread("B_over_eps"),
        }
        flags = {
            "E_over_eps_acotado": values["E_over_eps_ratio"] <= INIT_RATIO_MAX,
            "B_over_eps_acotado": values["B_over_eps_ratio"] <= INIT_RATIO_MAX,
        }
        paths = {
            "table": write_csv(table, out / "init_check.csv").path,
            "summary": write_json({"name": config.name, "values": values, "flags": flags},
                                  out / "init_check.json").path,
        }
    except LabError as exc:
        return _failure(StudyResult, config, exc, start_time)

    return StudyResult(
        success=True,
        name=config.name,
        values=values,
        flags=flags,
        paths=paths,
        duration_seconds=(datetime.now() - start_time).total_seconds(),
    )


# ---------- identidades geométricas ----------

def tube_samples(interface: InterfaceDescriptor, t: float, count: int,
                 spread: float) -> tuple[np.ndarray, np.ndarray]:
    """
    (muestras sobre Σ_t, muestras en el tubo con |d_Σ| ≤ spread), desplazadas
    a lo largo de la normal.
    """
    surface = interface.sample_surface(t, count)
    offsets = np.linspace(-spread, spread, 5)
    if interface.kind == "stationary_point":
        tube = surface[0] + offsets[:, None]
        return surface, tube
    directions = (surface - interface.center) / interface.radius(t)
    tube = (surface[:, None, :] + offsets[None, :, None] * directions[:, None, :]).reshape(-1, surface.shape[1])
    return surface, tube


def _richardson(residuals: list[float]) -> float:
    """Pendiente log₂ entre pasos sucesivos a la mitad; nan si ya es exacto."""
    r = np.asarray(residuals)
    if np.all(r <= EXACT_RESIDUAL):
        return math.nan
    ratios = r[:-1] / np.maximum(r[1:], 1e-300)
    return float(np.median(np.log2(ratios)))


def run_geometry_check(config: RunConfig, output_dir: str | Path | None = None,
                       samples: int = 16) -> GeometryCheckResult:
    """
    Residuos de las identidades de ξ y H con pasos h, h/2, h/4 en t = 0,
    T/2 y T. (a) se evalúa sobre Σ_t; (b)–(d) en el tubo |d_Σ| ≤ δ₀/4.
    """
    start_time = datetime.now()
    out = _output_dir(config, output_dir)
    logger.info("=" * 60)
    logger.info(f"IDENTIDADES GEOMÉTRICAS: {config.name}")
    logger.info("=" * 60)
    try:
        setup = build_setup(config)
        interface = setup.interface
        T = config.solver.T_final
        interface.check_horizon(T)
        delta0 = interface.delta0_geo
        h0 = min(1e-2, delta0 / 8)
        steps = [h0 / 2**k for k in range(FD_STEPS)]
        times = sorted({0.0, T / 2, T})

        rows = []
        residuals = {key: [0.0] * FD_STEPS for key in ("a", "b", "c", "d")}
        for t in times:
            surface, tube = tube_samples(interface, t, samples, delta0 / 4)
            for k, h in enumerate(steps):
                on_sigma = interface.verify_identities(t, surface, h)
                in_tube = interface.verify_identities(t, tube, h)
                row = {
                    "t": t,
                    "fd_step": h,
                    "residual_a": on_sigma.residual_a,
                    "residual_b": in_tube.residual_b,
                    "residual_c": in_tube.residual_c,
                    "residual_d": in_tube.residual_d,
                }
                rows.append(row)
                for key in residuals:
                    residuals[key][k] = max(residuals[key][k], row[f"residual_{key}"])

        slopes = {key: _richardson(values) for key, values in residuals.items()}
        flags = {
            f"identidad_{key}": bool(
                np.all(np.asarray(residuals[key]) <= EXACT_RESIDUAL)
                or slopes[key] >= RICHARDSON_MIN
            )
            for key in residuals
        }
        table = pd.DataFrame(rows)
        paths = {
            "table": write_csv(table, out / "geometry_check.csv").path,
            "summary": write_json(
                {"name": config.name, "slopes": slopes, "residuals": residuals, "flags": flags},
                out / "geometry_check.json",
            ).path,
        }
    except LabError as exc:
        return _failure(GeometryCheckResult, config, exc, start_time)

    for key, slope in slopes.items():
        logger.info(f"  ({key}) residuo máx={max(residuals[key]):.3e}, pendiente={slope:.3f}")
    return GeometryCheckResult(
        success=True,
        name=config.name,
        values={f"max_residual_{k}": max(v) for k, v in residuals.items()},
        flags=flags,
        paths=paths,
        reports=rows,
        slopes=slopes,
        duration_seconds=(datetime.now() - start_time).total_seconds(),
    )
