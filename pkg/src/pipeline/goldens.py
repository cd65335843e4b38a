"""
Números de referencia (goldens) obtenidos con oráculos independientes y
guardados junto a la configuración que los generó.
"""
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from src.analysis.diagnostics import DiagnosticsContext
from src.config.run_config import RunConfig, validate_config
from src.config.settings import SIL_OUTPUT_DIR
from src.errors import LabError
from src.physics.profile_1d import compute_cF_tilde, minimal_connection
from src.pipeline.export import write_json
from src.solver.gl_solver import dt_stability

logger = logging.getLogger(__name__)

TRAPEZOID_PANELS = 1_000_000


@dataclass
class GoldenResult:
    """Resultado de make-goldens."""
    success: bool
    name: str = ""
    path: Path | None = None
    values: dict = field(default_factory=dict)
    duration_seconds: float = 0
    error: str | None = None


def trapezoid_cF(potential, panels: int = TRAPEZOID_PANELS) -> float:
    """Oráculo de c_F: trapecio denso de 2∫₀^{dist_m/2} √(2f(λ²)) dλ."""
    lam = np.linspace(0.0, potential.manifold.gap / 2, panels + 1)
    return float(2.0 * trapezoid(np.sqrt(2.0 * potential.ramp.value(lam**2)), lam))


def make_goldens(config: RunConfig, output_dir: str | Path | None = None) -> GoldenResult:
    """
    Calcula c_F (cuadratura adaptativa, vía F̃ y trapecio denso), el dt de
    estabilidad de la malla configurada, las energías del dato inicial y,
    si la configuración trae extremos, el margen de la conexión sobre c_F y,
    para extremos no mínimos, el exceso sobre el par mínimo que parte de p⁺.
    """
    start_time = datetime.now()
    out = Path(output_dir or config.output_dir or SIL_OUTPUT_DIR)
    logger.info("=" * 60)
    logger.info(f"GENERANDO GOLDENS: {config.name}")
    logger.info("=" * 60)

    try:
        setup = validate_config(config)
        potential = setup.potential
        eps = config.solver.eps
        values = {
            "cF": potential.cF,
            "cF_tilde": compute_cF_tilde(potential.ramp, potential.manifold.gap),
            "cF_trapezoid": trapezoid_cF(potential),
            "gap": potential.manifold.gap,
            "delta0": potential.params.delta0,
            "hessian_bound": potential.hessian_bound(),
            "s_max": potential.profile().s_max,
        }
        for scheme in ("heun", "imex"):
            values[f"dt_{scheme}"] = dt_stability(
                setup.grid.h, eps, setup.grid.dim, values["hessian_bound"],
                config.solver.dt_safety, scheme,
            )

        initial = setup.initial_data.build_initial_field(setup.grid, eps)
        ctx = DiagnosticsContext(potential, setup.interface, eps)
        values["E_init_over_eps"] = ctx.normalized_modulated_energy(initial)
        values["B_init_over_eps"] = ctx.bulk_energy(initial) / eps
        values["A_init"] = ctx.gl_energy(initial)

        spec = config.connection
        if spec.p_plus is not None and spec.p_minus is not None:
            connection = minimal_connection(
                potential, spec.p_plus, spec.p_minus, nodes=spec.nodes, s_half=spec.s_half
            )
            values["connection_action"] = connection.action
            values["connection_margin"] = connection.action - potential.cF
            values["connection_minimal_pair"] = potential.manifold.is_minimal_pair(spec.p_plus, spec.p_minus)
            partner = potential.manifold.minimal_partner(spec.p_plus)
            if not values["connection_minimal_pair"] and partner is not None:
                # mismo s_half y misma malla que la conexión medida
                reference = minimal_connection(
                    potential, spec.p_plus, partner, nodes=spec.nodes,
                    s_half=connection.s_grid[-1],
                )
                values["connection_reference_action"] = reference.action
                values["connection_excess_over_minimal"] = connection.action - reference.action

        payload = {
            "name": config.name,
            "generated_with": config.raw,
            "values": values,
        }
        written = write_json(payload, out / "goldens.json")
        if not written.success:
            raise LabError(written.error)
    except LabError as exc:
        logger.error(f"Goldens abortados: {type(exc).__name__}: {exc}")
        return GoldenResult(
            success=False,
            name=config.name,
            error=f"{type(exc).__name__}: {exc}",
            duration_seconds=(datetime.now() - start_time).total_seconds(),
        )

    logger.info(f"c_F={values['cF']:.12g} (trapecio {values['cF_trapezoid']:.12g})")
    if not math.isclose(values["cF"], values["cF_trapezoid"], abs_tol=1e-8):
        logger.warning("c_F y el oráculo de trapecio difieren más de 1e−8")
    return GoldenResult(
        success=True,
        name=config.name,
        path=written.path,
        values=values,
        duration_seconds=(datetime.now() - start_time).total_seconds(),
    )
