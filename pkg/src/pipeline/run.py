"""
Orquestador de un run: configuración → dato inicial → integración →
diagnósticos → CSV, resumen y snapshots.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path

import numpy as np

from src.analysis.diagnostics import DiagnosticsContext, DiagnosticsRecord
from src.analysis.gronwall import gronwall_monitor
from src.config.run_config import GridSpec, LabSetup, RunConfig, validate_config
from src.config.settings import SIL_LOG_DIR, SIL_OUTPUT_DIR
from src.errors import LabError, TooFewRecords
from src.pipeline.export import write_json, write_timeseries
from src.solver.gl_solver import GLSolver, RunTrajectory
from src.solver.grid import Field
from src.solver.snapshot import write_snapshot

logger = logging.getLogger(__name__)

ENERGY_FLOOR = 1e-14
COERCIVITY_CONSTANTS = (1.0, 2.0, 2.0)


@dataclass
class RunResult:
    """Resultado completo de un run."""
    success: bool
    name: str = ""
    eps: float = 0.0
    h: float = 0.0
    csv_path: Path | None = None
    summary_path: Path | None = None
    records: int = 0
    metrics: dict = field(default_factory=dict)
    duration_seconds: float = 0
    error: str | None = None


def setup_logging(log_dir: str = SIL_LOG_DIR) -> Path:
    """Configura logging para el laboratorio."""
    Path(log_dir).mkdir(parents=True, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = Path(log_dir) / f"sil_{timestamp}.log"

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler()
        ]
    )

    return log_file


def build_context(setup: LabSetup, config: RunConfig, eps: float) -> DiagnosticsContext:
    diag = config.diagnostics
    return DiagnosticsContext(
        setup.potential,
        setup.interface,
        eps,
        level_k=diag.level_k,
        offsets=diag.offsets_for(eps),
        trace_samples=diag.trace_samples,
    )


def run_metrics(records: list[DiagnosticsRecord], trajectory: RunTrajectory,
                setup: LabSetup, eps: float, C_hat: float = math.nan) -> dict:
    """Métricas escalares de un run para los barridos."""
    E = np.array([r.E_eps for r in records])
    A = np.array([r.A_eps for r in records])
    coer = np.array([r.coercivity for r in records])
    diss = np.array([r.dissipation for r in records])
    scale = np.maximum(A, ENERGY_FLOOR)
    t = np.array([r.t for r in records])
    interface = setup.interface
    metrics = {
        "eps": eps,
        "h": setup.grid.h,
        "E0": float(E[0]),
        "B0": float(records[0].B_eps),
        "E0_over_eps": float(E[0] / eps),
        "B0_over_eps": float(records[0].B_eps / eps),
        "E_sup": float(E.max()),
        "l1_sup": float(max(r.l1_front_error for r in records)),
        "g_sup": float(max(r.g_eps for r in records)),
        "h_sup": float(max(r.h_eps for r in records)),
        "energy_area_gap_final": float(records[-1].energy_area_gap),
        "energy_area_rel_final": float(
            records[-1].energy_area_gap / (setup.potential.cF * interface.area(t[-1]))
        ),
        "mp_median_final": float(records[-1].mp_median),
        "max_norm_sup": float(max(r.max_norm for r in records)),
        "energy_bounded": float(np.all(E <= 3 * max(E[0], eps))),
        "max_energy_increase": trajectory.max_energy_increase,
        "energy_increase_rel": trajectory.max_energy_increase / max(trajectory.energy_history[0], ENERGY_FLOOR),
        "dissipation_min": float(diss.min()),
        "dissipation_min_rel": float((diss.min(axis=1) / scale).min()),
        "coercivity_min_rel": float((coer.min(axis=1) / scale).min()),
        # cotas 1, 2, 2 de los tres primeros términos frente a E_ε
        "coercivity_ratio_max": float(
            np.max(coer[:, :3] / (np.maximum(E, ENERGY_FLOOR)[:, None] * np.array(COERCIVITY_CONSTANTS)))
        ),
        "C_hat": C_hat,
    }
    if interface.kind == "shrinking_sphere":
        exact = np.array([interface.radius(s) for s in t])
        est = np.array([r.radius_est for r in records])
        err = np.abs(est - exact)
        metrics["radius_err_max"] = float(np.nanmax(err)) if np.any(np.isfinite(err)) else math.nan
        metrics["radius_ok"] = float(np.all(err <= max(2 * eps, 3 * setup.grid.h)))
        if interface.spatial_dim == 2:
            length = 2 * math.pi * interface.radius(t[-1])
            metrics["perim_plus_gap_final"] = float(abs(records[-1].perim_plus - length))
            metrics["perim_minus_gap_final"] = float(abs(records[-1].perim_minus - length))
    else:
        drift = np.array([r.radius_est for r in records])
        metrics["front_drift_max"] = float(np.nanmax(np.abs(drift - drift[0])))
    return metrics


def run_simulation(
    config: RunConfig,
    output_dir: str | Path | None = None,
    eps: float | None = None,
    grid: GridSpec | None = None,
    snapshots: str | None = None,
) -> RunResult:
    """
    Ejecuta un run completo.

    Args:
        config: Configuración validable
        output_dir: Directorio de salida (por defecto el de la config o SIL_OUTPUT_DIR)
        eps: Sobrescribe solver.eps
        grid: Sobrescribe la malla
        snapshots: Sobrescribe solver.snapshots

    Returns:
        RunResult; los errores del laboratorio se devuelven, no se lanzan
    """
    start_time = datetime.now()
    eps = config.solver.eps if eps is None else eps
    config = config.with_eps(eps, grid)
    if snapshots is not None:
        config = replace(config, solver=replace(config.solver, snapshots=snapshots))
    out = Path(output_dir or config.output_dir or SIL_OUTPUT_DIR)

    logger.info("=" * 60)
    logger.info(f"INICIANDO RUN {config.name}")
    logger.info(f"ε={eps}, malla={config.grid.counts}, T={config.solver.T_final}")
    logger.info(f"Salida: {out}")
    logger.info("=" * 60)

    try:
        setup = validate_config(config)
        grid = setup.grid
        initial = setup.initial_data.build_initial_field(grid, eps)
        boundary = setup.initial_data.boundary_data(grid)
        ctx = build_context(setup, config, eps)
        solver = GLSolver(setup.potential, boundary, setup.solver)

        steps, _ = solver.schedule()
        every = config.solver.snapshot_every
        snap_dir = out / "snapshots"
        recorded = []

        def on_record(state: Field, step: int):
            recorded.append(step)
            if every is None:
                return
            if (every == 0 and step == steps) or (every and (len(recorded) - 1) % every == 0):
                write_snapshot(snap_dir / f"step_{step:08d}.snap", state, eps)

        trajectory = solver.run(initial, monitor=ctx.record, interface=setup.interface, on_record=on_record)
        records = trajectory.records

        csv = write_timeseries(records, out / "timeseries.csv")
        if not csv.success:
            raise LabError(csv.error)

        summary = {
            "name": config.name,
            "eps": eps,
            "h": grid.h,
            "dt": trajectory.dt,
            "steps": trajectory.steps,
            "cF": setup.potential.cF,
            "delta0": setup.potential.params.delta0,
            "delta0_geo": setup.interface.delta0_geo,
            "delta": setup.initial_data.delta,
            "max_energy_increase": trajectory.max_energy_increase,
            "energy_history": trajectory.energy_history,
            "max_norm_history": trajectory.max_norm_history,
            "stress_check": [r.stress_check for r in records],
            "phase_volume_error": [r.phase_volume_error for r in records],
            "energy_area_gap": [r.energy_area_gap for r in records],
            "minimal_pairs": [r.extras for r in records],
        }
        C_hat = math.nan
        try:
            report = gronwall_monitor(records)
            summary["gronwall"] = report.as_dict()
            C_hat = report.C_hat
        except TooFewRecords as exc:
            logger.info(f"Sin ajuste de Gronwall: {exc}")
        metrics = run_metrics(records, trajectory, setup, eps, C_hat)
        summary["metrics"] = metrics
        summary_result = write_json(summary, out / "summary.json")

    except LabError as exc:
        logger.error(f"Run abortado: {type(exc).__name__}: {exc}")
        return RunResult(
            success=False,
            name=config.name,
            eps=eps,
            error=f"{type(exc).__name__}: {exc}",
            duration_seconds=(datetime.now() - start_time).total_seconds(),
        )

    duration = (datetime.now() - start_time).total_seconds()
    logger.info("\n" + "=" * 60)
    logger.info("RESUMEN DEL RUN")
    logger.info("=" * 60)
    logger.info(f"Registros:            {len(records)}")
    logger.info(f"Pasos:                {trajectory.steps} (dt={trajectory.dt:.4g})")
    logger.info(f"sup_t E_ε:            {metrics['E_sup']:.6g}")
    logger.info(f"sup_t L¹ del frente:  {metrics['l1_sup']:.6g}")
    logger.info(f"Duracion:             {duration:.2f} segundos")
    logger.info("=" * 60)

    return RunResult(
        success=True,
        name=config.name,
        eps=eps,
        h=grid.h,
        csv_path=csv.path,
        summary_path=summary_result.path,
        records=len(records),
        metrics=metrics,
        duration_seconds=duration,
    )
