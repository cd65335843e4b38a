"""
Barridos en ε: ejecuta los miembros (en paralelo si SIL_THREADS > 1), une las
métricas en orden de ε, ajusta pendientes log-log y evalúa los umbrales de
aceptación.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

from src.analysis.rates import MIN_POINTS, fit_rates
from src.analysis.reports import generate_sweep_report
from src.config.run_config import GridSpec, RunConfig
from src.config.settings import SIL_OUTPUT_DIR, SIL_THREADS
from src.errors import ConfigInvalid, LabError
from src.pipeline.export import read_timeseries, write_csv, write_json
from src.pipeline.run import RunResult, run_simulation

logger = logging.getLogger(__name__)

RATE_METRICS = ("E_sup", "l1_sup", "E0", "B0", "g_sup", "h_sup")
RULES = ("slope_min", "ratio_max", "final_max", "decreasing", "all_true", "max", "min")


@dataclass
class SweepReport:
    """Métricas por ε, pendientes ajustadas y banderas de aceptación."""
    name: str
    eps_list: list[float]
    metrics: pd.DataFrame
    fits: pd.DataFrame | None = None
    flags: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "eps_list": self.eps_list,
            "metrics": self.metrics.to_dict(orient="records"),
            "fits": None if self.fits is None else self.fits.to_dict(orient="records"),
            "flags": self.flags,
            "passed": self.passed,
        }


@dataclass
class SweepResult:
    """Resultado completo de un barrido."""
    success: bool
    name: str = ""
    report: SweepReport | None = None
    runs: list[RunResult] = field(default_factory=list)
    paths: dict[str, Path] = field(default_factory=dict)
    duration_seconds: float = 0
    error: str | None = None


def _run_member(config: RunConfig, eps: float, grid: GridSpec, output_dir: str) -> RunResult:
    # nivel de módulo: se serializa hacia los procesos hijos
    return run_simulation(config, output_dir=output_dir, eps=eps, grid=grid)


def plan_members(config: RunConfig, eps_list: list[float] | None = None) -> list[tuple[float, GridSpec]]:
    """
    Pares (ε, malla) del barrido, ordenados de ε grande a pequeño.

    Raises:
        ConfigInvalid: lista vacía, ε no positivos o grid_counts de otra longitud
    """
    eps_list = list(eps_list if eps_list is not None else config.sweep.eps_list)
    if not eps_list:
        raise ConfigInvalid("sweep.eps_list", "lista de ε vacía")
    if any(not eps > 0 for eps in eps_list):
        raise ConfigInvalid("sweep.eps_list", f"todos los ε deben ser positivos: {eps_list}")
    counts = config.sweep.grid_counts
    if counts is not None and len(counts) != len(eps_list):
        raise ConfigInvalid(
            "sweep.grid_counts",
            f"{len(counts)} mallas para {len(eps_list)} valores de ε",
        )
    members = [(eps, config.grid_for_eps(eps, i)) for i, eps in enumerate(eps_list)]
    return sorted(members, key=lambda m: -m[0])


def _check_rule(metric: str, rule: str, threshold, values: np.ndarray,
                fits: pd.DataFrame | None) -> bool | None:
    """Evalúa una regla; None si no es evaluable (p. ej. sin pendiente)."""
    if rule == "slope_min":
        if fits is None:
            return None
        row = fits[fits["metrica"] == metric]
        if row.empty or not np.isfinite(row["pendiente"].iloc[0]):
            return False
        return bool(row["pendiente"].iloc[0] >= threshold)
    if not np.all(np.isfinite(values)):
        return False
    if rule == "ratio_max":
        if np.any(values <= 0):
            return False
        return bool(values.max() / values.min() <= threshold)
    if rule == "final_max":
        return bool(values[-1] <= threshold)
    if rule == "decreasing":
        return bool(np.all(np.diff(values) < 0)) == bool(threshold)
    if rule == "all_true":
        return bool(np.all(values == 1.0)) == bool(threshold)
    if rule == "max":
        return bool(np.all(values <= threshold))
    if rule == "min":
        return bool(np.all(values >= threshold))
    raise ConfigInvalid(f"sweep.acceptance.{metric}", f"regla desconocida '{rule}'")


def evaluate_acceptance(metrics: pd.DataFrame, fits: pd.DataFrame | None,
                        acceptance: dict) -> dict[str, bool]:
    """
    Banderas {"métrica.regla": bool}. Las filas de metrics van de ε grande a
    pequeño, así que "final" es el ε más fino.
    """
    flags = {}
    for metric, rules in sorted(acceptance.items()):
        if metric not in metrics.columns:
            logger.warning(f"Métrica de aceptación '{metric}' ausente en el barrido")
            flags[f"{metric}.presente"] = False
            continue
        values = metrics[metric].to_numpy(dtype=float)
        for rule, threshold in sorted(rules.items()):
            if rule not in RULES:
                raise ConfigInvalid(f"sweep.acceptance.{metric}", f"regla desconocida '{rule}'")
            outcome = _check_rule(metric, rule, threshold, values, fits)
            if outcome is None:
                logger.warning(f"{metric}.{rule}: sin ajuste de pendiente, no se evalúa")
                continue
            flags[f"{metric}.{rule}"] = outcome
    return flags


def build_report(name: str, runs: list[RunResult], acceptance: dict) -> SweepReport:
    """Une las métricas de los runs en orden de ε y ajusta pendientes con ≥ 3 valores."""
    metrics = pd.DataFrame([r.metrics for r in runs]).sort_values("eps", ascending=False)
    metrics = metrics.reset_index(drop=True)
    eps_list = metrics["eps"].tolist()

    fits = None
    if len(eps_list) >= MIN_POINTS:
        wanted = set(RATE_METRICS) | {m for m, rules in acceptance.items() if "slope_min" in rules}
        columns = ["eps"] + [c for c in metrics.columns if c in wanted]
        fits = fit_rates(metrics[columns])
    else:
        logger.warning(f"{len(eps_list)} valores de ε: se reportan métricas sin ajustar pendientes")

    flags = evaluate_acceptance(metrics, fits, acceptance)
    return SweepReport(name=name, eps_list=eps_list, metrics=metrics, fits=fits, flags=flags)


def merge_timeseries(runs: list[RunResult]) -> pd.DataFrame:
    """Series temporales de todos los miembros con una columna eps delante."""
    frames = []
    for run in sorted(runs, key=lambda r: -r.eps):
        df = read_timeseries(run.csv_path)
        df.insert(0, "eps", run.eps)
        frames.append(df)
    return pd.concat(frames, ignore_index=True)


def run_sweep(
    config: RunConfig,
    eps_list: list[float] | None = None,
    output_dir: str | Path | None = None,
    workers: int = SIL_THREADS,
    timestamp: bool = True,
) -> SweepResult:
    """
    Ejecuta el barrido completo y escribe sweep_metrics.csv, sweep_rates.csv,
    sweep_timeseries.csv, sweep_report.md y sweep_report.json. Con
    timestamp=False el reporte Markdown no lleva fecha.
    """
    start_time = datetime.now()
    out = Path(output_dir or config.output_dir or SIL_OUTPUT_DIR)

    logger.info("=" * 60)
    logger.info(f"INICIANDO BARRIDO {config.name}")
    logger.info("=" * 60)

    try:
        members = plan_members(config, eps_list)
    except ConfigInvalid as exc:
        logger.error(f"Barrido inválido: {exc}")
        return SweepResult(success=False, name=config.name, error=f"ConfigInvalid: {exc}")

    member_dirs = [str(out / f"eps_{eps:g}") for eps, _ in members]
    for (eps, grid), member_dir in zip(members, member_dirs):
        logger.info(f"  miembro ε={eps:g}: malla {grid.counts} → {member_dir}")

    if workers > 1 and len(members) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(members))) as pool:
            futures = [
                pool.submit(_run_member, config, eps, grid, member_dir)
                for (eps, grid), member_dir in zip(members, member_dirs)
            ]
            runs = [f.result() for f in futures]
    else:
        runs = [
            _run_member(config, eps, grid, member_dir)
            for (eps, grid), member_dir in zip(members, member_dirs)
        ]

    failed = [r for r in runs if not r.success]
    if failed:
        errors = "; ".join(f"ε={r.eps:g}: {r.error}" for r in failed)
        logger.error(f"Barrido abortado: {errors}")
        return SweepResult(
            success=False,
            name=config.name,
            runs=runs,
            error=errors,
            duration_seconds=(datetime.now() - start_time).total_seconds(),
        )

    try:
        report = build_report(config.name, runs, config.sweep.acceptance)
        paths = {
            "metrics": write_csv(report.metrics, out / "sweep_metrics.csv").path,
            "timeseries": write_csv(merge_timeseries(runs), out / "sweep_timeseries.csv").path,
            "report_json": write_json(report.as_dict(), out / "sweep_report.json").path,
            "report_md": generate_sweep_report(
                report.name, report.metrics, report.fits, report.flags, out / "sweep_report.md",
                timestamp=timestamp,
            ),
        }
        if report.fits is not None:
            paths["rates"] = write_csv(report.fits, out / "sweep_rates.csv").path
    except LabError as exc:
        logger.error(f"Barrido abortado: {type(exc).__name__}: {exc}")
        return SweepResult(success=False, name=config.name, runs=runs, error=f"{type(exc).__name__}: {exc}")

    duration = (datetime.now() - start_time).total_seconds()
    logger.info("\n" + "=" * 60)
    logger.info("RESUMEN DEL BARRIDO")
    logger.info("=" * 60)
    logger.info(f"Valores de ε:         {report.eps_list}")
    for flag, ok in report.flags.items():
        logger.info(f"  {'OK ' if ok else 'NO '} {flag}")
    logger.info(f"Aceptación:           {'superada' if report.passed else 'fallida'}")
    logger.info(f"Duracion:             {duration:.2f} segundos")
    logger.info("=" * 60)

    return SweepResult(
        success=True,
        name=config.name,
        report=report,
        runs=runs,
        paths=paths,
        duration_seconds=duration,
    )
