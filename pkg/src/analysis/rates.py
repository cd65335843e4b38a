"""
Ajuste de tasas log-log por mínimos cuadrados ordinarios.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy.stats import linregress

logger = logging.getLogger(__name__)

MIN_POINTS = 3


@dataclass
class RateFit:
    metric: str
    slope: float
    intercept: float
    stderr: float
    points: int


def fit_rate(eps, values, metric: str = "") -> RateFit | None:
    """
    Pendiente de log(valor) frente a log(ε).

    Devuelve None con menos de 3 puntos o con valores no positivos.
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    if eps.size < MIN_POINTS:
        logger.warning(f"{metric}: {eps.size} valores de ε, no se ajusta pendiente")
        return None
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        logger.warning(f"{metric}: valores no positivos o no finitos, no se ajusta pendiente")
        return None
    fit = linregress(np.log(eps), np.log(values))
    return RateFit(metric, float(fit.slope), float(fit.intercept), float(fit.stderr), int(eps.size))


def fit_rates(metrics: pd.DataFrame, eps_column: str = "eps") -> pd.DataFrame:
    """Ajusta una pendiente por columna; filas ordenadas como las columnas."""
    rows = []
    for column in metrics.columns:
        if column == eps_column:
            continue
        fit = fit_rate(metrics[eps_column], metrics[column], column)
        rows.append({
            "metrica": column,
            "pendiente": fit.slope if fit else np.nan,
            "error_std": fit.stderr if fit else np.nan,
            "puntos": fit.points if fit else len(metrics),
        })
    return pd.DataFrame(rows)
