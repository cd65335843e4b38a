"""
Escritura y lectura de resultados: series temporales CSV y resúmenes JSON.
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from src.analysis.diagnostics import CSV_COLUMNS, DiagnosticsRecord
from src.errors import DataCorrupt

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


@dataclass
class ExportResult:
    """Resultado de una escritura."""
    success: bool
    path: Path | None = None
    rows_written: int = 0
    error: str | None = None


def records_to_frame(records: list[DiagnosticsRecord]) -> pd.DataFrame:
    return pd.DataFrame([r.as_row() for r in records], columns=CSV_COLUMNS)


def write_csv(df: pd.DataFrame, filepath: str | Path) -> ExportResult:
    """Guarda un DataFrame con 17 cifras significativas."""
    filepath = Path(filepath)
    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(filepath, index=False, float_format=FLOAT_FORMAT, encoding="utf-8", lineterminator="\n")
        logger.info(f"Guardado CSV: {filepath} ({len(df)} filas)")
        return ExportResult(success=True, path=filepath, rows_written=len(df))
    except OSError as e:
        logger.error(f"Error guardando CSV: {e}")
        return ExportResult(success=False, path=filepath, error=str(e))


def write_timeseries(records: list[DiagnosticsRecord], filepath: str | Path) -> ExportResult:
    return write_csv(records_to_frame(records), filepath)


def read_timeseries(filepath: str | Path) -> pd.DataFrame:
    """
    Raises:
        DataCorrupt: si falta el archivo o la cabecera no coincide
    """
    filepath = Path(filepath)
    if not filepath.exists():
        raise DataCorrupt(f"archivo no encontrado: {filepath}")
    df = pd.read_csv(filepath)
    if list(df.columns) != CSV_COLUMNS:
        raise DataCorrupt(f"cabecera inesperada en {filepath}: {list(df.columns)}")
    return df


def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_json(payload: dict, filepath: str | Path) -> ExportResult:
    """JSON determinista (claves ordenadas); NaN/Inf se escriben como null."""
    filepath = Path(filepath)
    try:
        filepath.parent.mkdir(parents=True, exist_ok=True)
        with open(filepath, "w", encoding="utf-8") as fh:
            json.dump(_json_safe(payload), fh, sort_keys=True, indent=2, ensure_ascii=False)
            fh.write("\n")
        logger.info(f"Guardado JSON: {filepath}")
        return ExportResult(success=True, path=filepath, rows_written=1)
    except OSError as e:
        logger.error(f"Error guardando JSON: {e}")
        return ExportResult(success=False, path=filepath, error=str(e))
