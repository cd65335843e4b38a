"""
Snapshots de campos: una línea JSON de cabecera seguida de float64
little-endian en orden fila-mayor, componentes al final.
"""
import json
import logging
from pathlib import Path

import numpy as np

from src.errors import DataCorrupt
from src.solver.grid import Field, Grid

logger = logging.getLogger(__name__)

_DTYPE = np.dtype("<f8")


def write_snapshot(path: Path, field: Field, eps: float) -> Path:
    grid = field.grid
    header = {
        "dims": grid.dim,
        "counts": list(grid.counts),
        "lo": list(grid.lo),
        "hi": list(grid.hi),
        "h": grid.h,
        "n": field.target_dim,
        "eps": eps,
        "t": field.t,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("utf-8"))
        fh.write(np.ascontiguousarray(field.values, dtype=_DTYPE).tobytes())
    logger.debug(f"Snapshot t={field.t:.6g} en {path}")
    return path


def read_snapshot(path: Path) -> tuple[dict, Field]:
    """
    Raises:
        DataCorrupt: si la cabecera no es JSON válido o el tamaño no cuadra
    """
    with open(path, "rb") as fh:
        line = fh.readline()
        payload = fh.read()
    try:
        header = json.loads(line.decode("utf-8"))
        counts = tuple(int(c) for c in header["counts"])
        n = int(header["n"])
    except (ValueError, KeyError) as exc:
        raise DataCorrupt(f"cabecera inválida en {path}: {exc}") from exc
    expected = int(np.prod(counts)) * n * _DTYPE.itemsize
    if len(payload) != expected:
        raise DataCorrupt(f"{path}: {len(payload)} bytes, se esperaban {expected}")
    values = np.frombuffer(payload, dtype=_DTYPE).reshape(counts + (n,)).copy()
    grid = Grid(tuple(header["lo"]), tuple(header["hi"]), counts)
    return header, Field(grid, values, float(header["t"]))
