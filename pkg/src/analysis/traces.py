"""
Trazas de u_ε a ambos lados de Σ_t y su desviación respecto de un par mínimo.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from src.errors import InvalidOffset, TraceOffManifoldTube
from src.solver.grid import Field

if TYPE_CHECKING:
    from src.analysis.diagnostics import DiagnosticsContext

logger = logging.getLogger(__name__)


@dataclass
class MinimalPairStats:
    offset: float
    median: float
    p90: float
    maximum: float
    deviations: np.ndarray

    def as_dict(self) -> dict:
        return {"median": self.median, "p90": self.p90, "max": self.maximum}


def check_offsets(ctx: DiagnosticsContext, t: float, offsets: list[float]) -> None:
    """
    Raises:
        InvalidOffset: si algún s no cumple 2ε ≤ s ≤ δ₀/2 y s < r(t)
    """
    upper = ctx.potential.params.delta0 / 2
    radius = ctx.interface.radius(t) if ctx.interface.kind == "shrinking_sphere" else np.inf
    for s in offsets:
        if not 2 * ctx.eps <= s <= upper:
            raise InvalidOffset(f"s={s:.6g} fuera de [2ε, δ₀/2] = [{2 * ctx.eps:.6g}, {upper:.6g}]")
        if s >= radius:
            raise InvalidOffset(f"s={s:.6g} ≥ r(t)={radius:.6g}")


def minimal_pair_deviation(
    ctx: DiagnosticsContext, field: Field, t: float, offsets: list[float]
) -> list[MinimalPairStats]:
    """
    Interpola u en p ± s·n para p sobre Σ_t, proyecta a m± y mide
    | |ũ⁺ − ũ⁻| − dist_m |.

    Raises:
        InvalidOffset
        TraceOffManifoldTube: si una traza no está a menos de 2δ₀ de su pozo
    """
    check_offsets(ctx, t, offsets)
    grid = field.grid
    manifold = ctx.potential.manifold
    tube = 2 * manifold.tube_radius
    interpolator = RegularGridInterpolator(tuple(grid.axes), field.values, method="linear")

    points = ctx.interface.sample_surface(t, ctx.trace_samples)
    normals = ctx.interface.normal(points, t)
    results = []
    for s in offsets:
        u_plus = interpolator(points + s * normals)
        u_minus = interpolator(points - s * normals)
        for side, values in (("+", u_plus), ("-", u_minus)):
            dist = np.abs(manifold.signed_dist_component(values, side))
            if np.max(dist) >= tube:
                raise TraceOffManifoldTube(
                    f"traza {side} a distancia {np.max(dist):.4g} ≥ 2δ₀ con s={s:.4g}"
                )
        proj_plus = manifold.project_component(u_plus, "+")
        proj_minus = manifold.project_component(u_minus, "-")
        dev = np.abs(np.linalg.norm(proj_plus - proj_minus, axis=-1) - manifold.gap)
        results.append(MinimalPairStats(
            offset=float(s),
            median=float(np.median(dev)),
            p90=float(np.percentile(dev, 90)),
            maximum=float(dev.max()),
            deviations=dev,
        ))
    return results
