"""
Monitor de Gronwall: ajusta Ĉ en dE/dt + disipación ≤ Ĉ·E sobre los registros.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from src.errors import TooFewRecords

logger = logging.getLogger(__name__)

MIN_RECORDS = 3
ENERGY_FLOOR = 1e-14


@dataclass
class GronwallReport:
    C_hat: float
    times: list[float]
    rates: list[float] = field(default_factory=list)
    min_dissipation: float = 0.0
    envelope_violation: float = 0.0

    def as_dict(self) -> dict:
        return {
            "C_hat": self.C_hat,
            "min_dissipation": self.min_dissipation,
            "envelope_violation": self.envelope_violation,
        }


def gronwall_monitor(records: list, slack: float = 0.0) -> GronwallReport:
    """
    Para cada par consecutivo de registros: ΔE/Δt + media de la disipación,
    dividido por la E media. Ĉ es el máximo (no negativo) de ese cociente.

    envelope_violation = max(E(t) − E(0)·e^{Ĉt} − slack, 0).

    Raises:
        TooFewRecords: con menos de 3 registros
    """
    if len(records) < MIN_RECORDS:
        raise TooFewRecords(f"se necesitan {MIN_RECORDS} registros, hay {len(records)}")
    t = np.array([r.t for r in records])
    E = np.array([r.E_eps for r in records])
    diss = np.array([math.fsum(r.dissipation) for r in records])
    per_term = np.array([r.dissipation for r in records])

    dt = np.diff(t)
    rate = np.diff(E) / dt + 0.5 * (diss[1:] + diss[:-1])
    E_mid = np.maximum(0.5 * (E[1:] + E[:-1]), ENERGY_FLOOR)
    ratios = rate / E_mid
    C_hat = float(max(ratios.max(), 0.0))

    envelope = E[0] * np.exp(C_hat * (t - t[0])) + slack
    violation = float(max((E - envelope).max(), 0.0))
    report = GronwallReport(
        C_hat=C_hat,
        times=t[1:].tolist(),
        rates=ratios.tolist(),
        min_dissipation=float(per_term.min()),
        envelope_violation=violation,
    )
    logger.info(f"Gronwall: Ĉ={C_hat:.4g}, mínima disipación={report.min_dissipation:.3e}")
    return report
