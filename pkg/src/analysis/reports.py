"""
Módulo de generación de reportes.
"""
import logging
from datetime import datetime
from pathlib import Path

import pandas as pd

logger = logging.getLogger(__name__)


def df_to_markdown(df: pd.DataFrame, max_rows: int = 20) -> str:
    """Convierte DataFrame a tabla Markdown."""
    if len(df) > max_rows:
        df = df.head(max_rows)
    return df.to_markdown(index=False, floatfmt=".6g")


def generate_sweep_report(
    name: str,
    metrics: pd.DataFrame,
    fits: pd.DataFrame | None,
    flags: dict[str, bool],
    output_file: str | Path,
    timestamp: bool = True,
) -> Path:
    """
    Genera el reporte Markdown de un barrido en ε.

    Args:
        name: Nombre de la configuración
        metrics: Una fila por ε (de grande a pequeño)
        fits: Pendientes log-log, o None con menos de 3 valores de ε
        flags: Banderas de aceptación {"métrica.regla": bool}
        output_file: Ruta del .md
        timestamp: Si es False se omite la línea "Generado" y dos barridos
            iguales producen archivos idénticos byte a byte

    Returns:
        Ruta al archivo generado
    """
    output_file = Path(output_file)
    output_file.parent.mkdir(parents=True, exist_ok=True)

    lines = []
    lines.append(f"# 📈 Barrido en ε: {name}")
    if timestamp:
        lines.append(f"\n**Generado:** {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    lines.append(f"\n**Valores de ε:** {', '.join(f'{e:g}' for e in metrics['eps'])}")

    # ========== MÉTRICAS ==========
    lines.append("\n---\n## 📋 Métricas por ε\n")
    # traspuesta: una columna por ε
    table = metrics.set_index("eps").T.reset_index().rename(columns={"index": "métrica"})
    table.columns = ["métrica"] + [f"ε={e:g}" for e in metrics["eps"]]
    lines.append(df_to_markdown(table, max_rows=len(table)))

    # ========== PENDIENTES ==========
    lines.append("\n---\n## 📐 Pendientes log-log\n")
    if fits is None:
        lines.append("Menos de 3 valores de ε: no se ajustan pendientes.")
    else:
        lines.append(df_to_markdown(fits, max_rows=len(fits)))

    # ========== ACEPTACIÓN ==========
    lines.append("\n---\n## ✅ Aceptación\n")
    if not flags:
        lines.append("Sin umbrales configurados.")
    else:
        lines.append("| Criterio | Resultado |")
        lines.append("|----------|-----------|")
        for flag, ok in flags.items():
            lines.append(f"| {flag} | {'✅' if ok else '❌'} |")
        passed = all(flags.values())
        lines.append(f"\n**Resultado global:** {'✅ superado' if passed else '❌ fallido'}")

    lines.append("\n---\n*Reporte generado automáticamente*")

    with open(output_file, "w", encoding="utf-8") as f:
        f.write("\n".join(lines))
        f.write("\n")

    logger.info(f"Reporte guardado: {output_file}")
    return output_file
