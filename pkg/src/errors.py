"""
Jerarquía de errores del laboratorio.

Todos los errores de dominio heredan de LabError; el orquestador los captura
y devuelve un resultado con success=False.
"""


class LabError(Exception):
    """Error base del laboratorio."""


# ---------- Configuración ----------

class ConfigInvalid(LabError, ValueError):
    """La configuración no pasa la validación; el mensaje nombra el campo."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"Configuración inválida en '{field}': {message}")


# ---------- Geometría del espacio objetivo ----------

class OutsideHalfTubes(LabError):
    """u está a más de dist_m/2 de ambas componentes."""


class OutsideTube(LabError):
    """La proyección al pozo no es única fuera del tubo 2δ₀."""


class NotOnManifold(LabError):
    """Un punto que debía estar sobre m± no lo está."""


# ---------- Potencial y perfil ----------

class NegativeArgument(LabError):
    """La rampa f solo está definida para s ≥ 0."""


class NearKink(LabError):
    """Punto demasiado cerca de un borde de casos de d_F (solo Lipschitz)."""


class QuadratureFailure(LabError):
    """La cuadratura adaptativa no alcanzó la tolerancia."""


class EndpointSingularity(LabError):
    """El empalme logarítmico del perfil no concuerda con la cuadratura."""


class NoConvergence(LabError):
    """La relajación del camino agotó el presupuesto de iteraciones."""


class EndpointOffManifold(LabError):
    """Un extremo del camino no está sobre su pozo."""


# ---------- Geometría de la interfaz ----------

class AtCenter(LabError):
    """La normal no está definida en el centro de la esfera."""


class SampleOutsideTube(LabError):
    """Muestra fuera de B_{δ₀/2}(Σ_t)."""


class ExtinctionReached(LabError):
    """La esfera se acerca a la extinción antes del horizonte."""


# ---------- Datos iniciales ----------

class InsideCollar(LabError):
    """Ψ_δ no está definida dentro del collar B_δ(Σ₀)."""


class OutsideDomainOfSide(LabError):
    """El punto no pertenece al dominio del lado pedido."""


class CollarTooWide(LabError):
    """El collar 2δ no cabe en el tubo δ₀ de la interfaz."""


# ---------- Solver ----------

class StabilityViolation(LabError):
    """La norma del máximo creció más de un 10% en un paso."""


class MaxPrincipleViolation(LabError):
    """La solución salió de la cota del principio del máximo."""


# ---------- Diagnósticos ----------

class DataCorrupt(LabError):
    """Un integrando que debe ser no negativo tiene nodos negativos."""


class TooFewRecords(LabError):
    """El monitor de Gronwall necesita al menos 3 registros."""


class EmptyLevelSet(LabError):
    """El conjunto de nivel pedido es vacío en la malla."""


class TraceOffManifoldTube(LabError):
    """Una traza muestreada no está cerca de su pozo esperado."""


class BoundaryNode(LabError):
    """Operación solo definida en nodos interiores."""


class InvalidOffset(LabError):
    """Offset de muestreo fuera del rango admitido."""
