"""
Configuración de un run: documento JSON versionado → dataclasses congeladas.

La validación cruzada construye los objetos del laboratorio una vez, de modo
que cualquier error aparece como ConfigInvalid con la ruta del campo.
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from src.errors import CollarTooWide, ConfigInvalid, ExtinctionReached, LabError
from src.geometry.interface import InterfaceDescriptor
from src.geometry.target_manifold import ManifoldPair
from src.physics.initial_data import InitialData, InitialMaps, LinearPhase
from src.physics.potential import Potential
from src.solver.gl_solver import SolverConfig, dt_stability
from src.solver.grid import Grid

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def _require(section: dict, key: str, path: str) -> Any:
    if key not in section:
        raise ConfigInvalid(f"{path}.{key}", "campo obligatorio ausente")
    return section[key]


@dataclass(frozen=True)
class ManifoldSpec:
    kind: str
    params: dict
    tube_radius: float | None = None

    def build(self) -> ManifoldPair:
        p = self.params
        if self.kind == "two_spheres":
            return ManifoldPair.two_spheres(
                _require(p, "center_plus", "manifold"), _require(p, "radius_plus", "manifold"),
                _require(p, "center_minus", "manifold"), _require(p, "radius_minus", "manifold"),
                self.tube_radius,
            )
        if self.kind == "two_capsules":
            return ManifoldPair.two_capsules(
                _require(p, "segment_plus", "manifold"), _require(p, "radius_plus", "manifold"),
                _require(p, "segment_minus", "manifold"), _require(p, "radius_minus", "manifold"),
                self.tube_radius,
            )
        if self.kind == "two_points":
            return ManifoldPair.two_points(
                _require(p, "a_plus", "manifold"), _require(p, "a_minus", "manifold"),
                self.tube_radius,
            )
        raise ConfigInvalid("manifold.kind", f"tipo desconocido: {self.kind}")


@dataclass(frozen=True)
class PotentialSpec:
    c3: float = 1.0
    ramp: str = "cubic"
    delta0: float | None = None

    def build(self, manifold: ManifoldPair) -> Potential:
        if self.ramp not in ("cubic", "quintic"):
            raise ConfigInvalid("potential.ramp", f"rampa desconocida: {self.ramp}")
        return Potential(manifold, c3=self.c3, ramp=self.ramp, delta0=self.delta0)


@dataclass(frozen=True)
class InterfaceSpec:
    kind: str
    center: tuple[float, ...] | None = None
    r0: float | None = None
    x0: float | None = None
    delta0_geo: float | None = None

    def build(self, potential: Potential) -> InterfaceDescriptor:
        delta0_geo = self.delta0_geo if self.delta0_geo is not None else potential.params.delta0
        if self.kind == "shrinking_sphere":
            if self.center is None or self.r0 is None:
                raise ConfigInvalid("interface.r0", "shrinking_sphere requiere center y r0")
            return InterfaceDescriptor.shrinking_sphere(self.center, self.r0, delta0_geo)
        if self.kind == "stationary_point":
            if self.x0 is None:
                raise ConfigInvalid("interface.x0", "stationary_point requiere x0")
            return InterfaceDescriptor.stationary_point(self.x0, delta0_geo)
        raise ConfigInvalid("interface.kind", f"tipo desconocido: {self.kind}")


def _phase(raw: dict | None, path: str) -> LinearPhase | None:
    if raw is None:
        return None
    if raw.get("kind", "linear") != "linear":
        raise ConfigInvalid(f"{path}.kind", "solo se admiten fases lineales")
    return LinearPhase(int(_require(raw, "axis", path)), float(_require(raw, "slope", path)),
                       float(raw.get("offset", 0.0)))


@dataclass(frozen=True)
class InitialDataSpec:
    kind: str = "constant_minimal_pair"
    p_plus: tuple[float, ...] | None = None
    p_minus: tuple[float, ...] | None = None
    phase_plus: LinearPhase | None = None
    phase_minus: LinearPhase | None = None
    delta: float | None = None
    allow_mismatch: bool = False

    def build(self, potential: Potential) -> InitialMaps:
        if self.kind == "constant_minimal_pair":
            minimal = potential.manifold.minimal_sets()
            p_plus = self.p_plus if self.p_plus is not None else minimal.plus[0]
            p_minus = self.p_minus if self.p_minus is not None else minimal.minus[0]
            return InitialMaps.constant(p_plus, p_minus, self.delta, self.allow_mismatch)
        if self.kind == "sliding_segment_pair":
            if self.phase_plus is None:
                raise ConfigInvalid("initial_data.phase_plus", "falta la fase")
            return InitialMaps.sliding(self.phase_plus, self.phase_minus, self.delta,
                                       self.allow_mismatch)
        raise ConfigInvalid("initial_data.kind", f"tipo desconocido: {self.kind}")


@dataclass(frozen=True)
class GridSpec:
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    counts: tuple[int, ...]

    def build(self) -> Grid:
        return Grid(self.lo, self.hi, self.counts)

    def for_h(self, h: float) -> "GridSpec":
        """Misma caja con el paso más cercano a h."""
        counts = tuple(int(round((b - a) / h)) + 1 for a, b in zip(self.lo, self.hi))
        return replace(self, counts=counts)


@dataclass(frozen=True)
class SolverSpec:
    """
    Bloque solver del JSON.

    snapshots: "none", "final" o "every:K". K cuenta registros de diagnóstico
    (cada record_every pasos), no pasos del integrador: "every:2" con
    record_every=100 escribe un snapshot cada 200 pasos, empezando en t=0.
    """
    eps: float
    scheme: str = "heun"
    dt_safety: float = 0.25
    T_final: float = 0.0
    record_every: int = 100
    snapshots: str = "none"

    def build(self, eps: float | None = None) -> SolverConfig:
        return SolverConfig(
            eps=self.eps if eps is None else eps,
            scheme=self.scheme,
            dt_safety=self.dt_safety,
            T_final=self.T_final,
            record_every=self.record_every,
        )

    @property
    def snapshot_every(self) -> int | None:
        """None: sin snapshots; 0: solo el final; K: cada K registros."""
        if self.snapshots == "none":
            return None
        if self.snapshots == "final":
            return 0
        if self.snapshots.startswith("every:"):
            try:
                every = int(self.snapshots.split(":", 1)[1])
            except ValueError:
                every = 0
            if every >= 1:
                return every
        raise ConfigInvalid("solver.snapshots", f"valor inválido: {self.snapshots}")


@dataclass(frozen=True)
class DiagnosticsSpec:
    level_k: int | None = None
    offsets: tuple[float, ...] | None = None
    offsets_eps: tuple[float, ...] | None = None
    trace_samples: int = 64

    def offsets_for(self, eps: float) -> list[float] | None:
        if self.offsets is not None:
            return list(self.offsets)
        if self.offsets_eps is not None:
            return [m * eps for m in self.offsets_eps]
        return None


@dataclass(frozen=True)
class ConnectionSpec:
    p_plus: tuple[float, ...] | None = None
    p_minus: tuple[float, ...] | None = None
    nodes: int = 2001
    s_half: float | None = None
    samples: int = 0


@dataclass(frozen=True)
class SweepSpec:
    eps_list: tuple[float, ...] = ()
    h_over_eps: float | None = None
    grid_counts: tuple[tuple[int, ...], ...] | None = None
    acceptance: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RunConfig:
    name: str
    manifold: ManifoldSpec
    potential: PotentialSpec
    interface: InterfaceSpec
    initial_data: InitialDataSpec
    grid: GridSpec
    solver: SolverSpec
    diagnostics: DiagnosticsSpec = DiagnosticsSpec()
    connection: ConnectionSpec = ConnectionSpec()
    sweep: SweepSpec = SweepSpec()
    output_dir: str | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def with_eps(self, eps: float, grid: GridSpec | None = None) -> "RunConfig":
        return replace(self, solver=replace(self.solver, eps=eps), grid=grid or self.grid)

    def grid_for_eps(self, eps: float, index: int = 0) -> GridSpec:
        sweep = self.sweep
        if sweep.grid_counts is not None:
            return replace(self.grid, counts=tuple(sweep.grid_counts[index]))
        if sweep.h_over_eps is not None:
            return self.grid.for_h(sweep.h_over_eps * eps)
        return self.grid


def _tuple(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return tuple(_tuple(v) for v in value)
    return value


def parse_config(raw: dict, name: str = "run") -> RunConfig:
    """Documento JSON ya cargado → RunConfig (sin validación cruzada)."""
    if raw.get("version") != SCHEMA_VERSION:
        raise ConfigInvalid("version", f"se esperaba {SCHEMA_VERSION}, recibido {raw.get('version')}")
    try:
        m = dict(_require(raw, "manifold", "config"))
        manifold = ManifoldSpec(
            kind=_require(m, "kind", "manifold"),
            params={k: v for k, v in m.items() if k not in ("kind", "tube_radius")},
            tube_radius=m.get("tube_radius"),
        )
        potential = PotentialSpec(**raw.get("potential", {}))
        i = _require(raw, "interface", "config")
        interface = InterfaceSpec(
            kind=_require(i, "kind", "interface"),
            center=_tuple(i.get("center")),
            r0=i.get("r0"),
            x0=i.get("x0"),
            delta0_geo=i.get("delta0_geo"),
        )
        d = raw.get("initial_data", {})
        initial = InitialDataSpec(
            kind=d.get("kind", "constant_minimal_pair"),
            p_plus=_tuple(d.get("p_plus")),
            p_minus=_tuple(d.get("p_minus")),
            phase_plus=_phase(d.get("phase_plus"), "initial_data.phase_plus"),
            phase_minus=_phase(d.get("phase_minus"), "initial_data.phase_minus"),
            delta=d.get("delta"),
            allow_mismatch=bool(d.get("allow_mismatch", False)),
        )
        g = _require(raw, "grid", "config")
        grid = GridSpec(
            lo=_tuple(_require(g, "lo", "grid")),
            hi=_tuple(_require(g, "hi", "grid")),
            counts=_tuple(_require(g, "counts", "grid")),
        )
        s = _require(raw, "solver", "config")
        solver = SolverSpec(**s)
        diag = raw.get("diagnostics", {})
        diagnostics = DiagnosticsSpec(
            level_k=diag.get("level_k"),
            offsets=_tuple(diag.get("offsets")),
            offsets_eps=_tuple(diag.get("offsets_eps")),
            trace_samples=int(diag.get("trace_samples", 64)),
        )
        c = raw.get("connection", {})
        connection = ConnectionSpec(
            p_plus=_tuple(c.get("p_plus")),
            p_minus=_tuple(c.get("p_minus")),
            nodes=int(c.get("nodes", 2001)),
            s_half=c.get("s_half"),
            samples=int(c.get("samples", 0)),
        )
        sw = raw.get("sweep", {})
        sweep = SweepSpec(
            eps_list=_tuple(sw.get("eps_list", ())),
            h_over_eps=sw.get("h_over_eps"),
            grid_counts=_tuple(sw.get("grid_counts")),
            acceptance=dict(sw.get("acceptance", {})),
        )
    except TypeError as exc:
        raise ConfigInvalid("config", f"campo desconocido o mal tipado: {exc}") from exc
    return RunConfig(
        name=raw.get("name", name),
        manifold=manifold,
        potential=potential,
        interface=interface,
        initial_data=initial,
        grid=grid,
        solver=solver,
        diagnostics=diagnostics,
        connection=connection,
        sweep=sweep,
        output_dir=raw.get("output_dir"),
        raw=raw,
    )


def load_config(path: str | Path, validate: bool = True) -> RunConfig:
    """
    Lee y valida un archivo de configuración.

    Raises:
        ConfigInvalid: con la ruta del campo problemático
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigInvalid("config", f"no existe {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid("config", f"JSON inválido en {path}: {exc}") from exc
    config = parse_config(raw, name=path.stem)
    if validate:
        validate_config(config)
    logger.info(f"Configuración cargada: {path} ({config.name})")
    return config


@dataclass
class LabSetup:
    """Objetos del laboratorio construidos a partir de una configuración."""
    manifold: ManifoldPair
    potential: Potential
    interface: InterfaceDescriptor
    maps: InitialMaps
    initial_data: InitialData
    grid: Grid
    solver: SolverConfig


def build_setup(config: RunConfig) -> LabSetup:
    manifold = config.manifold.build()
    potential = config.potential.build(manifold)
    interface = config.interface.build(potential)
    maps = config.initial_data.build(potential)
    try:
        initial_data = InitialData(maps, interface, potential)
    except CollarTooWide as exc:
        raise ConfigInvalid("initial_data.delta", str(exc)) from exc
    grid = config.grid.build()
    return LabSetup(manifold, potential, interface, maps, initial_data, grid, config.solver.build())


def _clearance(interface: InterfaceDescriptor, grid: Grid) -> float:
    lo, hi = np.asarray(grid.lo), np.asarray(grid.hi)
    c = interface.center
    if interface.kind == "stationary_point":
        return float(min(c[0] - lo[0], hi[0] - c[0]))
    return float(min((c - lo).min(), (hi - c).min()) - interface.r0)


def validate_config(config: RunConfig) -> LabSetup:
    """
    Validación cruzada: invariantes de los pozos, ancho del collar, dt > 0,
    holgura de Σ₀ respecto de ∂Ω, horizonte y par mínimo inicial.
    """
    try:
        setup = build_setup(config)
    except ConfigInvalid:
        raise
    except LabError as exc:
        raise ConfigInvalid("config", str(exc)) from exc

    manifold, potential, interface, grid = (
        setup.manifold, setup.potential, setup.interface, setup.grid,
    )
    if interface.spatial_dim != grid.dim:
        raise ConfigInvalid("interface", f"dimensión {interface.spatial_dim} ≠ dimensión de la malla {grid.dim}")
    for name in ("phase_plus", "phase_minus"):
        phase = getattr(setup.maps, name)
        if phase is not None and not 0 <= phase.axis < grid.dim:
            raise ConfigInvalid(f"initial_data.{name}.axis", "eje fuera de rango")
    if setup.maps.kind == "constant_minimal_pair" and setup.maps.p_plus.shape != (manifold.ambient_dim,):
        raise ConfigInvalid("initial_data.p_plus", "dimensión distinta de la del espacio destino")

    clearance = _clearance(interface, grid)
    if clearance < interface.delta0_geo:
        raise ConfigInvalid(
            "interface.r0" if interface.kind == "shrinking_sphere" else "interface.x0",
            f"Σ₀ a distancia {clearance:.6g} de ∂Ω, se requiere ≥ δ₀={interface.delta0_geo:.6g}",
        )
    try:
        interface.check_horizon(config.solver.T_final)
    except ExtinctionReached as exc:
        raise ConfigInvalid("solver.T_final", str(exc)) from exc

    dt = dt_stability(grid.h, config.solver.eps, grid.dim, potential.hessian_bound(),
                      config.solver.dt_safety, config.solver.scheme)
    if not (dt > 0 and math.isfinite(dt)):
        raise ConfigInvalid("solver.dt_safety", f"dt de estabilidad no válido: {dt}")

    if not config.initial_data.allow_mismatch and not setup.maps.minimal_on_interface(interface, potential):
        raise ConfigInvalid("initial_data", "u_in^± no forman un par mínimo sobre Σ₀")
    _ = config.solver.snapshot_every
    return setup
