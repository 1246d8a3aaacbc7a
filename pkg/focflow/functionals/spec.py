import logging
from dataclasses import dataclass, field, replace
from enum import Enum

from ..constants import (
    DEFAULT_DT0,
    DEFAULT_TOLERANCE,
    DT_MAX,
    DT_MIN,
    EXPLICIT_KAPPA,
    M_MAX,
    MAX_STEPS,
)
from ..utils.validators import validate_positive, validate_range

logger = logging.getLogger(__name__)


class FlowKind(Enum):
    L2_FLOW = "L2Flow"
    VOLUME_NORMALIZED = "VolumeNormalizedL2"
    SURFACE_CALABI = "SurfaceCalabi"


class GeometryKind(Enum):
    TORUS_GRID = "TorusGrid"
    PRODUCT_SPHERES = "ProductSpheres"
    MILNOR_FRAME = "MilnorFrame"


GEOMETRY_DIMENSION = {
    GeometryKind.TORUS_GRID: 2,
    GeometryKind.PRODUCT_SPHERES: 4,
    GeometryKind.MILNOR_FRAME: 3,
}


@dataclass(frozen=True)
class IntegratorParams:
    tol: float = DEFAULT_TOLERANCE
    dt0: float = DEFAULT_DT0
    dt_min: float = DT_MIN
    dt_max: float = DT_MAX
    scheme: str = "imex"
    dealias: bool = True
    m_max: int = 2
    kappa: float = EXPLICIT_KAPPA
    max_steps: int = MAX_STEPS

    def __post_init__(self):
        validate_positive(self.tol, "tol")
        validate_positive(self.dt0, "dt0")
        validate_positive(self.dt_min, "dt_min")
        validate_positive(self.dt_max, "dt_max")
        validate_range(self.m_max, 0, M_MAX, "m_max")
        if self.scheme not in ("imex", "rk4"):
            raise ValueError(f"scheme must be 'imex' or 'rk4', got {self.scheme!r}")


@dataclass(frozen=True)
class FlowSpec:
    kind: FlowKind
    geometry: GeometryKind = GeometryKind.TORUS_GRID
    params: IntegratorParams = field(default_factory=IntegratorParams)

    def __post_init__(self):
        if self.kind == FlowKind.SURFACE_CALABI and self.geometry != GeometryKind.TORUS_GRID:
            raise ValueError("SurfaceCalabi runs only on the torus grid (n = 2)")

    @property
    def n(self):
        return GEOMETRY_DIMENSION[self.geometry]

    @property
    def is_grid(self):
        return self.geometry == GeometryKind.TORUS_GRID

    def with_params(self, **changes):
        return replace(self, params=replace(self.params, **changes))
