"""
Periodic grid chart and the field containers living on it.

Node (i, j) sits at x = (i*h1, j*h2); array axis 0 runs along coordinate 1 and
axis 1 along coordinate 2. Tensor components are stored with the index slots
first and the two grid axes last, i.e. shape ``(2,)*valence + (N1, N2)``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..utils.validators import (
    ChartMismatch,
    NonSPDMetric,
    first_failing_node,
    validate_finite,
    validate_grid_size,
    validate_positive,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid2Chart:
    L1: float
    L2: float
    N1: int
    N2: int

    def __post_init__(self):
        validate_positive(self.L1, "L1")
        validate_positive(self.L2, "L2")
        validate_grid_size(self.N1, "N1")
        validate_grid_size(self.N2, "N2")

    @property
    def h1(self):
        return self.L1 / self.N1

    @property
    def h2(self):
        return self.L2 / self.N2

    @property
    def spacing(self):
        return (self.h1, self.h2)

    @property
    def shape(self):
        return (self.N1, self.N2)

    @property
    def cell_area(self):
        return self.h1 * self.h2

    def coordinates(self):
        x = np.arange(self.N1) * self.h1
        y = np.arange(self.N2) * self.h2
        return np.meshgrid(x, y, indexing="ij")

    def wavenumbers(self, axis):
        """Angular wavenumbers along ``axis`` (1 or 2), in FFT order."""
        if axis == 1:
            return 2 * np.pi * np.fft.fftfreq(self.N1, d=self.h1)
        if axis == 2:
            return 2 * np.pi * np.fft.fftfreq(self.N2, d=self.h2)
        raise ValueError(f"axis must be 1 or 2, got {axis}")

    def wavevector_grid(self):
        return np.meshgrid(self.wavenumbers(1), self.wavenumbers(2), indexing="ij")

    def node(self, i, j):
        return (int(i) % self.N1, int(j) % self.N2)

    def flat_index(self, i, j):
        i, j = self.node(i, j)
        return i * self.N2 + j

    def refined(self, factor=2):
        return Grid2Chart(self.L1, self.L2, self.N1 * factor, self.N2 * factor)


def require_same_chart(*charts):
    first = charts[0]
    for other in charts[1:]:
        if other != first:
            raise ChartMismatch(f"fields live on different charts: {first} vs {other}")
    return first


@dataclass(frozen=True, eq=False)
class TensorField:
    """Per-node components of a tensor with ``valence`` index slots.

    ``upper`` counts how many leading slots are contravariant (Christoffel
    symbols carry one). ``symmetries`` lists ``(slot_a, slot_b, sign)``
    triples that must hold exactly in storage.
    """

    components: np.ndarray
    chart: Grid2Chart
    valence: int
    upper: int = 0
    symmetries: tuple = field(default=())

    def __post_init__(self):
        expected = (2,) * self.valence + self.chart.shape
        if self.components.shape != expected:
            raise ValueError(f"components have shape {self.components.shape}, expected {expected}")
        for a, b, sign in self.symmetries:
            swapped = np.swapaxes(self.components, a, b)
            if not np.array_equal(self.components, sign * swapped):
                raise ValueError(f"declared symmetry ({a}, {b}, {sign:+d}) does not hold in storage")

    @classmethod
    def scalar(cls, values, chart):
        return cls(np.asarray(values, dtype=float), chart, 0)

    @classmethod
    def zeros(cls, chart, valence):
        return cls(np.zeros((2,) * valence + chart.shape), chart, valence)

    @property
    def is_scalar(self):
        return self.valence == 0

    def with_components(self, components, symmetries=()):
        return TensorField(components, self.chart, self.valence, self.upper, symmetries)

    def translated(self, shift):
        rolled = np.roll(self.components, shift, axis=(-2, -1))
        return TensorField(rolled, self.chart, self.valence, self.upper, self.symmetries)

    def sup_abs(self):
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0


@dataclass(frozen=True, eq=False)
class MetricField2:
    """Symmetric positive definite 2x2 metric on a periodic chart."""

    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray
    chart: Grid2Chart

    def __post_init__(self):
        for name in ("g11", "g12", "g22"):
            values = getattr(self, name)
            if values.shape != self.chart.shape:
                raise ValueError(f"{name} has shape {values.shape}, expected {self.chart.shape}")
            validate_finite(values, name)
        bad = (self.g11 <= 0) | (self.det() <= 0)
        if np.any(bad):
            node = first_failing_node(bad)
            logger.debug("rejecting non-SPD metric at node %s", node)
            raise NonSPDMetric(node)

    @classmethod
    def from_components(cls, components, chart):
        comps = np.asarray(components, dtype=float)
        g12 = 0.5 * (comps[0, 1] + comps[1, 0])
        return cls(comps[0, 0].copy(), g12, comps[1, 1].copy(), chart)

    @classmethod
    def identity(cls, chart, scale=1.0):
        ones = np.full(chart.shape, float(scale))
        return cls(ones, np.zeros(chart.shape), ones.copy(), chart)

    @classmethod
    def conformal(cls, u, chart):
        """Metric e^{2u} delta."""
        factor = np.exp(2 * np.asarray(u, dtype=float))
        return cls(factor, np.zeros(chart.shape), factor.copy(), chart)

    @classmethod
    def diagonal(cls, a, b, chart):
        return cls(
            np.broadcast_to(np.asarray(a, dtype=float), chart.shape).copy(),
            np.zeros(chart.shape),
            np.broadcast_to(np.asarray(b, dtype=float), chart.shape).copy(),
            chart,
        )

    def det(self):
        return self.g11 * self.g22 - self.g12 * self.g12

    def components(self):
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])

    def as_tensor(self):
        return TensorField(self.components(), self.chart, 2, symmetries=((0, 1, 1),))

    def scaled(self, c):
        return MetricField2(c * self.g11, c * self.g12, c * self.g22, self.chart)

    def plus(self, h, eps=1.0):
        """Metric g + eps*h for a symmetric 2-tensor ``h`` (array or TensorField)."""
        comps = h.components if isinstance(h, TensorField) else np.asarray(h)
        return MetricField2.from_components(self.components() + eps * comps, self.chart)

    def translated(self, shift):
        roll = lambda a: np.roll(a, shift, axis=(0, 1))
        return MetricField2(roll(self.g11), roll(self.g12), roll(self.g22), self.chart)

    def as_array(self):
        """Stacked (g11, g12, g22) planes, the layout used by integrators and snapshots."""
        return np.stack([self.g11, self.g12, self.g22])

    @classmethod
    def from_array(cls, planes, chart):
        return cls(planes[0].copy(), planes[1].copy(), planes[2].copy(), chart)


@dataclass(frozen=True, eq=False)
class CutoffFunction:
    gamma: np.ndarray
    chart: Grid2Chart
    center: tuple
    radius: float

    def __post_init__(self):
        if self.gamma.shape != self.chart.shape:
            raise ValueError("cutoff profile does not match its chart")
        if np.any(self.gamma < 0) or np.any(self.gamma > 1):
            raise ValueError("cutoff profile must take values in [0, 1]")
        validate_positive(self.radius, "radius")

    @property
    def outer_radius(self):
        return 2 * self.radius

    def as_field(self):
        return TensorField.scalar(self.gamma, self.chart)
