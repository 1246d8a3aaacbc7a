import numpy as np

from ..constants import MIN_NODES_PER_AXIS


class FlowLabError(ValueError):
    """Base class for every domain error raised by focflow."""


class NonSPDMetric(FlowLabError):
    def __init__(self, node, message=None):
        self.node = tuple(int(i) for i in node)
        super().__init__(message or f"metric is not positive definite at node {self.node}")


class NonFiniteField(FlowLabError):
    pass


class ChartMismatch(FlowLabError):
    pass


class ValenceOverflow(FlowLabError):
    pass


class PotentialDegenerate(FlowLabError):
    def __init__(self, node, value):
        self.node = tuple(int(i) for i in node)
        self.value = float(value)
        super().__init__(
            f"conformal factor 1 + 0.5*lap(phi) = {self.value:.3e} <= 0 at node {self.node}"
        )


class StepRejected(FlowLabError):
    pass


class RangeEmpty(FlowLabError):
    pass


class VolumeNonPositive(FlowLabError):
    pass


class Inconclusive(FlowLabError):
    pass


class RequiresBoundedCurvature(FlowLabError):
    pass


class ConfigError(FlowLabError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class SymmetryDefect(UserWarning):
    """Curvature tensor needed a large correction to satisfy its symmetries."""


def validate_positive(value, name: str):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return True


def validate_range(value, min_value, max_value, name: str):
    if not (min_value <= value <= max_value):
        raise ValueError(f"{name} must lie in [{min_value}, {max_value}], got {value}")
    return True


def validate_finite(array, name: str):
    values = np.asarray(array)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise NonFiniteField(f"{name} has a non-finite entry at index {tuple(bad)}")
    return True


def validate_grid_size(count, name: str):
    if count < MIN_NODES_PER_AXIS or count % 2:
        raise ValueError(f"{name} must be even and at least {MIN_NODES_PER_AXIS}, got {count}")
    return True


def first_failing_node(mask):
    """Return the first (row-major) node index where ``mask`` is True."""
    return tuple(np.argwhere(mask)[0])
