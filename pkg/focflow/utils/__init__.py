from .validators import *
from .decorators import *

__all__ = [
    'FlowLabError', 'NonSPDMetric', 'NonFiniteField', 'ChartMismatch', 'ValenceOverflow',
    'PotentialDegenerate', 'StepRejected', 'RangeEmpty', 'VolumeNonPositive', 'Inconclusive',
    'RequiresBoundedCurvature', 'ConfigError', 'SymmetryDefect',
    'validate_positive', 'validate_range', 'validate_finite', 'validate_grid_size',
    'first_failing_node', 'timer',
]
