from .grid import Grid2Chart, MetricField2, TensorField, CutoffFunction
from .spectral import spectral_partial, finite_difference_partial, dealias
from .algebra import metric_inverse, contract_norm_sq, integrate, volume
from .distance import grid_distance, distance_field, systole_proxy, ball_mask, cutoff_function
from .snapshot import write_snapshot, read_snapshot

__all__ = [
    'Grid2Chart', 'MetricField2', 'TensorField', 'CutoffFunction',
    'spectral_partial', 'finite_difference_partial', 'dealias',
    'metric_inverse', 'contract_norm_sq', 'integrate', 'volume',
    'grid_distance', 'distance_field', 'systole_proxy', 'ball_mask', 'cutoff_function',
    'write_snapshot', 'read_snapshot',
]
