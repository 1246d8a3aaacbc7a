"""
Pointwise metric algebra: inverses, index raising, norms and integrals.
"""

import logging
import string

import numpy as np

from ..constants import MAX_VALENCE
from ..utils.validators import ValenceOverflow, validate_finite
from .grid import TensorField, require_same_chart

logger = logging.getLogger(__name__)

_SLOTS = string.ascii_lowercase[:16]


def inverse_components(g):
    det = g.det()
    return np.array([[g.g22, -g.g12], [-g.g12, g.g11]]) / det


def metric_inverse(g):
    """Per-node inverse g^{ij} as an upper-index TensorField."""
    # MetricField2 rejects non-SPD data at construction, raising NonSPDMetric
    return TensorField(inverse_components(g), g.chart, 2, upper=2, symmetries=((0, 1, 1),))


def raise_slot(components, ginv, slot):
    """Contract ``slot`` with g^{..}; the other slots keep their position."""
    valence = components.ndim - 2
    idx = _SLOTS[:valence]
    out = idx[:slot] + "z" + idx[slot + 1 :]
    return np.einsum(f"z{idx[slot]}XY,{idx}XY->{out}XY", ginv, components)


def raise_all(components, ginv):
    out = components
    for slot in range(components.ndim - 2):
        out = raise_slot(out, ginv, slot)
    return out


def _check_valence(valence):
    if valence > MAX_VALENCE:
        raise ValenceOverflow(f"valence {valence} exceeds the supported maximum {MAX_VALENCE}")


def pointwise_inner(S, T, g, ginv=None):
    """⟨S, T⟩_g at every node for all-lower tensors given as arrays or TensorFields."""
    s = S.components if isinstance(S, TensorField) else S
    t = T.components if isinstance(T, TensorField) else T
    if s.shape != t.shape:
        raise ValueError(f"cannot pair shapes {s.shape} and {t.shape}")
    valence = s.ndim - 2
    _check_valence(valence)
    if ginv is None:
        ginv = inverse_components(g)
    raised = raise_all(t, ginv)
    return np.sum(s * raised, axis=tuple(range(valence))) if valence else s * raised


def contract_norm_sq(T, g, ginv=None):
    """|T|²_g with one inverse-metric factor per index slot."""
    if isinstance(T, TensorField):
        require_same_chart(T.chart, g.chart)
    return np.maximum(pointwise_inner(T, T, g, ginv), 0.0)


def pointwise_norm(T, g, ginv=None):
    return np.sqrt(contract_norm_sq(T, g, ginv))


def volume_density(g):
    return np.sqrt(g.det())


def integrate(f, g):
    """∫ f dV_g as the node sum of f·√det g·h1·h2."""
    values = f.components if isinstance(f, TensorField) else np.asarray(f, dtype=float)
    if isinstance(f, TensorField):
        require_same_chart(f.chart, g.chart)
    validate_finite(values, "integrand")
    values = np.broadcast_to(values, g.chart.shape)
    return float(np.sum(values * volume_density(g)) * g.chart.cell_area)


def volume(g):
    return integrate(1.0, g)


def l2_inner(S, T, g):
    return integrate(pointwise_inner(S, T, g), g)


def l2_norm(T, g):
    return float(np.sqrt(max(l2_inner(T, T, g), 0.0)))


def trace(components, g, ginv=None):
    """g^{ij} S_ij for a symmetric 2-tensor."""
    if ginv is None:
        ginv = inverse_components(g)
    return np.einsum("abXY,abXY->XY", ginv, components)


def eigenvalue_bounds(g):
    """Pointwise (λ_min, λ_max) of the symmetric 2x2 metric."""
    half_trace = 0.5 * (g.g11 + g.g22)
    radius = np.sqrt(0.25 * (g.g11 - g.g22) ** 2 + g.g12**2)
    return half_trace - radius, half_trace + radius


def max_inverse_eigenvalue(g):
    low, _ = eigenvalue_bounds(g)
    return float(np.max(1.0 / low))


def relative_log_eigenvalues(g_s, g_t):
    """Pointwise log-eigenvalues of g_s⁻¹ g_t (generalized eigenproblem g_t v = μ g_s v)."""
    require_same_chart(g_s.chart, g_t.chart)
    m = np.einsum("abXY,bcXY->acXY", inverse_components(g_s), g_t.components())
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = np.sqrt(np.maximum(0.25 * tr * tr - det, 0.0))
    return np.log(0.5 * tr - disc), np.log(0.5 * tr + disc)


def symmetric_part(components):
    return 0.5 * (components + np.swapaxes(components, 0, 1))
