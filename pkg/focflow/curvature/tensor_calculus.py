"""
Levi-Civita connection calculus on the torus chart.

Conventions: Γ[k, i, j] = Γ^k_ij. A covariant derivative puts its new index
first, (∇T)[a, i1, ..., iv] = ∇_a T_{i1...iv}. Only all-lower tensors are
differentiated.
"""

import logging

import numpy as np

from ..constants import M_MAX, MAX_VALENCE
from ..tensor.algebra import inverse_components
from ..tensor.grid import TensorField, require_same_chart
from ..tensor.spectral import gradient_components
from ..utils.validators import ValenceOverflow

logger = logging.getLogger(__name__)

_SLOTS = "bcdefghijklmno"


def metric_derivative(g):
    """dg[a, i, j] = ∂_a g_ij."""
    return gradient_components(g.components(), g.chart)


def christoffel(g):
    dg = metric_derivative(g)
    lowered = 0.5 * (
        np.einsum("ijlXY->lijXY", dg) + np.einsum("jilXY->lijXY", dg) - dg
    )
    gamma = np.einsum("klXY,lijXY->kijXY", inverse_components(g), lowered)
    gamma = 0.5 * (gamma + np.swapaxes(gamma, 1, 2))
    return TensorField(gamma, g.chart, 3, upper=1, symmetries=((1, 2, 1),))


def _connection_term(components, gamma, slot):
    valence = components.ndim - 2
    idx = _SLOTS[:valence]
    replaced = idx[:slot] + "p" + idx[slot + 1 :]
    return np.einsum(f"pa{idx[slot]}XY,{replaced}XY->a{idx}XY", gamma, components)


def covariant_derivative_components(components, gamma, chart):
    valence = components.ndim - 2
    if valence + 1 > MAX_VALENCE:
        raise ValenceOverflow(f"cannot differentiate a valence-{valence} tensor (max {MAX_VALENCE})")
    out = gradient_components(components, chart)
    for slot in range(valence):
        out = out - _connection_term(components, gamma, slot)
    return out


def covariant_derivative(T, g, gamma=None):
    """∇T for an all-lower TensorField; valence grows by one."""
    require_same_chart(T.chart, g.chart)
    if T.upper:
        raise ValueError("covariant_derivative expects an all-lower tensor")
    if gamma is None:
        gamma = christoffel(g)
    comps = covariant_derivative_components(T.components, gamma.components, g.chart)
    return TensorField(comps, g.chart, T.valence + 1)


def nabla_sequence(rm, g, k, gamma=None):
    """[Rm, ∇Rm, ..., ∇ᵏRm] as component arrays."""
    if k > M_MAX:
        raise ValenceOverflow(f"k = {k} exceeds m_max = {M_MAX}")
    if gamma is None:
        gamma = christoffel(g)
    sequence = [rm.components]
    for _ in range(k):
        sequence.append(covariant_derivative_components(sequence[-1], gamma.components, g.chart))
    return sequence


def trace_first_pair(components, ginv):
    return np.einsum("abXY,ab...XY->...XY", ginv, components)


def rough_laplacian_components(components, g, gamma=None, ginv=None):
    if gamma is None:
        gamma = christoffel(g)
    if ginv is None:
        ginv = inverse_components(g)
    first = covariant_derivative_components(components, gamma.components, g.chart)
    second = covariant_derivative_components(first, gamma.components, g.chart)
    return trace_first_pair(second, ginv)


def rough_laplacian(T, g, gamma=None):
    """ΔT = g^{ab}∇_a∇_b T, componentwise on the remaining slots."""
    require_same_chart(T.chart, g.chart)
    comps = rough_laplacian_components(T.components, g, gamma)
    return TensorField(comps, g.chart, T.valence)


def bilaplacian(T, g, gamma=None):
    if gamma is None:
        gamma = christoffel(g)
    return rough_laplacian(rough_laplacian(T, g, gamma), g, gamma)


def hessian(f, g, gamma=None):
    """∇∇f of a scalar field, valence 2."""
    if gamma is None:
        gamma = christoffel(g)
    first = covariant_derivative(f, g, gamma)
    return covariant_derivative(first, g, gamma)
