"""
The curvature energy F = ½∫|Rm|² dV, its L² gradient and the flow velocities.

Grid metrics (MetricField2) are handled by tensor calculus; homogeneous
metrics (ProductSphereMetric, MilnorFrameMetric) by their closed forms.
"""

import logging

import numpy as np

from ..curvature.bundle import rcheck, riemann
from ..curvature.tensor_calculus import covariant_derivative_components, hessian, trace_first_pair
from ..homogeneous.reduction import homogeneous_ftilde_grad, homogeneous_grad, homogeneous_velocity
from ..tensor.algebra import integrate, inverse_components, l2_norm, symmetric_part, trace, volume
from ..tensor.grid import MetricField2, TensorField
from ..utils.validators import VolumeNonPositive
from .spec import FlowKind

logger = logging.getLogger(__name__)


def is_grid_metric(g):
    return isinstance(g, MetricField2)


def dimension_of(g):
    return 2 if is_grid_metric(g) else g.DIMENSION


def geometry_volume(g):
    vol = volume(g) if is_grid_metric(g) else g.volume()
    if not vol > 0:
        raise VolumeNonPositive(f"volume {vol} is not positive")
    return vol


def energy_F(g, bundle=None):
    if not is_grid_metric(g):
        return float(np.real(g.energy()))
    if bundle is None:
        bundle = riemann(g)
    return 0.5 * integrate(bundle.norm_rm_sq, g)


def delta_d_ricci(g, bundle, delta_sign=1.0):
    """δdRc with (dRc)_kij = ∇_kR_ij − ∇_iR_kj and δα_ij = −2g^{kl}∇_kα_lij."""
    gamma = bundle.gamma.components
    nabla_rc = covariant_derivative_components(bundle.rc.components, gamma, g.chart)
    d_rc = nabla_rc - np.swapaxes(nabla_rc, 0, 1)
    nabla_d_rc = covariant_derivative_components(d_rc, gamma, g.chart)
    return -2.0 * delta_sign * trace_first_pair(nabla_d_rc, inverse_components(g))


def grad_F(g, bundle=None, delta_sign=1.0):
    """grad F = δdRc − Ř + ¼|Rm|²g.

    Returns a symmetric TensorField for grid metrics and the coefficient vector
    of the reduced gradient for homogeneous ones. ``delta_sign`` flips the δ
    term for mutation testing only.
    """
    if not is_grid_metric(g):
        return homogeneous_grad(g.energy_of, g)
    if bundle is None:
        bundle = riemann(g)
    if bundle.rcheck is None:
        bundle.rcheck = rcheck(bundle, g)
    comps = (
        delta_d_ricci(g, bundle, delta_sign)
        - bundle.rcheck.components
        + 0.25 * bundle.norm_rm_sq * g.components()
    )
    return TensorField(symmetric_part(comps), g.chart, 2)


def surface_gradient_oracle(g, bundle=None):
    """Closed form on surfaces: 2∇²K − (2ΔK + K²)g."""
    if bundle is None:
        bundle = riemann(g)
    K = TensorField.scalar(bundle.gauss, g.chart)
    hess = hessian(K, g, bundle.gamma).components
    lap = trace(hess, g)
    comps = 2 * hess - (2 * lap + bundle.gauss**2) * g.components()
    return TensorField(symmetric_part(comps), g.chart, 2)


def normalization_coefficient(F, vol, n):
    return (n - 4) / (2 * n) * F / vol


def flow_velocity(g, spec, gradient=None, F=None):
    """∂_t g for the L² flow or its volume-normalized variant."""
    if spec.kind == FlowKind.SURFACE_CALABI:
        raise ValueError("the Calabi flow evolves a potential; use calabi_velocity")
    if not is_grid_metric(g):
        return homogeneous_velocity(g, spec.kind)
    if gradient is None:
        gradient = grad_F(g)
    comps = -gradient.components
    if spec.kind == FlowKind.VOLUME_NORMALIZED:
        F = energy_F(g) if F is None else F
        comps = comps + normalization_coefficient(F, geometry_volume(g), 2) * g.components()
    return TensorField(comps, g.chart, 2)


def energy_Ftilde(g, n=None, F=None):
    """F̃ = Vol^{(4−n)/n}·F, invariant under g → cg."""
    n = dimension_of(g) if n is None else n
    F = energy_F(g) if F is None else F
    return geometry_volume(g) ** ((4 - n) / n) * F


def grad_Ftilde(g, n=None, gradient=None, F=None):
    n = dimension_of(g) if n is None else n
    if not is_grid_metric(g):
        return homogeneous_ftilde_grad(g)
    gradient = grad_F(g) if gradient is None else gradient
    F = energy_F(g) if F is None else F
    vol = geometry_volume(g)
    comps = vol ** ((4 - n) / n) * (
        gradient.components - normalization_coefficient(F, vol, n) * g.components()
    )
    return TensorField(comps, g.chart, 2)


def trace_free_fraction(T, g):
    """‖T − ½(tr T)g‖ / ‖T‖ in L²(g); 0 for a vanishing T."""
    total = l2_norm(T, g)
    if total == 0:
        return 0.0
    comps = T.components - 0.5 * trace(T.components, g) * g.components()
    return l2_norm(comps, g) / total
