"""
Calabi flow on the flat torus in potential form.

The Kähler form ω_φ = ω + i∂∂̄φ has conformal factor h = 1 + ½Δ₀φ, so the
evolving metric is g = h·δ with scalar curvature s = −(1/h)Δ₀ log h, and
∂_tφ = s − s̄.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..tensor.algebra import integrate
from ..tensor.grid import Grid2Chart, MetricField2
from ..tensor.spectral import flat_laplacian, gradient_components
from ..utils.validators import PotentialDegenerate, first_failing_node, validate_finite

logger = logging.getLogger(__name__)

# principal part of the linearized velocity is −CALABI_IMPLICIT_COEFFICIENT·Δ₀²φ
CALABI_IMPLICIT_COEFFICIENT = 0.5


@dataclass(frozen=True, eq=False)
class CalabiPotential:
    phi: np.ndarray
    chart: Grid2Chart

    def __post_init__(self):
        if self.phi.shape != self.chart.shape:
            raise ValueError(f"potential has shape {self.phi.shape}, expected {self.chart.shape}")
        validate_finite(self.phi, "phi")
        h = self.conformal_factor()
        if np.any(h <= 0):
            node = first_failing_node(h <= 0)
            raise PotentialDegenerate(node, h[node])

    @classmethod
    def zero(cls, chart):
        return cls(np.zeros(chart.shape), chart)

    def conformal_factor(self):
        return 1.0 + 0.5 * flat_laplacian(self.phi, self.chart)

    def metric(self):
        h = self.conformal_factor()
        return MetricField2(h, np.zeros(self.chart.shape), h.copy(), self.chart)

    def as_array(self):
        return self.phi[None, ...]

    @classmethod
    def from_array(cls, planes, chart):
        return cls(np.array(planes[0], dtype=float), chart)


def calabi_scalar_curvature(phi):
    h = phi.conformal_factor()
    return -flat_laplacian(np.log(h), phi.chart) / h


def calabi_velocity(phi):
    """dφ/dt = s − s̄ with s̄ the volume average of s."""
    g = phi.metric()
    s = calabi_scalar_curvature(phi)
    mean = integrate(s, g) / integrate(1.0, g)
    return s - mean


def calabi_energy(phi):
    """∫ s² dV, the functional the Calabi flow decreases."""
    s = calabi_scalar_curvature(phi)
    return integrate(s * s, phi.metric())


def calabi_l2(phi):
    return float(np.sqrt(max(calabi_energy(phi), 0.0)))


def calabi_metric_velocity(phi, velocity=None):
    """∂_t g = ½Δ₀(∂_tφ)·δ as 2x2 components."""
    velocity = calabi_velocity(phi) if velocity is None else velocity
    dh = 0.5 * flat_laplacian(velocity, phi.chart)
    zero = np.zeros_like(dh)
    return np.array([[dh, zero], [zero, dh]])


def calabi_dissipation(phi):
    """−d/dt ∫s² dV = ∫(Δs)² dV − ∫ s|∇s|² dV, i.e. twice ‖(∇²s)°‖²."""
    chart = phi.chart
    h = phi.conformal_factor()
    s = calabi_scalar_curvature(phi)
    lap_s = flat_laplacian(s, chart) / h
    grad_sq = (gradient_components(s, chart) ** 2).sum(axis=0) / h
    g = phi.metric()
    return integrate(lap_s * lap_s, g) - integrate(s * grad_sq, g)
