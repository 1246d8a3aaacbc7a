"""
S²(a) × S²(b) with round factors, parametrized by A = a², B = b².
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..constants import PI, TWO_PI
from ..utils.validators import validate_positive
from .reduction import parallel_ricci_gradient

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProductSphereMetric:
    a2: float
    b2: float

    BLOCK_DIMS = (2, 2)
    DIMENSION = 4
    COEFFICIENT_NAMES = ("a2", "b2")

    def __post_init__(self):
        validate_positive(self.a2, "a2")
        validate_positive(self.b2, "b2")

    @property
    def coefficients(self):
        return np.array([self.a2, self.b2], dtype=float)

    @classmethod
    def from_coefficients(cls, coeffs):
        return cls(float(np.real(coeffs[0])), float(np.real(coeffs[1])))

    @staticmethod
    def energy_of(coeffs):
        a2, b2 = coeffs
        return 32 * PI**2 * (a2 / b2 + b2 / a2)

    @staticmethod
    def volume_of(coeffs):
        a2, b2 = coeffs
        return 16 * PI**2 * a2 * b2

    @staticmethod
    def norm_rm_sq_of(coeffs):
        a2, b2 = coeffs
        return 4 / a2**2 + 4 / b2**2

    def energy(self):
        return self.energy_of(self.coefficients)

    def volume(self):
        return self.volume_of(self.coefficients)

    def scaled(self, c):
        return ProductSphereMetric(c * self.a2, c * self.b2)


@dataclass(frozen=True)
class ProductSphereInvariants:
    K1: float
    K2: float
    norm_rm_sq: float
    F: float
    Vol: float
    grad_factors: tuple

    @property
    def is_critical(self):
        return max(abs(c) for c in self.grad_factors) <= 1e-12 * (self.K1**2 + self.K2**2)


def product_sphere_invariants(m):
    """Closed-form curvature data; grad F = c1·g1 ⊕ c2·g2 with (c1, c2) = grad_factors.

    The factors come from the frame curvature tensor: Rc is parallel on the
    product, so grad F = −Ř + ¼|Rm|²g pointwise and stays block diagonal.
    """
    inv_a4 = 1.0 / m.a2**2
    inv_b4 = 1.0 / m.b2**2
    grad = parallel_ricci_gradient(product_sphere_curvature_tensor(m))
    return ProductSphereInvariants(
        K1=1.0 / m.a2,
        K2=1.0 / m.b2,
        norm_rm_sq=4 * inv_a4 + 4 * inv_b4,
        F=m.energy(),
        Vol=m.volume(),
        grad_factors=(float(grad[0, 0]), float(grad[2, 2])),
    )


def product_sphere_curvature_tensor(m):
    """R_ijkl in an orthonormal frame adapted to the two factors."""
    rm = np.zeros((4, 4, 4, 4))
    for block, K in (((0, 1), 1.0 / m.a2), ((2, 3), 1.0 / m.b2)):
        i, j = block
        rm[i, j, j, i] = rm[j, i, i, j] = K
        rm[i, j, i, j] = rm[j, i, j, i] = -K
    return rm


def closed_geodesic_proxy(m):
    """Length of the shortest great circle of either factor."""
    return TWO_PI * float(np.sqrt(min(m.a2, m.b2)))


def coefficient_flow(t, y):
    """dA/dt, dB/dt under −grad F, for use with scipy's solve_ivp."""
    a2, b2 = y
    return np.array([1.0 / a2 - a2 / b2**2, 1.0 / b2 - b2 / a2**2])
