"""
Left-invariant metrics on SU(2) diagonal in a Milnor frame.

The frame X1, X2, X3 satisfies [X_i, X_j] = 2X_k (cyclic), so l1 = l2 = l3 = 1
is the unit round 3-sphere.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..constants import M_MAX, PI, TWO_PI
from ..utils.validators import ValenceOverflow, validate_positive

logger = logging.getLogger(__name__)

_CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def _structure_constants(coeffs):
    """λ_i with [e_j, e_k] = λ_i e_i in the orthonormal frame e_i = X_i/√l_i."""
    l1, l2, l3 = coeffs
    return (
        2 * np.sqrt(l1) / np.sqrt(l2 * l3),
        2 * np.sqrt(l2) / np.sqrt(l3 * l1),
        2 * np.sqrt(l3) / np.sqrt(l1 * l2),
    )


def _sectional_curvatures(coeffs):
    """(K23, K31, K12) from Milnor's principal Ricci curvatures."""
    lam = _structure_constants(coeffs)
    half = 0.5 * (lam[0] + lam[1] + lam[2])
    mu = [half - value for value in lam]
    r = [2 * mu[j] * mu[k] for i, j, k in _CYCLIC]
    return tuple(0.5 * (r[j] + r[k] - r[i]) for i, j, k in _CYCLIC)


@dataclass(frozen=True)
class MilnorFrameMetric:
    l1: float
    l2: float
    l3: float

    BLOCK_DIMS = (1, 1, 1)
    DIMENSION = 3
    COEFFICIENT_NAMES = ("l1", "l2", "l3")

    def __post_init__(self):
        for name in self.COEFFICIENT_NAMES:
            validate_positive(getattr(self, name), name)

    @property
    def coefficients(self):
        return np.array([self.l1, self.l2, self.l3], dtype=float)

    @classmethod
    def from_coefficients(cls, coeffs):
        return cls(*(float(np.real(c)) for c in coeffs))

    @staticmethod
    def norm_rm_sq_of(coeffs):
        return 4 * sum(K * K for K in _sectional_curvatures(coeffs))

    @staticmethod
    def volume_of(coeffs):
        l1, l2, l3 = coeffs
        return 2 * PI**2 * np.sqrt(l1 * l2 * l3)

    @classmethod
    def energy_of(cls, coeffs):
        return 0.5 * cls.norm_rm_sq_of(coeffs) * cls.volume_of(coeffs)

    def energy(self):
        return float(np.real(self.energy_of(self.coefficients)))

    def volume(self):
        return float(np.real(self.volume_of(self.coefficients)))

    def scaled(self, c):
        return MilnorFrameMetric(c * self.l1, c * self.l2, c * self.l3)


def milnor_invariants(m):
    coeffs = m.coefficients
    K23, K31, K12 = _sectional_curvatures(coeffs)
    lam = _structure_constants(coeffs)
    half = 0.5 * sum(lam)
    mu = [half - value for value in lam]
    return {
        "sectional": {"K23": float(K23), "K31": float(K31), "K12": float(K12)},
        "ricci": tuple(float(2 * mu[j] * mu[k]) for i, j, k in _CYCLIC),
        "normRmSq": float(m.norm_rm_sq_of(coeffs)),
        "F": m.energy(),
        "Vol": m.volume(),
    }


def milnor_structure_tensor(m):
    """c[i, j, k] = c_ij^k in the orthonormal Milnor frame."""
    lam = _structure_constants(m.coefficients)
    c = np.zeros((3, 3, 3))
    for i, j, k in _CYCLIC:
        c[j, k, i] = lam[i]
        c[k, j, i] = -lam[i]
    return c


def koszul_connection(c):
    """Γ[i, j, k] = Γ_ij^k with ∇_{e_i} e_j = Γ_ij^k e_k for an orthonormal frame."""
    return 0.5 * (c - np.einsum("jki->ijk", c) + np.einsum("kij->ijk", c))


def frame_covariant_derivative(gamma, tensor):
    """∇T of a left-invariant all-lower tensor; the new index comes first."""
    out = np.zeros((tensor.shape[0],) + tensor.shape)
    for slot in range(tensor.ndim):
        moved = np.moveaxis(tensor, slot, 0)
        term = np.einsum("asp,p...->as...", gamma, moved)
        out -= np.moveaxis(term, 1, slot + 1)
    return out


def left_invariant_curvature(c, m_max=0):
    """Rm and ∇ᵏRm (k <= m_max) of a left-invariant metric from its structure constants.

    ``c[i, j, k] = c_ij^k`` must be given in an orthonormal left-invariant frame.
    Returns the list [Rm, ∇Rm, ...] with components R_ijkl in that frame.
    """
    if m_max > M_MAX:
        raise ValenceOverflow(f"m = {m_max} exceeds m_max = {M_MAX}")
    gamma = koszul_connection(c)
    rm = (
        np.einsum("jkp,ipl->ijkl", gamma, gamma)
        - np.einsum("ikp,jpl->ijkl", gamma, gamma)
        - np.einsum("ijp,pkl->ijkl", c, gamma)
    )
    sequence = [rm]
    for _ in range(m_max):
        sequence.append(frame_covariant_derivative(gamma, sequence[-1]))
    return sequence


def closed_geodesic_proxy(m):
    """Length of the shortest one-parameter-subgroup orbit through the identity."""
    return TWO_PI * float(np.sqrt(min(m.l1, m.l2, m.l3)))
