"""
Symmetry-reduced L² gradient on diagonal homogeneous families.

For coefficients l_i with block dimensions d_i the L² pairing of diagonal
perturbations is ⟨h, k⟩ = Vol·Σ d_i h_i k_i / l_i², so the gradient has
coefficients v_i = l_i²/(Vol·d_i)·∂F/∂l_i.
"""

import logging

import numpy as np

from ..functionals.spec import FlowKind

logger = logging.getLogger(__name__)

COMPLEX_STEP = 1e-30


def energy_partials(energy_fn, coeffs):
    """∂F/∂l_i by complex-step differentiation (no subtractive cancellation)."""
    coeffs = np.asarray(coeffs, dtype=float)
    partials = np.empty_like(coeffs)
    for i in range(coeffs.size):
        shifted = coeffs.astype(complex)
        shifted[i] += 1j * COMPLEX_STEP
        partials[i] = np.imag(energy_fn(shifted)) / COMPLEX_STEP
    return partials


def homogeneous_grad(energy_fn, m):
    coeffs = m.coefficients
    dims = np.asarray(m.BLOCK_DIMS, dtype=float)
    vol = float(np.real(m.volume_of(coeffs)))
    return coeffs**2 * energy_partials(energy_fn, coeffs) / (vol * dims)


def l2_pairing(m, h, k):
    coeffs = m.coefficients
    dims = np.asarray(m.BLOCK_DIMS, dtype=float)
    return m.volume() * float(np.sum(dims * np.asarray(h) * np.asarray(k) / coeffs**2))


def homogeneous_velocity(m, kind, energy_fn=None):
    """Coefficient velocity dl/dt for the flow ``kind``."""
    energy_fn = energy_fn or m.energy_of
    grad = homogeneous_grad(energy_fn, m)
    if kind == FlowKind.L2_FLOW:
        return -grad
    if kind == FlowKind.VOLUME_NORMALIZED:
        n = m.DIMENSION
        correction = (n - 4) / (2 * n) * m.energy() / m.volume()
        return -grad + correction * m.coefficients
    raise ValueError(f"{kind.value} has no homogeneous reduction")


def homogeneous_ftilde_grad(m):
    """Coefficients of grad F̃ = Vol^{(4−n)/n}(grad F − ((n−4)/(2n))(F/Vol)g)."""
    n = m.DIMENSION
    vol = m.volume()
    correction = (n - 4) / (2 * n) * m.energy() / vol
    return vol ** ((4 - n) / n) * (homogeneous_grad(m.energy_of, m) - correction * m.coefficients)


def coefficient_l2_norm(m, v):
    return float(np.sqrt(max(l2_pairing(m, v, v), 0.0)))


def frame_rcheck(rm):
    return np.einsum("ipqr,jpqr->ij", rm, rm)


def frame_norm_sq(rm):
    return float(np.sum(rm * rm))


def parallel_ricci_gradient(rm):
    """grad F = −Ř + ¼|Rm|²g in an orthonormal frame, valid where ∇Rc = 0."""
    dim = rm.shape[0]
    return -frame_rcheck(rm) + 0.25 * frame_norm_sq(rm) * np.eye(dim)
