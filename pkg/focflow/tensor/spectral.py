"""
Fourier-spectral and finite-difference derivatives on the periodic chart.

All helpers act on the last two array axes (the grid axes), so they apply
unchanged to scalars and to stacked tensor components.
"""

import logging

import numpy as np
from scipy import fft as sfft

from ..constants import MAX_SPECTRAL_ORDER
from ..utils.validators import validate_finite, validate_range
from .grid import TensorField

logger = logging.getLogger(__name__)

# 8th-order central stencils, offsets -4..4
_FD_FIRST = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_FD_SECOND = np.array(
    [-1 / 560, 8 / 315, -1 / 5, 8 / 5, -205 / 72, 8 / 5, -1 / 5, 8 / 315, -1 / 560]
)


def _grid_axis(axis):
    if axis not in (1, 2):
        raise ValueError(f"axis must be 1 or 2, got {axis}")
    return -2 if axis == 1 else -1


def _multiplier(chart, axis, order):
    n = chart.N1 if axis == 1 else chart.N2
    h = chart.h1 if axis == 1 else chart.h2
    k = 2 * np.pi * sfft.rfftfreq(n, d=h)
    mult = (1j * k) ** order
    if order % 2 and n % 2 == 0:
        mult[-1] = 0.0
    return mult


def partial(values, chart, axis, order=1):
    """Spectral derivative of a raw component array along a grid axis."""
    validate_range(order, 0, MAX_SPECTRAL_ORDER, "order")
    validate_finite(values, "field")
    if order == 0:
        return np.array(values, dtype=float, copy=True)
    ax = _grid_axis(axis)
    n = values.shape[ax]
    mult = _multiplier(chart, axis, order)
    shape = [1] * values.ndim
    shape[ax] = mult.size
    spectrum = sfft.rfft(values, axis=ax)
    return sfft.irfft(spectrum * mult.reshape(shape), n=n, axis=ax)


def spectral_partial(f, axis, order=1):
    """Componentwise ∂^order along ``axis`` of a TensorField; valence unchanged."""
    return TensorField(partial(f.components, f.chart, axis, order), f.chart, f.valence, f.upper)


def gradient_components(values, chart):
    """Stack (∂_1 f, ∂_2 f) as a new leading axis."""
    return np.stack([partial(values, chart, 1), partial(values, chart, 2)])


def flat_laplacian(values, chart):
    k1, k2 = chart.wavevector_grid()
    spectrum = sfft.fft2(values, axes=(-2, -1))
    return sfft.ifft2(-(k1**2 + k2**2) * spectrum, axes=(-2, -1)).real


def flat_bilaplacian(values, chart):
    return flat_laplacian(flat_laplacian(values, chart), chart)


def fourth_order_symbol(chart):
    """|ξ|⁴ on the FFT grid."""
    k1, k2 = chart.wavevector_grid()
    return (k1**2 + k2**2) ** 2


def solve_shifted_bilaplacian(rhs, chart, coefficient, dt):
    """Solve (1 + dt*c*Δ₀²) u = rhs spectrally."""
    denominator = 1.0 + dt * coefficient * fourth_order_symbol(chart)
    spectrum = sfft.fft2(rhs, axes=(-2, -1))
    return sfft.ifft2(spectrum / denominator, axes=(-2, -1)).real


def dealias(values, chart):
    """Zero every Fourier mode beyond two thirds of the resolved band on either axis."""
    spectrum = sfft.fft2(values, axes=(-2, -1))
    m1 = np.abs(sfft.fftfreq(chart.N1) * chart.N1) > chart.N1 / 3
    m2 = np.abs(sfft.fftfreq(chart.N2) * chart.N2) > chart.N2 / 3
    spectrum[..., m1, :] = 0.0
    spectrum[..., :, m2] = 0.0
    return sfft.ifft2(spectrum, axes=(-2, -1)).real


def _fd_apply(values, stencil, h, ax):
    out = np.zeros_like(values, dtype=float)
    for offset, weight in zip(range(-4, 5), stencil):
        if weight:
            out += weight * np.roll(values, -offset, axis=ax)
    return out / h


def finite_difference_partial(f, axis, order=1):
    """8th-order central-difference counterpart of :func:`spectral_partial`."""
    return TensorField(fd_partial(f.components, f.chart, axis, order), f.chart, f.valence, f.upper)


def fd_partial(values, chart, axis, order=1):
    validate_range(order, 0, MAX_SPECTRAL_ORDER, "order")
    validate_finite(values, "field")
    ax = _grid_axis(axis)
    h = chart.h1 if axis == 1 else chart.h2
    out = np.asarray(values, dtype=float)
    remaining = order
    while remaining >= 2:
        out = _fd_apply(out, _FD_SECOND, h * h, ax)
        remaining -= 2
    if remaining:
        out = _fd_apply(out, _FD_FIRST, h, ax)
    return out


def random_smooth_field(chart, rng, amplitude=1.0, max_mode=3):
    """Real band-limited field sum of modes with |k_i| <= max_mode, sup-normalized to ``amplitude``."""
    x, y = chart.coordinates()
    field = np.zeros(chart.shape)
    for p in range(-max_mode, max_mode + 1):
        for q in range(0, max_mode + 1):
            if q == 0 and p <= 0:
                continue
            phase = 2 * np.pi * (p * x / chart.L1 + q * y / chart.L2)
            a, b = rng.normal(size=2) / (1 + p * p + q * q)
            field += a * np.cos(phase) + b * np.sin(phase)
    peak = np.max(np.abs(field))
    return amplitude * field / peak if peak > 0 else field
