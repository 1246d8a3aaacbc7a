"""
Empirical constants of the smoothing estimates, measured on trajectories.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from ..curvature.bundle import derivative_norms, riemann
from ..curvature.tensor_calculus import bilaplacian
from ..flow.states import is_calabi_state, is_homogeneous_state, state_metric
from ..flow.trajectory import interpolate_state
from ..functionals.calabi import CALABI_IMPLICIT_COEFFICIENT
from ..tensor.algebra import integrate, pointwise_norm
from ..tensor.distance import ball_mask
from ..utils.validators import RangeEmpty, ValenceOverflow, validate_positive

logger = logging.getLogger(__name__)


def _require_grid(traj, name):
    if is_homogeneous_state(traj.states[0]):
        raise ValueError(f"{name} needs a torus-grid trajectory")


def smoothing_monitor(traj, m):
    """sup_t supDerivRm[m] / (K(t) + t^{-1/2})^{1+m/2} with K(t) the running sup of supRm.

    Time is measured from the first stored state; each record's
    ``smoothing_ratio[m]`` is filled in.
    """
    if m > len(traj.records[0].supDerivRm) - 1:
        raise ValenceOverflow(f"m = {m} exceeds the derivatives recorded along the run")
    worst = 0.0
    K = 0.0
    for t, record in zip(traj.times, traj.records):
        K = max(K, record.supRm)
        elapsed = t - traj.t_start
        if elapsed <= 0:
            record.smoothing_ratio[m] = 0.0
            continue
        ratio = record.supDerivRm[m] / (K + elapsed**-0.5) ** (1.0 + 0.5 * m)
        record.smoothing_ratio[m] = float(ratio)
        worst = max(worst, ratio)
    logger.info("smoothing monitor m = %d: worst ratio %.6g", m, worst)
    return float(worst)


@dataclass(frozen=True)
class SobolevEstimate:
    raw: float
    normalized: float
    duration: float


def local_sobolev_monitor(traj, center, r, m, sample_every=1):
    """Empirical constant of ‖∇ᵐRm‖²_{L²(B_r)} ≤ (C/tᵐ) sup ‖Rm‖²_{L²(B_2r)}.

    Balls are taken in g(T). ``normalized`` divides the raw constant by T^{m/2},
    which makes it invariant under parabolic rescaling.
    """
    _require_grid(traj, "local_sobolev_monitor")
    validate_positive(r, "r")
    duration = traj.T - traj.t_start
    if duration <= 0:
        raise RangeEmpty("the trajectory has no duration")
    g_final = state_metric(traj.states[-1])
    inner = ball_mask(g_final, center, r)
    outer = ball_mask(g_final, center, 2 * r)
    best_num = 0.0
    best_den = 0.0
    indices = sorted(set(range(0, len(traj), max(sample_every, 1))) | {len(traj) - 1})
    for i in indices:
        g = state_metric(traj.states[i])
        norms = derivative_norms(g, m)
        best_den = max(best_den, integrate(np.where(outer, norms[0] ** 2, 0.0), g))
        elapsed = traj.times[i] - traj.t_start
        if elapsed > 0:
            local = integrate(np.where(inner, norms[m] ** 2, 0.0), g)
            best_num = max(best_num, elapsed**m * local)
    if best_den <= 0:
        return SobolevEstimate(0.0, 0.0, duration)
    raw = best_num / best_den
    return SobolevEstimate(raw, raw / duration ** (0.5 * m), duration)


def curvature_evolution_residual(traj):
    """sup_t ‖∂_tRm + Δ²Rm‖ / (‖∇²Rm‖‖Rm‖ + ‖∇Rm‖² + ‖Rm‖³), sup norms throughout."""
    _require_grid(traj, "curvature_evolution_residual")
    worst = 0.0
    previous = riemann(state_metric(traj.states[0]))
    for i in range(len(traj) - 1):
        t0, t1 = traj.times[i], traj.times[i + 1]
        dt = t1 - t0
        current = riemann(state_metric(traj.states[i + 1]))
        g = state_metric(interpolate_state(traj, t0 + 0.5 * dt))
        mid = riemann(g, m_max=2)
        rate = (current.rm.components - previous.rm.components) / dt
        residual = rate + bilaplacian(mid.rm, g, mid.gamma).components
        sups = mid.deriv_sup
        envelope = sups[2] * sups[0] + sups[1] ** 2 + sups[0] ** 3
        if envelope > 0:
            worst = max(worst, float(np.max(pointwise_norm(residual, g))) / envelope)
        previous = current
    return worst


@dataclass(frozen=True)
class ModeDecay:
    mode: tuple
    wavenumber: float
    observed_rate: float
    predicted_rate: float

    @property
    def relative_error(self):
        return abs(self.observed_rate - self.predicted_rate) / self.predicted_rate


def _gauss_spectra(traj):
    return [sfft.fft2(riemann(state_metric(s)).gauss) for s in traj.states]


def linearized_mode_decay(traj, modes=None):
    """Decay rates of Fourier modes of the Gauss curvature against the flat principal symbol.

    Near the flat metric K̂(ξ) decays like exp(−c|ξ|⁴t) with c = 1 for the L²
    flows and c = ½ for the Calabi flow. ``modes`` are integer index pairs; the
    dominant nonzero mode at the start is used when omitted.
    """
    _require_grid(traj, "linearized_mode_decay")
    if len(traj) < 2:
        raise RangeEmpty("mode decay needs at least two states")
    chart = state_metric(traj.states[0]).chart
    spectra = _gauss_spectra(traj)
    if modes is None:
        amplitude = np.abs(spectra[0])
        amplitude[0, 0] = 0.0
        modes = [tuple(int(v) for v in np.unravel_index(np.argmax(amplitude), amplitude.shape))]
    k1, k2 = chart.wavevector_grid()
    coefficient = CALABI_IMPLICIT_COEFFICIENT if is_calabi_state(traj.states[0]) else 1.0
    times = np.asarray(traj.times)
    results = []
    for mode in modes:
        i, j = chart.node(*mode)
        xi_sq = k1[i, j] ** 2 + k2[i, j] ** 2
        amplitudes = np.array([abs(spectrum[i, j]) for spectrum in spectra])
        usable = amplitudes > 0
        slope = np.polyfit(times[usable], np.log(amplitudes[usable]), 1)[0]
        results.append(ModeDecay((i, j), float(np.sqrt(xi_sq)), float(-slope), coefficient * xi_sq**2))
        logger.debug("mode %s: observed rate %.6g, predicted %.6g", (i, j), -slope, coefficient * xi_sq**2)
    return results
