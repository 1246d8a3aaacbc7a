"""
Pass/fail checks of the short-time control lemmas along a stored trajectory:
uniform equivalence of metrics, growth of geodesic balls and the evolution of
a fixed cutoff function.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..constants import DISTANCE_SLACK_SPACINGS, EQUIVALENCE_TOLERANCE
from ..flow.states import is_homogeneous_state, state_metric
from ..flow.trajectory import interpolate_state
from ..tensor.algebra import eigenvalue_bounds, relative_log_eigenvalues
from ..tensor.distance import distance_field, systole_proxy
from ..utils.validators import RangeEmpty, validate_positive
from .record import cutoff_norms

logger = logging.getLogger(__name__)

CUTOFF_RELATIVE_SLACK = 1e-2


@dataclass(frozen=True)
class CheckResult:
    passed: bool
    margin: float
    detail: dict

    def __bool__(self):
        return self.passed


def observed_speed(traj, s, t):
    """Largest recorded |∂_t g|_g on the stored times bracketing [s, t]."""
    lo, hi = min(s, t), max(s, t)
    times = np.asarray(traj.times)
    first = max(int(np.searchsorted(times, lo, side="right")) - 1, 0)
    last = min(int(np.searchsorted(times, hi, side="left")), len(times) - 1)
    return max(record.dtg_sup for record in traj.records[first : last + 1])


def _log_eigenvalue_extent(state_s, state_t):
    if is_homogeneous_state(state_s):
        logs = np.log(state_t.coefficients / state_s.coefficients)
        return float(np.max(np.abs(logs)))
    low, high = relative_log_eigenvalues(state_metric(state_s), state_metric(state_t))
    return float(max(np.max(np.abs(low)), np.max(np.abs(high))))


def metric_equivalence_check(traj, s, t, a_scale=1.0):
    """e^{−A|t−s|} g(s) ≤ g(t) ≤ e^{A|t−s|} g(s) with A the observed speed.

    ``a_scale`` multiplies A; values below 1 test the sensitivity of the check.
    """
    for value in (s, t):
        if not traj.t_start <= value <= traj.T:
            raise RangeEmpty(f"time {value} is outside [{traj.t_start}, {traj.T}]")
    A = a_scale * observed_speed(traj, s, t)
    bound = A * abs(t - s)
    extent = 0.0 if s == t else _log_eigenvalue_extent(interpolate_state(traj, s), interpolate_state(traj, t))
    margin = bound - extent
    # local error accumulated over the steps inside the window
    times = np.asarray(traj.times)
    steps = int(np.count_nonzero((times > min(s, t)) & (times <= max(s, t))))
    slack = max(steps, 1) * traj.spec.params.tol + EQUIVALENCE_TOLERANCE
    passed = margin >= -slack
    logger.debug("equivalence on [%g, %g]: A = %.6g, margin %.3e", s, t, A, margin)
    return CheckResult(bool(passed), float(margin), {"A": A, "log_extent": extent, "slack": slack})


def ball_radius_factor(A, t):
    """r_A(t) = 1/(1 + (e^{At} − 1)^{1/2})."""
    return 1.0 / (1.0 + np.sqrt(np.expm1(A * t)))


def distance_slack(*metrics):
    """Graph-distance accuracy: a couple of grid spacings measured in the metric."""
    worst = 0.0
    for g in metrics:
        _, high = eigenvalue_bounds(g)
        worst = max(worst, max(g.chart.spacing) * float(np.sqrt(np.max(high))))
    return DISTANCE_SLACK_SPACINGS * worst


def ball_growth_check(traj, center, rho, t, a_scale=1.0):
    """B_{g(t)}(x, r_A ρ) ⊆ B_{g(0)}(x, ρ) and B_{g(0)}(x, r_A ρ) ⊆ B_{g(t)}(x, ρ)."""
    if is_homogeneous_state(traj.states[0]):
        raise ValueError("ball_growth_check needs a torus-grid trajectory")
    validate_positive(rho, "rho")
    g0 = state_metric(traj.states[0])
    gt = state_metric(interpolate_state(traj, t))
    systole = traj.records[0].systole_proxy or systole_proxy(g0)
    if rho >= 0.5 * systole:
        raise ValueError(f"rho = {rho} is not below half the systole proxy {systole:.6g}")
    elapsed = t - traj.t_start
    A = a_scale * observed_speed(traj, traj.t_start, t)
    r_a = ball_radius_factor(A, elapsed)
    d0 = distance_field(g0, center)
    dt = distance_field(gt, center)
    slack = distance_slack(g0, gt)
    forward = rho - float(np.max(d0[dt <= r_a * rho]))
    backward = rho - float(np.max(dt[d0 <= r_a * rho]))
    margin = min(forward, backward)
    return CheckResult(
        bool(margin >= -slack),
        margin,
        {"A": A, "r_A": float(r_a), "slack": slack, "forward": forward, "backward": backward},
    )


def cutoff_evolution_check(traj, cutoff, bound_scale=1.0):
    """Observed |dγ|_{g(t)} and |∇∇γ|_{g(t)} against the integrated lemma bounds.

    Per interval, with A and B the larger recorded sup|∂_t g| and sup|∇∂_t g|:
    |dγ| grows at most by e^{AΔt/2} and |∇∇γ| obeys (|∇∇γ|)' ≤ A|∇∇γ| + (3/2)B|dγ|.
    ``bound_scale`` multiplies the t = 0 values and both rates.
    """
    if is_homogeneous_state(traj.states[0]):
        raise ValueError("cutoff_evolution_check needs a torus-grid trajectory")
    observed = []
    for state in traj.states:
        d_norm, h_norm = cutoff_norms(cutoff.gamma, state_metric(state))
        observed.append((float(np.max(d_norm)), float(np.max(h_norm))))
    d_bound = bound_scale * observed[0][0]
    h_bound = bound_scale * observed[0][1]
    bounds = [(d_bound, h_bound)]
    for i in range(len(traj) - 1):
        dt = traj.times[i + 1] - traj.times[i]
        rec0, rec1 = traj.records[i], traj.records[i + 1]
        A = bound_scale * max(rec0.dtg_sup, rec1.dtg_sup)
        B = bound_scale * max(rec0.dtg_grad_sup, rec1.dtg_grad_sup)
        d_bound *= np.exp(0.5 * A * dt)
        h_bound = np.exp(A * dt) * (h_bound + 1.5 * B * d_bound * dt)
        bounds.append((float(d_bound), float(h_bound)))
    margin = np.inf
    for (d_obs, h_obs), (d_b, h_b) in zip(observed, bounds):
        margin = min(margin, d_b * (1 + CUTOFF_RELATIVE_SLACK) - d_obs, h_b * (1 + CUTOFF_RELATIVE_SLACK) - h_obs)
    margin += EQUIVALENCE_TOLERANCE
    L_observed = 0.0
    for record, (d, h) in zip(traj.records, observed):
        L_observed = max(L_observed, d + h)
        record.L_observed = max(record.L_observed, L_observed)
    return CheckResult(bool(margin >= 0), float(margin), {"L_observed": L_observed, "bounds": bounds})
