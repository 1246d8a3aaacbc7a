"""
Adaptive time stepping for every flow kind.

Grid flows take linearly implicit steps: a flat bilaplacian −cΔ₀² is treated
implicitly through spectral multipliers and the nonlinear remainder
explicitly. Local error is estimated by step doubling. Homogeneous families
reduce to coefficient ODEs and are stepped with an embedded Runge–Kutta pair.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import DOP853

from ..constants import (
    IMEX_REFRESH_DRIFT,
    STEP_GROWTH_MAX,
    STEP_SAFETY,
    STEP_SHRINK_MIN,
)
from ..diagnostics.record import build_record
from ..functionals.calabi import CALABI_IMPLICIT_COEFFICIENT
from ..homogeneous.reduction import homogeneous_velocity
from ..tensor.algebra import max_inverse_eigenvalue
from ..tensor.spectral import flat_bilaplacian, solve_shifted_bilaplacian
from ..utils.decorators import timer
from ..utils.validators import (
    FlowLabError,
    NonSPDMetric,
    PotentialDegenerate,
    StepRejected,
    validate_positive,
)
from .states import (
    is_calabi_state,
    is_homogeneous_state,
    state_array,
    state_from_array,
    state_velocity,
)
from .trajectory import FlowTrajectory, TerminationStatus, attach_residuals

logger = logging.getLogger(__name__)

SCHEME_ORDER = {"imex": 1, "rk4": 4}


@dataclass
class StepContext:
    """Mutable per-run state of the grid integrator."""

    coefficient: float = 0.0
    refreshes: int = 0
    delta_sign: float = 1.0
    degenerate: bool = False

    def refresh(self, state):
        estimate = implicit_coefficient(state)
        c = self.coefficient
        if c <= 0 or estimate > IMEX_REFRESH_DRIFT * c or estimate < c / IMEX_REFRESH_DRIFT:
            self.coefficient = estimate
            self.refreshes += 1
            logger.debug("implicit coefficient refreshed to %.6g", estimate)
        return self.coefficient


def implicit_coefficient(state):
    """Constant c of the implicit −cΔ₀² part, from the principal symbol at ``state``."""
    if is_calabi_state(state):
        h = state.conformal_factor()
        return CALABI_IMPLICIT_COEFFICIENT * float(np.max(1.0 / h)) ** 2
    return (2.0 * max_inverse_eigenvalue(state)) ** 2


def explicit_dt_cap(state, spec, coefficient):
    """dt ≤ κ·h⁴/c for the fully explicit fallback."""
    h = min(state.chart.spacing)
    return spec.params.kappa * h**4 / coefficient


def _rebuild(values, template):
    try:
        return state_from_array(values, template)
    except NonSPDMetric as exc:
        raise StepRejected(f"step left the SPD cone: {exc}") from exc
    except PotentialDegenerate:
        raise
    except FlowLabError as exc:
        raise StepRejected(str(exc)) from exc


def _imex_step(state, dt, spec, context):
    c = context.coefficient or context.refresh(state)
    u = state_array(state)
    v = state_velocity(state, spec, delta_sign=context.delta_sign)
    chart = state.chart
    rhs = u + dt * (v + c * flat_bilaplacian(u, chart))
    return solve_shifted_bilaplacian(rhs, chart, c, dt)


def _rk4_step(state, dt, spec, context):
    def f(values):
        return state_velocity(_rebuild(values, state), spec, delta_sign=context.delta_sign)

    y = state_array(state)
    k1 = dt * f(y)
    k2 = dt * f(y + k1 / 2)
    k3 = dt * f(y + k2 / 2)
    k4 = dt * f(y + k3)
    return y + (k1 + 2 * k2 + 2 * k3 + k4) / 6


def _ode_step(state, dt, spec):
    def f(t, y):
        return homogeneous_velocity(type(state).from_coefficients(y), spec.kind)

    solver = DOP853(f, 0.0, state_array(state), dt, rtol=spec.params.tol, atol=spec.params.tol)
    while solver.status == "running":
        solver.step()
    if solver.status != "finished":
        raise StepRejected(solver.message or "embedded Runge-Kutta step failed")
    return solver.y


def step(state, dt, spec, context=None):
    """Advance ``state`` by one step of size ``dt``.

    Raises StepRejected when the result leaves the admissible set, and
    PotentialDegenerate when a Calabi potential loses positivity of 1 + ½Δ₀φ.
    """
    validate_positive(dt, "dt")
    context = context or StepContext()
    if is_homogeneous_state(state):
        values = _ode_step(state, dt, spec)
    elif spec.params.scheme == "rk4":
        values = _rk4_step(state, dt, spec, context)
    else:
        values = _imex_step(state, dt, spec, context)
    if not np.all(np.isfinite(values)):
        raise StepRejected("non-finite values after step")
    return _rebuild(values, state)


def _doubled_step(state, dt, spec, context):
    """(coarse, fine) results of one full step and two half steps."""
    coarse = step(state, dt, spec, context)
    fine = step(step(state, 0.5 * dt, spec, context), 0.5 * dt, spec, context)
    return coarse, fine


def local_error(coarse, fine):
    y1, y2 = state_array(coarse), state_array(fine)
    return float(np.max(np.abs(y2 - y1)) / max(1.0, float(np.max(np.abs(y2)))))


def next_dt(dt, err, tol, order):
    if err <= 0:
        return dt * STEP_GROWTH_MAX
    factor = STEP_SAFETY * (tol / err) ** (1.0 / (order + 1))
    return dt * float(np.clip(factor, STEP_SHRINK_MIN, STEP_GROWTH_MAX))


def _finish(traj, status):
    traj.set_status(status)
    if len(traj) >= 2:
        attach_residuals(traj)
    logger.info(
        "run finished with %s at t = %.6g after %d steps", status.value, traj.T, traj.accepted_steps
    )
    return traj


def _run_homogeneous(initial, spec, t_end, t_start):
    params = spec.params
    traj = FlowTrajectory(spec)
    traj.append(t_start, initial, build_record(t_start, initial, spec))
    template = initial

    def f(t, y):
        return homogeneous_velocity(type(template).from_coefficients(y), spec.kind)

    solver = DOP853(
        f,
        t_start,
        state_array(initial),
        t_end,
        rtol=params.tol,
        atol=params.tol,
        max_step=params.dt_max,
        first_step=min(params.dt0, t_end - t_start),
    )
    status = TerminationStatus.COMPLETED
    while solver.status == "running":
        if traj.accepted_steps >= params.max_steps:
            status = TerminationStatus.STEP_COLLAPSE
            break
        try:
            solver.step()
            if solver.status == "failed":
                logger.warning("coefficient ODE failed: %s", solver.message)
                status = TerminationStatus.SINGULARITY_CANDIDATE
                break
            state = type(template).from_coefficients(solver.y)
        except (FlowLabError, ValueError) as exc:
            logger.warning("homogeneous state degenerated near t = %.6g: %s", solver.t, exc)
            status = TerminationStatus.SINGULARITY_CANDIDATE
            break
        if not np.all(np.isfinite(solver.y)):
            status = TerminationStatus.STEP_COLLAPSE
            break
        traj.append(
            solver.t,
            state,
            build_record(solver.t, state, spec, dt=solver.t - traj.T, previous=traj.records[-1]),
        )
    return _finish(traj, status)


def _run_grid(initial, spec, t_end, t_start, cutoff, delta_sign):
    params = spec.params
    order = SCHEME_ORDER[params.scheme]
    context = StepContext(delta_sign=delta_sign)
    context.refresh(initial)
    traj = FlowTrajectory(spec, cutoff=cutoff)
    traj.append(
        t_start, initial, build_record(t_start, initial, spec, cutoff=cutoff, delta_sign=delta_sign)
    )
    state, t = initial, t_start
    dt = min(params.dt0, params.dt_max)
    end_slack = 1e-14 * max(1.0, abs(t_end))

    while t_end - t > end_slack:
        if traj.accepted_steps >= params.max_steps:
            return _finish(traj, TerminationStatus.STEP_COLLAPSE)
        dt = min(dt, t_end - t)
        if params.scheme == "rk4":
            dt = min(dt, explicit_dt_cap(state, spec, context.coefficient))
        try:
            coarse, fine = _doubled_step(state, dt, spec, context)
            err = local_error(coarse, fine)
        except PotentialDegenerate as exc:
            logger.debug("rejected dt = %.3g: %s", dt, exc)
            context.degenerate = True
            err = np.inf
        except StepRejected as exc:
            logger.debug("rejected dt = %.3g: %s", dt, exc)
            err = np.inf

        if np.isfinite(err) and err <= params.tol:
            t += dt
            state = fine
            context.degenerate = False
            record = build_record(
                t, state, spec, dt=dt, previous=traj.records[-1], cutoff=cutoff, delta_sign=delta_sign
            )
            traj.append(t, state, record)
            if not record.is_finite():
                return _finish(traj, TerminationStatus.STEP_COLLAPSE)
            context.refresh(state)
            dt = min(next_dt(dt, err, params.tol, order), params.dt_max)
        elif np.isfinite(err):
            dt = next_dt(dt, err, params.tol, order)
        else:
            dt *= STEP_SHRINK_MIN

        if dt < params.dt_min and t_end - t > end_slack:
            if context.degenerate:
                return _finish(traj, TerminationStatus.POTENTIAL_DEGENERATE)
            return _finish(traj, TerminationStatus.SINGULARITY_CANDIDATE)
    return _finish(traj, TerminationStatus.COMPLETED)


@timer
def run(initial, spec, t_end, cutoff=None, delta_sign=1.0, t_start=0.0):
    """Integrate from ``initial`` over [t_start, t_end] recording every accepted step.

    Step failures surface as the trajectory's termination status.
    """
    if not t_end > t_start:
        raise ValueError(f"t_end = {t_end} must exceed t_start = {t_start}")
    logger.info(
        "running %s on %s to t = %g (scheme %s, tol %.1e)",
        spec.kind.value,
        spec.geometry.value,
        t_end,
        spec.params.scheme,
        spec.params.tol,
    )
    if is_homogeneous_state(initial):
        return _run_homogeneous(initial, spec, t_end, t_start)
    return _run_grid(initial, spec, t_end, t_start, cutoff, delta_sign)
