"""
Uniform access to the three kinds of flow state.

A state is a MetricField2 (grid flows), a CalabiPotential (Calabi flow) or a
homogeneous metric. Integrators and trajectory tools work on the flat array
layout returned by :func:`state_array`.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..curvature.bundle import riemann
from ..functionals.calabi import CalabiPotential, calabi_metric_velocity, calabi_velocity
from ..functionals.energy import energy_F, flow_velocity, geometry_volume, grad_F
from ..functionals.spec import FlowKind
from ..homogeneous.reduction import coefficient_l2_norm, homogeneous_velocity
from ..tensor.algebra import integrate, l2_norm
from ..tensor.grid import Grid2Chart, MetricField2
from ..tensor.spectral import dealias

logger = logging.getLogger(__name__)


def is_grid_state(state):
    return isinstance(state, MetricField2)


def is_calabi_state(state):
    return isinstance(state, CalabiPotential)


def is_homogeneous_state(state):
    return not (is_grid_state(state) or is_calabi_state(state))


def state_array(state):
    if is_grid_state(state) or is_calabi_state(state):
        return state.as_array()
    return state.coefficients


def state_from_array(values, template):
    if is_grid_state(template):
        return MetricField2.from_array(values, template.chart)
    if is_calabi_state(template):
        return CalabiPotential.from_array(values, template.chart)
    return type(template).from_coefficients(values)


def state_metric(state):
    """Grid metric of a state; homogeneous states are their own metric."""
    return state.metric() if is_calabi_state(state) else state


def state_chart(state):
    return getattr(state, "chart", None)


def scale_state(state, lam):
    """The state representing λ·g."""
    if is_grid_state(state):
        return state.scaled(lam)
    if is_calabi_state(state):
        # λ(hδ) is the potential λφ on the chart stretched by √λ
        chart = state.chart
        stretched = Grid2Chart(chart.L1 * np.sqrt(lam), chart.L2 * np.sqrt(lam), chart.N1, chart.N2)
        return CalabiPotential(lam * state.phi, stretched)
    return state.scaled(lam)


def matrix_from_planes(planes):
    return np.array([[planes[0], planes[1]], [planes[1], planes[2]]])


def planes_from_matrix(comps):
    return np.stack([comps[0, 0], comps[0, 1], comps[1, 1]])


@dataclass(eq=False)
class StateEvaluation:
    """Everything one velocity evaluation produces, reused by records."""

    velocity: np.ndarray
    F: float
    Vol: float
    bundle: object = None
    gradient: object = None
    metric_velocity: np.ndarray = None


def evaluate_state(state, spec, m_max=0, delta_sign=1.0):
    if is_grid_state(state):
        bundle = riemann(state, m_max=m_max)
        F = energy_F(state, bundle)
        gradient = grad_F(state, bundle, delta_sign=delta_sign)
        comps = flow_velocity(state, spec, gradient=gradient, F=F).components
        if spec.params.dealias:
            comps = dealias(comps, state.chart)
        return StateEvaluation(
            velocity=planes_from_matrix(comps),
            F=F,
            Vol=geometry_volume(state),
            bundle=bundle,
            gradient=gradient,
            metric_velocity=comps,
        )
    if is_calabi_state(state):
        velocity = calabi_velocity(state)
        if spec.params.dealias:
            velocity = dealias(velocity, state.chart)
        g = state.metric()
        bundle = riemann(g, m_max=m_max)
        return StateEvaluation(
            velocity=velocity[None, ...],
            F=energy_F(g, bundle),
            Vol=geometry_volume(g),
            bundle=bundle,
            metric_velocity=calabi_metric_velocity(state, velocity),
        )
    if spec.kind == FlowKind.SURFACE_CALABI:
        raise ValueError("homogeneous states cannot follow the Calabi flow")
    return StateEvaluation(
        velocity=homogeneous_velocity(state, spec.kind),
        F=energy_F(state),
        Vol=geometry_volume(state),
        gradient=grad_F(state),
    )


def state_velocity(state, spec, delta_sign=1.0):
    if is_calabi_state(state):
        velocity = calabi_velocity(state)
        if spec.params.dealias:
            velocity = dealias(velocity, state.chart)
        return velocity[None, ...]
    if is_homogeneous_state(state):
        return homogeneous_velocity(state, spec.kind)
    return evaluate_state(state, spec, delta_sign=delta_sign).velocity


def state_norm(values, state):
    """L² norm, measured in the metric of ``state``, of an array in state layout."""
    if is_grid_state(state):
        return l2_norm(matrix_from_planes(values), state)
    if is_calabi_state(state):
        return float(np.sqrt(max(integrate(values[0] ** 2, state.metric()), 0.0)))
    return coefficient_l2_norm(state, values)
