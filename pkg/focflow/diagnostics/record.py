"""
One row of monitored quantities per accepted flow state.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..curvature.tensor_calculus import christoffel, covariant_derivative_components
from ..flow.states import evaluate_state, is_calabi_state, is_grid_state, state_metric
from ..functionals.calabi import calabi_dissipation, calabi_l2
from ..functionals.energy import energy_Ftilde, grad_F, grad_Ftilde, trace_free_fraction
from ..functionals.spec import FlowKind
from ..homogeneous import milnor, product_spheres
from ..homogeneous.reduction import coefficient_l2_norm
from ..tensor.algebra import inverse_components, l2_norm, pointwise_norm
from ..tensor.distance import systole_proxy

logger = logging.getLogger(__name__)


@dataclass
class DiagnosticsRecord:
    t: float
    F: float
    Ftilde: float
    Vol: float
    supRm: float
    supDerivRm: list
    gradF_L2: float
    gradFtilde_L2: float = 0.0
    dissipation_rate: float = 0.0
    residual: float = 0.0
    systole_proxy: float = 0.0
    A_observed: float = 0.0
    L_observed: float = 0.0
    dtg_sup: float = 0.0
    dtg_grad_sup: float = 0.0
    calabi_L2: float = 0.0
    symmetry_defect: float = 0.0
    trace_free_fraction: float = 0.0
    dt: float = 0.0
    smoothing_ratio: dict = field(default_factory=dict)
    coefficients: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("supRm", "gradF_L2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def is_finite(self):
        scalars = [self.t, self.F, self.Ftilde, self.Vol, self.supRm, self.gradF_L2, self.residual]
        return bool(np.all(np.isfinite(scalars)) and np.all(np.isfinite(self.supDerivRm)))

    def to_row(self, m_max):
        row = {
            "t": self.t,
            "dt": self.dt,
            "F": self.F,
            "Ftilde": self.Ftilde,
            "Vol": self.Vol,
            "supRm": self.supRm,
        }
        for k in range(m_max + 1):
            row[f"supDerivRm_{k}"] = self.supDerivRm[k] if k < len(self.supDerivRm) else 0.0
        row.update(
            gradF_L2=self.gradF_L2,
            gradFtilde_L2=self.gradFtilde_L2,
            dissipation_rate=self.dissipation_rate,
            residual=self.residual,
            systole_proxy=self.systole_proxy,
            A_observed=self.A_observed,
            L_observed=self.L_observed,
            dtg_sup=self.dtg_sup,
            dtg_grad_sup=self.dtg_grad_sup,
            calabi_L2=self.calabi_L2,
            symmetry_defect=self.symmetry_defect,
            trace_free_fraction=self.trace_free_fraction,
        )
        for m in range(1, m_max + 1):
            row[f"smoothing_ratio_{m}"] = self.smoothing_ratio.get(m, 0.0)
        row.update(self.coefficients)
        return row


def record_columns(m_max, coefficient_names=()):
    """Frozen CSV column order."""
    columns = ["t", "dt", "F", "Ftilde", "Vol", "supRm"]
    columns += [f"supDerivRm_{k}" for k in range(m_max + 1)]
    columns += [
        "gradF_L2",
        "gradFtilde_L2",
        "dissipation_rate",
        "residual",
        "systole_proxy",
        "A_observed",
        "L_observed",
        "dtg_sup",
        "dtg_grad_sup",
        "calabi_L2",
        "symmetry_defect",
        "trace_free_fraction",
    ]
    columns += [f"smoothing_ratio_{m}" for m in range(1, m_max + 1)]
    return columns + list(coefficient_names)


def cutoff_norms(gamma_profile, g, connection=None):
    """Pointwise |dγ|_g and |∇∇γ|_g of a fixed scalar profile."""
    connection = christoffel(g) if connection is None else connection
    ginv = inverse_components(g)
    dgamma = covariant_derivative_components(gamma_profile, connection.components, g.chart)
    hess = covariant_derivative_components(dgamma, connection.components, g.chart)
    return pointwise_norm(dgamma, g, ginv), pointwise_norm(hess, g, ginv)


def _grid_record(t, state, spec, m_max, previous, cutoff, delta_sign):
    g = state_metric(state)
    ev = evaluate_state(state, spec, m_max=m_max, delta_sign=delta_sign)
    bundle = ev.bundle
    gradient = ev.gradient if ev.gradient is not None else grad_F(g, bundle)
    ftilde_grad = grad_Ftilde(g, 2, gradient=gradient, F=ev.F)
    gradF_L2 = l2_norm(gradient, g)
    gradFtilde_L2 = l2_norm(ftilde_grad, g)
    ginv = inverse_components(g)
    dtg = ev.metric_velocity
    dtg_sup = float(np.max(pointwise_norm(dtg, g, ginv)))
    nabla_dtg = covariant_derivative_components(dtg, bundle.gamma.components, g.chart)
    dtg_grad_sup = float(np.max(pointwise_norm(nabla_dtg, g, ginv)))
    L_now = 0.0
    if cutoff is not None:
        d_norm, h_norm = cutoff_norms(cutoff.gamma, g, bundle.gamma)
        L_now = float(np.max(d_norm + h_norm))
    if is_calabi_state(state):
        calabi = calabi_l2(state)
        rate = calabi_dissipation(state)
    else:
        calabi = 0.0
        if spec.kind == FlowKind.VOLUME_NORMALIZED:
            rate = gradFtilde_L2**2 / ev.Vol
        else:
            rate = gradF_L2**2
    return DiagnosticsRecord(
        t=float(t),
        F=ev.F,
        Ftilde=energy_Ftilde(g, 2, ev.F),
        Vol=ev.Vol,
        supRm=bundle.sup_rm,
        supDerivRm=bundle.deriv_sup,
        gradF_L2=gradF_L2,
        gradFtilde_L2=gradFtilde_L2,
        dissipation_rate=float(rate),
        systole_proxy=systole_proxy(g),
        A_observed=max(dtg_sup, previous.A_observed if previous else 0.0),
        L_observed=max(L_now, previous.L_observed if previous else 0.0),
        dtg_sup=dtg_sup,
        dtg_grad_sup=dtg_grad_sup,
        calabi_L2=calabi,
        symmetry_defect=bundle.symmetry_defect,
        trace_free_fraction=trace_free_fraction(gradient, g),
    )


def _homogeneous_derivative_sups(m, m_max):
    if isinstance(m, milnor.MilnorFrameMetric):
        sequence = milnor.left_invariant_curvature(milnor.milnor_structure_tensor(m), m_max)
        return [float(np.sqrt(np.sum(t * t))) for t in sequence]
    rm = product_spheres.product_sphere_curvature_tensor(m)
    # symmetric space: ∇Rm = 0
    return [float(np.sqrt(np.sum(rm * rm)))] + [0.0] * m_max


def _homogeneous_trace_free_fraction(m, gradient):
    """Share of grad F outside the span of g, from its frame-relative coefficients."""
    dims = np.asarray(m.BLOCK_DIMS, dtype=float)
    rel = np.asarray(gradient, dtype=float) / m.coefficients
    total = float(np.sum(dims * rel**2))
    if total == 0:
        return 0.0
    mean = float(np.sum(dims * rel)) / m.DIMENSION
    return float(np.sqrt(np.sum(dims * (rel - mean) ** 2) / total))


def _homogeneous_dtg_grad(m, v):
    if not isinstance(m, milnor.MilnorFrameMetric):
        return 0.0
    c = milnor.milnor_structure_tensor(m)
    frame_velocity = np.diag(v / m.coefficients)
    nabla = milnor.frame_covariant_derivative(milnor.koszul_connection(c), frame_velocity)
    return float(np.sqrt(np.sum(nabla * nabla)))


def _homogeneous_record(t, m, spec, m_max, previous):
    ev = evaluate_state(m, spec)
    n = m.DIMENSION
    gradF_L2 = coefficient_l2_norm(m, ev.gradient)
    gradFtilde_L2 = coefficient_l2_norm(m, grad_Ftilde(m))
    dims = np.asarray(m.BLOCK_DIMS, dtype=float)
    dtg_sup = float(np.sqrt(np.sum(dims * (ev.velocity / m.coefficients) ** 2)))
    if spec.kind == FlowKind.VOLUME_NORMALIZED:
        rate = ev.Vol ** (-(4 - n) / n) * gradFtilde_L2**2
    else:
        rate = gradF_L2**2
    sups = _homogeneous_derivative_sups(m, m_max)
    systole = (
        milnor.closed_geodesic_proxy(m)
        if isinstance(m, milnor.MilnorFrameMetric)
        else product_spheres.closed_geodesic_proxy(m)
    )
    return DiagnosticsRecord(
        t=float(t),
        F=ev.F,
        Ftilde=energy_Ftilde(m, n, ev.F),
        Vol=ev.Vol,
        supRm=sups[0],
        supDerivRm=sups,
        gradF_L2=gradF_L2,
        gradFtilde_L2=gradFtilde_L2,
        dissipation_rate=float(rate),
        systole_proxy=systole,
        A_observed=max(dtg_sup, previous.A_observed if previous else 0.0),
        dtg_sup=dtg_sup,
        dtg_grad_sup=_homogeneous_dtg_grad(m, ev.velocity),
        trace_free_fraction=_homogeneous_trace_free_fraction(m, ev.gradient),
        coefficients=dict(zip(m.COEFFICIENT_NAMES, (float(c) for c in m.coefficients))),
    )


def build_record(t, state, spec, dt=0.0, previous=None, cutoff=None, delta_sign=1.0):
    """Evaluate every monitored quantity at one accepted state."""
    m_max = spec.params.m_max
    if is_grid_state(state) or is_calabi_state(state):
        record = _grid_record(t, state, spec, m_max, previous, cutoff, delta_sign)
    else:
        record = _homogeneous_record(t, state, spec, m_max, previous)
    record.dt = float(dt)
    if not record.is_finite():
        logger.warning("non-finite diagnostics at t = %.6g", t)
    return record