"""
Classification of terminated trajectories: singularity detection and the
long-time behaviour of nonsingular runs.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import trapezoid

from ..constants import (
    BLOWUP_FACTOR,
    BUDGET_RTOL,
    CRITICALITY_FACTOR,
    CURVATURE_CAP_FACTOR,
    CURVATURE_SPIKE_FACTOR,
    MIN_DETECTOR_STEPS,
    SYSTOLE_COLLAPSE_FRACTION,
)
from ..curvature.bundle import f_m, riemann
from ..flow.states import is_homogeneous_state, state_metric
from ..flow.trajectory import TerminationStatus
from ..functionals.spec import FlowKind
from ..utils.validators import Inconclusive, RequiresBoundedCurvature

logger = logging.getLogger(__name__)

EXTRAPOLATION_POINTS = 5


class SingularityClass(Enum):
    NO_SINGULARITY = "NoSingularity"
    SINGULARITY_CANDIDATE = "SingularityCandidate"
    SINGULARITY_UNCONFIRMED = "SingularityUnconfirmed"
    CURVATURE_GROWTH = "CurvatureGrowth"


class LongTimeClass(Enum):
    COLLAPSING = "Collapsing"
    CONVERGES_TO_CRITICAL = "ConvergesToCritical"
    # a noncompact finite-volume limit cannot arise from the compact model geometries
    NONCOMPACT_LIMIT = "NoncompactLimit"
    UNDETERMINED = "Undetermined"


@dataclass
class SingularityReport:
    classification: SingularityClass
    blowup_time: float = None
    blowup_point: tuple = None
    growth: float = 0.0
    detail: dict = field(default_factory=dict)


@dataclass
class LongTimeReport:
    classification: LongTimeClass
    budget_ok: bool
    budget_defect: float
    detail: dict = field(default_factory=dict)


def extrapolated_blowup_time(times, sup_rm):
    """Zero of a linear fit to 1/sup|Rm| over the last few samples, never before the last time."""
    times = np.asarray(times[-EXTRAPOLATION_POINTS:])
    inverse = 1.0 / np.maximum(np.asarray(sup_rm[-EXTRAPOLATION_POINTS:]), np.finfo(float).tiny)
    slope, intercept = np.polyfit(times, inverse, 1)
    if slope >= 0:
        return float(times[-1])
    return max(float(-intercept / slope), float(times[-1]))


def decade_growth(times, sup_rm, T):
    """sup|Rm| at the last sample over its value one decade of (T − t) earlier."""
    times = np.asarray(times)
    gap = T - times[-1]
    if gap <= 0:
        gap = times[-1] - times[-2]
        T = times[-1] + gap
    start = max(T - 10.0 * gap, times[0])
    earlier = float(np.interp(start, times, sup_rm))
    if earlier <= 0:
        return np.inf if sup_rm[-1] > 0 else 1.0
    return float(sup_rm[-1] / earlier)


def _blowup_point(traj, m):
    """Node and time maximizing f_m/(K + t^{-1/2}) with K the running sup of sup|Rm|."""
    best, best_index, best_field = -np.inf, len(traj) - 1, None
    K = 0.0
    for i, (t, record) in enumerate(zip(traj.times, traj.records)):
        K = max(K, record.supRm)
        elapsed = t - traj.t_start
        if elapsed <= 0:
            continue
        g = state_metric(traj.states[i])
        if m > 0:
            values, top = f_m(g, m)
        else:
            values = np.sqrt(riemann(g).norm_rm_sq)
            top = float(np.max(values))
        score = top / (K + elapsed**-0.5)
        if score > best:
            best, best_index, best_field = score, i, values
    point = tuple(int(v) for v in np.unravel_index(np.argmax(best_field), best_field.shape))
    return point, traj.times[best_index]


def singularity_detector(traj):
    if traj.accepted_steps < MIN_DETECTOR_STEPS:
        raise Inconclusive(
            f"{traj.accepted_steps} accepted steps; the detector needs {MIN_DETECTOR_STEPS}"
        )
    sup_rm = traj.column("supRm")
    times = traj.times
    if traj.status == TerminationStatus.SINGULARITY_CANDIDATE:
        T = extrapolated_blowup_time(times, sup_rm)
        growth = decade_growth(times, sup_rm, T)
        confirmed = growth >= BLOWUP_FACTOR * (1 - 1e-6)
        point = None
        if not is_homogeneous_state(traj.states[0]):
            m = min(2, traj.spec.params.m_max)
            point, _ = _blowup_point(traj, m)
        classification = (
            SingularityClass.SINGULARITY_CANDIDATE if confirmed else SingularityClass.SINGULARITY_UNCONFIRMED
        )
        logger.info("blowup check: T = %.6g, decade growth %.3g -> %s", T, growth, classification.value)
        return SingularityReport(classification, T, point, growth)
    running_median = np.array([np.median(sup_rm[: i + 1]) for i in range(len(sup_rm))])
    spikes = sup_rm > CURVATURE_SPIKE_FACTOR * running_median
    if np.any(spikes):
        first = int(np.argmax(spikes))
        return SingularityReport(
            SingularityClass.CURVATURE_GROWTH, detail={"first_spike_time": times[first]}
        )
    return SingularityReport(SingularityClass.NO_SINGULARITY)


def dissipated_energy(traj):
    """Energy the flow kind dissipates, per stored state."""
    kind = traj.spec.kind
    if kind == FlowKind.SURFACE_CALABI:
        return traj.column("calabi_L2") ** 2
    if kind == FlowKind.VOLUME_NORMALIZED:
        return traj.column("Ftilde")
    return traj.column("F")


def dissipation_budget(traj):
    """∫ rate dt − (E(0) − E(T)); non-positive up to tolerance when the budget holds."""
    energy = dissipated_energy(traj)
    spent = trapezoid(traj.column("dissipation_rate"), np.asarray(traj.times))
    defect = float(spent - (energy[0] - energy[-1]))
    tolerance = BUDGET_RTOL * max(abs(energy[0]), 1e-12) + 1e-12
    return defect <= tolerance, defect


def nonsingular_classifier(traj, curvature_cap=None):
    sup_rm = traj.column("supRm")
    volumes = traj.column("Vol")
    cap = curvature_cap or CURVATURE_CAP_FACTOR * (sup_rm[0] + 1.0 / np.sqrt(volumes[0]))
    if np.max(sup_rm) > cap:
        raise RequiresBoundedCurvature(f"sup|Rm| reached {np.max(sup_rm):.6g}, above the cap {cap:.6g}")
    budget_ok, defect = dissipation_budget(traj)
    systole = traj.column("systole_proxy")
    grad = traj.column("gradFtilde_L2")
    ftilde0 = traj.records[0].Ftilde
    threshold = CRITICALITY_FACTOR * abs(ftilde0) / np.sqrt(volumes[-1])
    detail = {"systole_final": float(systole[-1]), "gradFtilde_final": float(grad[-1]), "threshold": threshold}

    collapsing = (
        systole[-1] < SYSTOLE_COLLAPSE_FRACTION * systole[0] and systole[-1] < systole[len(systole) // 2]
    )
    if collapsing:
        classification = LongTimeClass.COLLAPSING
    elif grad[-1] <= threshold:
        classification = LongTimeClass.CONVERGES_TO_CRITICAL
    else:
        classification = LongTimeClass.UNDETERMINED
    logger.info("long-time class %s (budget defect %.3e)", classification.value, defect)
    return LongTimeReport(classification, bool(budget_ok), defect, detail)
