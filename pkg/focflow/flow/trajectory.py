"""
Flow trajectories: storage, interpolation in time, parabolic rescaling, the
normalized/unnormalized correspondence, residuals and persistence.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import BarycentricInterpolator

from ..constants import TRAJECTORY_MANIFEST
from ..diagnostics.record import build_record
from ..functionals.calabi import CalabiPotential
from ..functionals.spec import FlowKind, FlowSpec, GeometryKind, IntegratorParams
from ..homogeneous.milnor import MilnorFrameMetric
from ..homogeneous.product_spheres import ProductSphereMetric
from ..tensor.grid import Grid2Chart
from ..tensor.snapshot import read_snapshot, write_snapshot
from ..utils.validators import FlowLabError, RangeEmpty, VolumeNonPositive, validate_positive
from .states import (
    is_calabi_state,
    is_grid_state,
    scale_state,
    state_array,
    state_from_array,
    state_norm,
    state_velocity,
)

logger = logging.getLogger(__name__)

INTERPOLATION_POINTS = 4
MANIFEST_FORMAT = "focflow-trajectory-v1"


class TerminationStatus(Enum):
    COMPLETED = "Completed"
    SINGULARITY_CANDIDATE = "SingularityCandidate"
    POTENTIAL_DEGENERATE = "PotentialDegenerate"
    STEP_COLLAPSE = "StepCollapse"


@dataclass(frozen=True)
class RescaleParams:
    lam: float
    t0: float

    def __post_init__(self):
        validate_positive(self.lam, "lambda")


@dataclass(eq=False)
class FlowTrajectory:
    spec: FlowSpec
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)
    cutoff: object = None
    _status: TerminationStatus = None

    def append(self, t, state, record):
        if self.times and not t > self.times[-1]:
            raise FlowLabError(f"time {t} does not follow {self.times[-1]}")
        self.times.append(float(t))
        self.states.append(state)
        self.records.append(record)

    @property
    def status(self):
        return self._status

    def set_status(self, status):
        if self._status is not None:
            raise FlowLabError(f"termination status already set to {self._status.value}")
        self._status = TerminationStatus(status)

    def __len__(self):
        return len(self.times)

    @property
    def t_start(self):
        return self.times[0]

    @property
    def T(self):
        return self.times[-1]

    @property
    def accepted_steps(self):
        return max(len(self.times) - 1, 0)

    def column(self, name):
        return np.array([getattr(record, name) for record in self.records], dtype=float)


def trajectory_from_states(times, states, spec, status=None, cutoff=None):
    """Build a trajectory (records included) from given states, e.g. synthetic input."""
    traj = FlowTrajectory(spec, cutoff=cutoff)
    previous = None
    for i, (t, state) in enumerate(zip(times, states)):
        dt = t - times[i - 1] if i else 0.0
        previous = build_record(t, state, spec, dt=dt, previous=previous, cutoff=cutoff)
        traj.append(t, state, previous)
    if status is not None:
        traj.set_status(status)
    return traj


def _neighbour_indices(times, t, count=INTERPOLATION_POINTS):
    count = min(count, len(times))
    right = int(np.searchsorted(times, t))
    start = min(max(right - count // 2, 0), len(times) - count)
    return range(start, start + count)


def interpolate_state(traj, t):
    """Cubic-in-time interpolation of the stored states."""
    if not traj.t_start <= t <= traj.T:
        raise RangeEmpty(f"t = {t} lies outside [{traj.t_start}, {traj.T}]")
    times = np.asarray(traj.times)
    exact = np.flatnonzero(times == t)
    if exact.size:
        return traj.states[int(exact[0])]
    indices = list(_neighbour_indices(times, t))
    template = traj.states[indices[0]]
    values = np.stack([state_array(traj.states[i]) for i in indices])
    interpolator = BarycentricInterpolator(times[indices], values, axis=0)
    return state_from_array(interpolator(t), template)


def flow_residual(traj):
    """Per-interval ‖Δg/Δt − v(g(t + Δt/2))‖ relative to ‖v‖ (absolute when v = 0)."""
    residuals = []
    for i in range(len(traj) - 1):
        t0, t1 = traj.times[i], traj.times[i + 1]
        dt = t1 - t0
        quotient = (state_array(traj.states[i + 1]) - state_array(traj.states[i])) / dt
        mid = interpolate_state(traj, t0 + 0.5 * dt)
        velocity = state_velocity(mid, traj.spec)
        defect = state_norm(quotient - velocity, mid)
        scale = state_norm(velocity, mid)
        residuals.append(defect / scale if scale > 0 else defect)
    return np.array(residuals)


def attach_residuals(traj):
    residuals = flow_residual(traj)
    for record, value in zip(traj.records[1:], residuals):
        record.residual = float(value)
    return residuals


def parabolic_rescale(traj, p):
    """λ·g(t0 + τ/λ²) on τ ∈ [−λ²(t0 − t_start), λ²(T − t0)]."""
    if len(traj) < 2 or not traj.t_start <= p.t0 <= traj.T:
        raise RangeEmpty(f"t0 = {p.t0} is outside the trajectory range [{traj.t_start}, {traj.T}]")
    lam2 = p.lam * p.lam
    pairs = [(lam2 * (t - p.t0), scale_state(s, p.lam)) for t, s in zip(traj.times, traj.states)]
    if p.t0 not in traj.times:
        pairs.append((0.0, scale_state(interpolate_state(traj, p.t0), p.lam)))
        pairs.sort(key=lambda pair: pair[0])
    times, states = zip(*pairs)
    logger.info("rescaled trajectory by lambda = %g about t0 = %g", p.lam, p.t0)
    return trajectory_from_states(list(times), list(states), traj.spec, traj.status, traj.cutoff)


def normalization_correspondence(traj):
    """Volume-normalized trajectory c(t)g(t) on the clock dt̃ = c(t)²dt, c = (V0/V)^{2/n}."""
    if len(traj) < 2:
        raise RangeEmpty("the correspondence needs at least two states")
    n = traj.spec.n
    spec = replace(traj.spec, kind=FlowKind.VOLUME_NORMALIZED)
    if n == 4:
        return trajectory_from_states(traj.times, traj.states, spec, traj.status, traj.cutoff)
    volumes = traj.column("Vol")
    if np.any(volumes <= 0):
        raise VolumeNonPositive("a stored state has non-positive volume")
    c = (volumes[0] / volumes) ** (2.0 / n)
    times = np.asarray(traj.times)
    new_times = times[0] + cumulative_trapezoid(c * c, times, initial=0.0)
    states = [scale_state(s, ci) for s, ci in zip(traj.states, c)]
    return trajectory_from_states(list(new_times), states, spec, traj.status, traj.cutoff)


def _spec_lines(spec):
    params = spec.params
    return [
        f"kind={spec.kind.value}",
        f"geometry={spec.geometry.value}",
        f"n={spec.n}",
        f"tol={params.tol!r}",
        f"dt0={params.dt0!r}",
        f"dt_max={params.dt_max!r}",
        f"scheme={params.scheme}",
        f"dealias={params.dealias}",
        f"m_max={params.m_max}",
    ]


def save_trajectory(traj, directory, every=1):
    """Write every ``every``-th state (the last one always) plus a key=value manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    indices = sorted(set(range(0, len(traj), max(every, 1))) | {len(traj) - 1})
    lines = [f"format={MANIFEST_FORMAT}"] + _spec_lines(traj.spec)
    lines += [f"status={traj.status.value if traj.status else 'None'}", f"count={len(indices)}"]
    for slot, i in enumerate(indices):
        state = traj.states[i]
        lines.append(f"time.{slot}={traj.times[i]!r}")
        if is_grid_state(state):
            name = f"state_{slot:06d}.focf"
            write_snapshot(directory / name, state)
        elif is_calabi_state(state):
            name = f"potential_{slot:06d}.npy"
            np.save(directory / name, state.phi)
            write_snapshot(directory / f"state_{slot:06d}.focf", state.metric())
            lines.append(f"chart.{slot}={state.chart.L1!r},{state.chart.L2!r}")
        else:
            name = ",".join(repr(float(c)) for c in state.coefficients)
        lines.append(f"state.{slot}={name}")
    (directory / TRAJECTORY_MANIFEST).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("saved %d states to %s", len(indices), directory)
    return directory


def read_manifest(path):
    entries = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def load_trajectory(directory):
    directory = Path(directory)
    entries = read_manifest(directory / TRAJECTORY_MANIFEST)
    if entries.get("format") != MANIFEST_FORMAT:
        raise FlowLabError(f"{directory} does not hold a focflow trajectory")
    params = IntegratorParams(
        tol=float(entries["tol"]),
        dt0=float(entries["dt0"]),
        dt_max=float(entries["dt_max"]),
        scheme=entries["scheme"],
        dealias=entries["dealias"] == "True",
        m_max=int(entries["m_max"]),
    )
    spec = FlowSpec(FlowKind(entries["kind"]), GeometryKind(entries["geometry"]), params)
    times, states = [], []
    for slot in range(int(entries["count"])):
        times.append(float(entries[f"time.{slot}"]))
        name = entries[f"state.{slot}"]
        if spec.geometry == GeometryKind.PRODUCT_SPHERES:
            states.append(ProductSphereMetric(*(float(v) for v in name.split(","))))
        elif spec.geometry == GeometryKind.MILNOR_FRAME:
            states.append(MilnorFrameMetric(*(float(v) for v in name.split(","))))
        elif spec.kind == FlowKind.SURFACE_CALABI:
            phi = np.load(directory / name)
            L1, L2 = (float(v) for v in entries[f"chart.{slot}"].split(","))
            states.append(CalabiPotential(phi, Grid2Chart(L1, L2, *phi.shape)))
        else:
            states.append(read_snapshot(directory / name))
    status = entries.get("status")
    status = None if status in (None, "None") else TerminationStatus(status)
    return trajectory_from_states(times, states, spec, status)
