"""
Run orchestration: one configured run, sweeps over configuration grids,
rescaling of stored trajectories and summaries of output directories.
"""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ..constants import (
    EXIT_MONITOR_FAILURE,
    EXIT_OK,
    EXIT_SINGULARITY,
    RUN_MANIFEST,
    SWEEP_SUMMARY_CSV,
    TIMESERIES_CSV,
)
from ..diagnostics.classifiers import (
    SingularityClass,
    nonsingular_classifier,
    singularity_detector,
)
from ..diagnostics.lemmas import ball_growth_check, cutoff_evolution_check, metric_equivalence_check
from ..diagnostics.monitors import (
    curvature_evolution_residual,
    linearized_mode_decay,
    local_sobolev_monitor,
    smoothing_monitor,
)
from ..flow.integrator import run
from ..flow.states import is_homogeneous_state, state_metric
from ..flow.trajectory import (
    RescaleParams,
    TerminationStatus,
    load_trajectory,
    parabolic_rescale,
    save_trajectory,
)
from ..tensor.distance import cutoff_function
from ..utils.decorators import timer
from ..utils.validators import FlowLabError, Inconclusive, RequiresBoundedCurvature
from .config import config_from_mapping
from .exporters import DataExporter, ReportGenerator
from .presets import build_initial_state

logger = logging.getLogger(__name__)

MODE_DECAY_RTOL = 0.05
TRAJECTORY_DIR = "trajectory"


@dataclass
class RunOutcome:
    status: TerminationStatus
    exit_code: int
    trajectory: object
    verdicts: dict = field(default_factory=dict)
    out: Path = None


def _verdict(passed, **values):
    return {"passed": passed, **values}


def center_node(state):
    chart = state_metric(state).chart
    return (chart.N1 // 2, chart.N2 // 2)


def _grid_monitor(name, traj, config, cutoff):
    center = center_node(traj.states[0])
    if name == "sobolev":
        m = min(1, config.m_max)
        if 4 * config.sobolev_radius >= traj.records[0].systole_proxy:
            return _verdict(None, skipped="2r is not below half the systole proxy")
        estimate = local_sobolev_monitor(traj, center, config.sobolev_radius, m)
        return _verdict(bool(np.isfinite(estimate.raw)), raw=estimate.raw, normalized=estimate.normalized)
    if name == "equivalence":
        mid = 0.5 * (traj.t_start + traj.T)
        checks = [metric_equivalence_check(traj, traj.t_start, t) for t in (mid, traj.T)]
        return _verdict(all(checks), margin=min(c.margin for c in checks))
    if name == "ball_growth":
        if 2 * config.ball_radius >= traj.records[0].systole_proxy:
            return _verdict(None, skipped="rho is not below half the systole proxy")
        times = (0.5 * (traj.t_start + traj.T), traj.T)
        checks = [ball_growth_check(traj, center, config.ball_radius, t) for t in times]
        return _verdict(all(checks), margin=min(c.margin for c in checks))
    if name == "cutoff":
        check = cutoff_evolution_check(traj, cutoff)
        return _verdict(check.passed, margin=check.margin, L_observed=check.detail["L_observed"])
    if name == "curvature_residual":
        value = curvature_evolution_residual(traj)
        return _verdict(bool(np.isfinite(value)), constant=value)
    if name == "mode_decay":
        decays = linearized_mode_decay(traj)
        worst = max(d.relative_error for d in decays)
        return _verdict(worst <= MODE_DECAY_RTOL, relative_error=worst)
    raise ValueError(f"unknown monitor {name!r}")


def run_monitor(name, traj, config, cutoff=None):
    """Evaluate one named monitor; ``passed`` is None when it does not apply."""
    homogeneous = is_homogeneous_state(traj.states[0])
    try:
        if name == "smoothing":
            values = {f"m{m}": smoothing_monitor(traj, m) for m in range(1, config.m_max + 1)}
            return _verdict(all(np.isfinite(v) for v in values.values()), **values)
        if name == "singularity":
            report = singularity_detector(traj)
            failed = report.classification == SingularityClass.SINGULARITY_UNCONFIRMED
            return _verdict(
                not failed,
                classification=report.classification.value,
                blowup_time=report.blowup_time,
                blowup_point=report.blowup_point,
            )
        if name == "nonsingular":
            if config.horizon is not None and config.t_end < config.horizon:
                return _verdict(None, skipped=f"t_end below the horizon {config.horizon}")
            report = nonsingular_classifier(traj)
            return _verdict(
                report.budget_ok,
                classification=report.classification.value,
                budget_defect=report.budget_defect,
            )
        if homogeneous or len(traj) < 2:
            return _verdict(None, skipped="needs a torus-grid trajectory with two or more states")
        return _grid_monitor(name, traj, config, cutoff)
    except Inconclusive as exc:
        return _verdict(None, skipped=str(exc))
    except RequiresBoundedCurvature as exc:
        return _verdict(False, error=str(exc))


@timer
def run_config(config, out=None, fail_on_singularity=False):
    """Execute one configured run and write its time series, snapshots and manifest."""
    out = Path(out or config.out)
    out.mkdir(parents=True, exist_ok=True)
    initial = build_initial_state(config)
    spec = config.to_spec()
    cutoff = None
    if "cutoff" in config.monitors and not is_homogeneous_state(initial):
        g0 = state_metric(initial)
        cutoff = cutoff_function(g0, center_node(initial), config.cutoff_radius)
    traj = run(initial, spec, config.t_end, cutoff=cutoff)
    verdicts = {name: run_monitor(name, traj, config, cutoff) for name in config.monitors}

    exporter = DataExporter()
    exporter.export_timeseries(traj, out / TIMESERIES_CSV)
    save_trajectory(traj, out / TRAJECTORY_DIR, every=config.snapshot_every)
    failures = [name for name, verdict in verdicts.items() if verdict["passed"] is False]
    if failures:
        logger.warning("monitor failures: %s", ", ".join(failures))
    exit_code = EXIT_OK
    if failures:
        exit_code = EXIT_MONITOR_FAILURE
    elif fail_on_singularity and traj.status == TerminationStatus.SINGULARITY_CANDIDATE:
        exit_code = EXIT_SINGULARITY

    reporter = ReportGenerator()
    manifest = reporter.generate_summary_report(
        {
            "config": config.as_dict(),
            "status": traj.status.value,
            "T": traj.T,
            "accepted_steps": traj.accepted_steps,
            "final": traj.records[-1].to_row(spec.params.m_max),
            "monitors": verdicts,
            "exit_code": exit_code,
        }
    )
    reporter.save_report(manifest, out / RUN_MANIFEST)
    return RunOutcome(traj.status, exit_code, traj, verdicts, out)


def sweep_cells(config):
    """One configuration per combination of the sweep grid, keys in sorted order."""
    if not config.sweep:
        raise ValueError("the sweep grid is empty")
    keys = sorted(config.sweep)
    base = {k: v for k, v in config.as_dict().items() if k != "sweep"}
    cells = []
    for values in itertools.product(*(config.sweep[k] for k in keys)):
        mapping = dict(base, **dict(zip(keys, values)))
        cells.append((dict(zip(keys, values)), config_from_mapping(mapping)))
    return cells


def _sweep_cell(args):
    index, params, config, out = args
    row = {"cell": index, **params}
    try:
        outcome = run_config(config, Path(out) / f"cell_{index:03d}")
    except FlowLabError as exc:
        logger.warning("sweep cell %d failed: %s", index, exc)
        return dict(row, status="Failed", error=str(exc))
    row.update(status=outcome.status.value, exit_code=outcome.exit_code, error="")
    for name, verdict in outcome.verdicts.items():
        for key, value in verdict.items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                row[f"{name}.{key}"] = value
    return row


def family_spread(rows, column):
    """max/min of a positive column across the cells that report it."""
    values = np.array([row[column] for row in rows if column in row and row[column] > 0])
    if values.size == 0:
        return 1.0
    return float(values.max() / values.min())


@timer
def run_sweep(config, out=None, threads=1):
    out = Path(out or config.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(i, params, cell, str(out)) for i, (params, cell) in enumerate(sweep_cells(config))]
    logger.info("sweep over %d cells with %d worker(s)", len(jobs), threads)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(job) for job in jobs]
    DataExporter().export_table(rows, out / SWEEP_SUMMARY_CSV)
    spreads = {
        column: family_spread(rows, column)
        for column in sorted({c for row in rows for c in row})
        if column.startswith(("smoothing.", "sobolev."))
    }
    return rows, spreads


@timer
def rescale_directory(source, lam, t0, out):
    """Rescale a stored trajectory and compare the scale-invariant monitors."""
    traj = load_trajectory(Path(source))
    rescaled = parabolic_rescale(traj, RescaleParams(lam, t0))
    save_trajectory(rescaled, Path(out) / TRAJECTORY_DIR)
    DataExporter().export_timeseries(rescaled, Path(out) / TIMESERIES_CSV)
    index = int(np.argmin(np.abs(np.asarray(rescaled.times))))
    expected = float(np.interp(t0, traj.times, traj.column("supRm"))) / lam
    comparison = {"supRm_at_t0": rescaled.records[index].supRm, "supRm_expected": expected}
    for m in range(1, traj.spec.params.m_max + 1):
        before = smoothing_monitor(traj, m)
        after = smoothing_monitor(rescaled, m)
        comparison[f"smoothing_m{m}"] = {
            "original": before,
            "rescaled": after,
            "relative_difference": abs(after - before) / before if before > 0 else abs(after),
        }
    reporter = ReportGenerator()
    reporter.save_report(
        reporter.generate_summary_report(
            {"source": str(source), "lambda": lam, "t0": t0, "comparison": comparison},
            title="focflow rescale",
        ),
        Path(out) / RUN_MANIFEST,
    )
    return rescaled, comparison


def summarize_directory(directory):
    """Short text summary of a run directory: manifest verdicts and final row."""
    directory = Path(directory)
    manifest = ReportGenerator().load_report(directory / RUN_MANIFEST)
    data = manifest["data"]
    lines = [f"{manifest['title']} ({manifest['timestamp']})"]
    if "status" in data:
        lines.append(f"status: {data['status']}  T = {data['T']:.6g}  steps = {data['accepted_steps']}")
        for name, verdict in data.get("monitors", {}).items():
            lines.append(f"  {name}: {verdict}")
    if (directory / TIMESERIES_CSV).exists():
        frame = pd.read_csv(directory / TIMESERIES_CSV)
        columns = [c for c in ("t", "F", "Ftilde", "Vol", "supRm", "gradF_L2") if c in frame]
        lines.append(frame[columns].describe().loc[["min", "max"]].to_string())
    return "\n".join(lines)
