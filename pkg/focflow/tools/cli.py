"""
Command line entry point: ``focflow run|check|sweep|rescale|report``.
"""

import argparse
import logging
import sys

from ..constants import (
    EXIT_BAD_CONFIG,
    EXIT_MONITOR_FAILURE,
    EXIT_OK,
    EXIT_RUNTIME_ERROR,
)
from ..utils.validators import ConfigError, FlowLabError, RangeEmpty
from .acceptance import DESK_RESOLUTION, run_acceptance
from .config import RunConfig, load_config
from .exporters import ReportGenerator
from .runner import rescale_directory, run_config, run_sweep, summarize_directory

logger = logging.getLogger(__name__)


def _load(args):
    config = load_config(args.config) if args.config else RunConfig()
    return config.with_overrides(tol=args.tol, seed=args.seed, out=args.out)


def cmd_run(args):
    config = _load(args)
    outcome = run_config(config, fail_on_singularity=args.fail_on_singularity)
    print(f"{outcome.status.value}: T = {outcome.trajectory.T:.6g}, output in {outcome.out}")
    for name, verdict in outcome.verdicts.items():
        print(f"  {name}: {verdict}")
    return outcome.exit_code


def cmd_check(args):
    try:
        selected = [int(n) for n in args.criteria.split(",")] if args.criteria else None
    except ValueError as exc:
        raise ConfigError("check.criteria", "expected comma-separated integers") from exc
    delta_sign = -1.0 if args.flip_delta else 1.0
    results = run_acceptance(args.resolution, delta_sign=delta_sign, selected=selected)
    table = ReportGenerator().format_table(
        [r.as_row() for r in results], ["criterion", "name", "measured", "threshold", "verdict"]
    )
    print(table)
    return EXIT_OK if all(r.passed for r in results) else EXIT_MONITOR_FAILURE


def cmd_sweep(args):
    config = _load(args)
    if not config.sweep:
        raise ConfigError("config.sweep", "the sweep grid is empty")
    rows, spreads = run_sweep(config, threads=args.threads)
    failed = [row["cell"] for row in rows if row["status"] == "Failed"]
    print(f"{len(rows)} cells, {len(failed)} failed")
    for column, spread in spreads.items():
        print(f"  {column}: max/min = {spread:.4g}")
    return EXIT_OK


def cmd_rescale(args):
    _, comparison = rescale_directory(args.trajectory, args.lam, args.t0, args.out)
    for key, value in comparison.items():
        print(f"  {key}: {value}")
    return EXIT_OK


def cmd_report(args):
    print(summarize_directory(args.directory))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="focflow", description="Fourth-order curvature flow laboratory")
    parser.add_argument("--log-level", default="INFO", help="logging level (default INFO)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="YAML run configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--tol", type=float, help="local error tolerance")
        p.add_argument("--seed", type=int, help="seed for random initial data")

    p = sub.add_parser("run", help="integrate one configured flow")
    common(p)
    p.add_argument("--fail-on-singularity", action="store_true", help="exit 3 on SingularityCandidate")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="run the acceptance suite")
    p.add_argument("--resolution", type=int, default=DESK_RESOLUTION, help="grid nodes per axis")
    p.add_argument("--criteria", help="comma-separated criterion numbers")
    p.add_argument("--flip-delta", action="store_true", help="flip the δ term of grad F")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="run every cell of the configured sweep grid")
    common(p)
    p.add_argument("--threads", type=int, default=1, help="concurrent runs")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rescale", help="parabolically rescale a stored trajectory")
    p.add_argument("trajectory", help="directory written by save_trajectory")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rescale)

    p = sub.add_parser("report", help="summarize a run directory")
    p.add_argument("directory")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        logger.error("bad configuration: %s", exc)
        return EXIT_BAD_CONFIG
    except (RangeEmpty, FlowLabError, OSError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
