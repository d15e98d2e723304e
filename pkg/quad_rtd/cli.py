# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import argparse
import csv
import logging
import os
import sys
from collections.abc import Sequence
from typing import Optional

import numpy as np

from .config_view import RtdConfig, load_config
from .dynamics.experiments import compare_integrators
from .frs.basic_types import TimedFRS
from .frs.frs_file import load_frs, save_frs
from .frs.reach import reach_3d
from .helpers.artifacts import FRS_SCHEMA, TABLE_SCHEMA
from .helpers.basic_types import ArtifactError, ConfigError
from .planner.error_models import ErrorModel
from .tracking_error.basic_types import CoverSpec, TableBuildError
from .tracking_error.cover import cover_report
from .tracking_error.table import TrackingErrorTable, cell_maxima, compute_table, max_error_extent
from .tracking_error.table_file import load_table, save_table
from .trajectory.basic_types import TrajParam
from .verify import SUITES, VerifyContext, random_feasible, run_suites
from .world_bench.bench import BenchContext, run_benchmark, write_reports
from .world_bench.trial import run_trial, write_trace, write_tubes
from .world_bench.world import generate_world

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
BOTH_MODES = "both"


def parse_seeds(text: str) -> list[int]:
    """'0..49' is inclusive; '1,5,9' lists seeds."""
    try:
        if ".." in text:
            first, last = text.split("..")
            return list(range(int(first), int(last) + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list: {text!r}") from None


def cover_spec(config: RtdConfig) -> CoverSpec:
    return CoverSpec(
        v_max=config.trajectory.limits.v_max,
        dv=config.cover.dv,
        dt=config.cover.dt,
        t_fin=config.trajectory.timing.t_fin,
    )


def _load_frs(args: argparse.Namespace, config: RtdConfig) -> TimedFRS:
    return load_frs(args.frs, config.frs_hash, config.trajectory.timing, force=args.force)


def _load_table(args: argparse.Namespace, config: RtdConfig, required: bool) -> Optional[TrackingErrorTable]:
    if args.table is None:
        if required:
            raise ArtifactError(TABLE_SCHEMA.name, "missing tracking error table, pass --table")
        return None
    return load_table(args.table, config.table_hash, force=args.force)


def _modes(mode: str) -> list[str]:
    return ErrorModel.modes() if mode == BOTH_MODES else [mode]


def cmd_compute_error_table(args: argparse.Namespace, config: RtdConfig) -> int:
    spec = cover_spec(config)
    logger.info(cover_report(spec).describe())
    table = compute_table(
        spec,
        config.robot.params,
        config.gains.gains,
        config.trajectory.timing,
        config.trajectory.limits,
        sim_dt=config.cover.sim_dt,
        slack=config.cover.slack,
        workers=args.workers or config.cover.workers,
        config_hash=config.table_hash,
    )
    save_table(table, args.out)
    return EXIT_OK


def cmd_compute_frs(args: argparse.Namespace, config: RtdConfig) -> int:
    frs = reach_3d(config.trajectory.bounds, config.trajectory.timing, config.frs.dt, config.frs.samples)
    save_frs(frs, args.out, config.frs_hash)
    return EXIT_OK


def cmd_run_trial(args: argparse.Namespace, config: RtdConfig) -> int:
    frs = _load_frs(args, config)
    table = _load_table(args, config, required=args.mode == "table")
    model = ErrorModel.from_config(args.mode, table=table, constant_error=config.planner.constant_error)
    world = generate_world(args.seed, config.world_settings())
    result = run_trial(world, frs, model, config.trial_settings())
    if args.trace and result.trace is not None:
        write_trace(result.trace, args.trace)
        write_tubes(result.trace, f"{os.path.splitext(args.trace)[0]}.tubes.csv")
    print(
        f"seed {result.seed} ({result.mode}): {result.outcome.value}, "
        f"{result.distance:.1f} m in {result.sim_time:.1f} s, peak speed {result.peak_speed:.2f} m/s, "
        f"{result.n_iterations} plans, {result.n_fail_safe} fail-safe, "
        f"planning {result.mean_planning_seconds * 1000:.0f} ms mean / {result.max_planning_seconds * 1000:.0f} ms max"
    )
    return EXIT_FAILURE if result.crashed else EXIT_OK


def cmd_benchmark(args: argparse.Namespace, config: RtdConfig) -> int:
    if args.deterministic:
        config = config.replace(deterministic=True)
    modes = _modes(args.mode)
    frs = _load_frs(args, config)
    table = _load_table(args, config, required="table" in modes)
    context = BenchContext(
        frs=frs,
        table=table,
        trial=config.trial_settings(),
        world=config.world_settings(),
        constant_error=config.planner.constant_error,
    )
    reports = run_benchmark(args.seeds, modes, context, workers=args.workers or 1)
    write_reports(reports, args.out)
    for report in reports:
        print(report.describe())
    return EXIT_FAILURE if any(report.crash_rate > 0 for report in reports) else EXIT_OK


def cmd_inspect_table(args: argparse.Namespace, config: RtdConfig) -> int:
    table = load_table(args.table, force=True)
    print(cover_report(table.spec).describe())
    for key, value in table.metadata.to_json().items():
        print(f"{key}: {value}")
    print(f"largest stored error: {max_error_extent(table):.4f} m")
    if args.cells:
        rows = cell_maxima(table)
        with open(args.cells, "w", newline="", encoding="utf8") as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: RtdConfig) -> int:
    ctx = VerifyContext(
        frs=_load_frs(args, config),
        table=_load_table(args, config, required=False),
        params=config.robot.params,
        gains=config.gains.gains,
        limits=config.trajectory.limits,
        scale=args.scale,
        seed=config.benchmark.seed,
        trial=config.trial_settings(),
        world=config.world_settings(),
        constant_error=config.planner.constant_error,
        workers=args.workers,
    )
    results = run_suites(ctx, args.suite)
    for result in results:
        print(result.describe())
    return EXIT_OK if all(result.passed for result in results) else EXIT_FAILURE


def cmd_compare_integrators(args: argparse.Namespace, config: RtdConfig) -> int:
    timing, limits = config.trajectory.timing, config.trajectory.limits
    k_v, k_pk = random_feasible(np.random.default_rng(config.benchmark.seed), args.samples, timing, limits)
    k_list = [TrajParam(k_v=kv, k_a=np.zeros(3), k_pk=kpk) for kv, kpk in zip(k_v, k_pk)]
    report = compare_integrators(k_list, config.robot.params, config.gains.gains, timing, config.cover.sim_dt)
    print(report.describe())
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value file overriding the defaults")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="log debug messages")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="log warnings and errors only")


def _add_artifacts(parser: argparse.ArgumentParser, table: bool = True) -> None:
    parser.add_argument("--frs", default=FRS_SCHEMA.name, help="reachable set file")
    if table:
        parser.add_argument("--table", help="tracking error table file")
    parser.add_argument("--force", action="store_true", help="accept artifacts built with a different config")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quad-rtd", description="Reachability-based trajectory design for a quadrotor.")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("compute-error-table", help="simulate sample trajectories and store the tracking error table")
    _add_common(p)
    p.add_argument("--out", default=TABLE_SCHEMA.name)
    p.add_argument("--workers", type=int, help="worker processes (default: table_workers from the config)")
    p.set_defaults(func=cmd_compute_error_table)

    p = sub.add_parser("compute-frs", help="compute and store the reachable set of the trajectory model")
    _add_common(p)
    p.add_argument("--out", default=FRS_SCHEMA.name)
    p.set_defaults(func=cmd_compute_frs)

    p = sub.add_parser("run-trial", help="fly one random world")
    _add_common(p)
    _add_artifacts(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=ErrorModel.modes(), default="table")
    p.add_argument("--trace", help="CSV of executed and reference positions; plan tubes go next to it")
    p.set_defaults(func=cmd_run_trial)

    p = sub.add_parser("benchmark", help="fly many random worlds and report crash and goal rates")
    _add_common(p)
    _add_artifacts(p)
    p.add_argument("--seeds", type=parse_seeds, default=parse_seeds("0..49"), help="e.g. 0..49 or 1,2,3")
    p.add_argument("--mode", choices=[*ErrorModel.modes(), BOTH_MODES], default=BOTH_MODES)
    p.add_argument("--out", default="report.json")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--deterministic", action="store_true", help="ignore the wall-clock planning budget")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("inspect-table", help="print the cover and statistics of an error table")
    _add_common(p)
    p.add_argument("--table", default=TABLE_SCHEMA.name)
    p.add_argument("--cells", help="CSV with the largest error of every velocity cell")
    p.set_defaults(func=cmd_inspect_table)

    p = sub.add_parser("verify", help="run the property suites")
    _add_common(p)
    _add_artifacts(p)
    p.add_argument("--suite", action="append", choices=list(SUITES), help="run only these suites")
    p.add_argument("--scale", type=float, default=1.0, help="fraction of the full instance counts")
    p.add_argument("--workers", type=int, default=1, help="worker processes for the benchmark suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare-integrators", help="compare Lie-Euler and RK-MK4 on random trajectories")
    _add_common(p)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_compare_integrators)
    return parser


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as ex:
        return EXIT_OK if ex.code == 0 else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    setup_logging(args.verbose, args.quiet)
    try:
        config = load_config(args.config)
        return args.func(args, config)
    except (ConfigError, ArtifactError, TableBuildError) as ex:
        logger.error(str(ex))
        return EXIT_FAILURE


def main() -> None:
    sys.exit(cli_dispatch())
