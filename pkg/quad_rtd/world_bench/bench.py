# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import json
import logging
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple, Optional

from ..frs.basic_types import TimedFRS
from ..helpers.basic_types import ArtifactError
from ..helpers.file_ops import ensure_parent_dir
from ..planner.error_models import ErrorModel
from ..tracking_error.table import TrackingErrorTable
from .basic_types import BenchmarkReport, TrialResult, WorldSettings
from .trial import TrialSettings, run_trial
from .world import generate_world

logger = logging.getLogger(__name__)


class BenchContext(NamedTuple):
    frs: TimedFRS
    table: Optional[TrackingErrorTable]
    trial: TrialSettings
    world: WorldSettings
    constant_error: float = 0.1


# Set once per worker process, so the FRS and the table are pickled once per worker.
_context: Optional[BenchContext] = None


def _init_worker(context: BenchContext) -> None:
    global _context
    _context = context


def _run_job(job: tuple[int, str]) -> TrialResult:
    assert _context is not None
    seed, mode = job
    model = ErrorModel.from_config(mode, table=_context.table, constant_error=_context.constant_error)
    world = generate_world(seed, _context.world)
    return run_trial(world, _context.frs, model, _context.trial, keep_trace=False)


def _map_jobs(jobs: Sequence[tuple[int, str]], context: BenchContext, workers: int) -> Iterator[TrialResult]:
    if workers <= 1:
        _init_worker(context)
        yield from map(_run_job, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(context,)) as executor:
        yield from executor.map(_run_job, jobs)


def run_benchmark(
    seeds: Sequence[int],
    modes: Sequence[str],
    context: BenchContext,
    workers: int = 1,
) -> list[BenchmarkReport]:
    """One report per mode; every mode flies the same worlds. Results keep the order of seeds."""
    if "table" in modes and context.table is None:
        raise ArtifactError("error table", "the table mode needs a tracking error table")
    jobs = [(seed, mode) for mode in modes for seed in seeds]
    logger.info(f"Running {len(jobs)} trials on {workers} worker(s)...")
    results: dict[str, list[TrialResult]] = {mode: [] for mode in modes}
    for done, result in enumerate(_map_jobs(jobs, context, workers), start=1):
        results[result.mode].append(result)
        logger.info(f"Finished {done} of {len(jobs)} trials.")
    reports = [BenchmarkReport(mode=mode, seeds=tuple(seeds), trials=tuple(results[mode])) for mode in modes]
    for report in reports:
        logger.info(report.describe())
    return reports


def write_reports(reports: Sequence[BenchmarkReport], path: str) -> None:
    with open(ensure_parent_dir(path), "w", encoding="utf8") as f:
        json.dump([report.to_json() for report in reports], f, indent=2)
