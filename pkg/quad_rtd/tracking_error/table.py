# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
import functools
import logging
import math
import time
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple

import numpy as np
from scipy.spatial import cKDTree

from ..dynamics.basic_types import Gains, QuadParams, QuadState, SimulationDiverged
from ..dynamics.controller import Controller
from ..dynamics.quad_sim import integrate
from ..helpers.consts import INTEGRATION_SLACK
from ..helpers.misc import split_list
from ..trajectory.basic_types import RefPoint, SpeedLimits, TrajectoryError, TrajTiming
from ..trajectory.spline import ref_arrays
from .basic_types import BIN_TOL, CoverSpec, ErrorBox, TableBuildError, TableMetadata
from .cover import cell_vertex_grid, count_clamped_peaks, feasible_peak_vels, retained_cells

logger = logging.getLogger(__name__)

VERTICES_PER_JOB = 512


@dataclasses.dataclass(frozen=True, eq=False)
class TrackingErrorTable:
    """
    Error boxes indexed by (time bin, retained velocity cell).
    lo and hi have shape (n_bins, n_cells, 3).
    """

    spec: CoverSpec
    cells: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    metadata: TableMetadata = TableMetadata()

    def __post_init__(self) -> None:
        shape = (self.spec.n_bins, len(self.cells), 3)
        if self.lo.shape != shape or self.hi.shape != shape:
            raise TableBuildError(f"table arrays must have shape {shape}, got {self.lo.shape} and {self.hi.shape}")

    @functools.cached_property
    def _rows(self) -> np.ndarray:
        """Row of every cell of the full grid; discarded cells point to the nearest retained cell."""
        flat = np.arange(self.spec.n_cells_total)
        centers = self.spec.cell_lo(flat) + 0.5 * self.spec.dv
        _, rows = cKDTree(centers[self.cells]).query(centers)
        rows[self.cells] = np.arange(len(self.cells))
        return rows

    def row_of(self, k_v) -> np.ndarray:
        return self._rows[self.spec.locate(k_v)]

    def check_time(self, t: float) -> None:
        if not -BIN_TOL <= t <= self.spec.t_fin + BIN_TOL:
            raise TrajectoryError(f"time must lie in [0, {self.spec.t_fin}], got {t}")

    def box(self, b: int, row: int) -> ErrorBox:
        return ErrorBox(self.lo[b, row].copy(), self.hi[b, row].copy())


def _bins_of_sample(t: float, spec: CoverSpec) -> list[int]:
    ratio = t / spec.dt
    nearest = round(ratio)
    if abs(ratio - nearest) < BIN_TOL:
        candidates = [nearest - 1, nearest]
    else:
        candidates = [math.floor(ratio)]
    bins = sorted({min(max(b, 0), spec.n_bins - 1) for b in candidates})
    return bins


class VertexJob(NamedTuple):
    first_vertex: int
    vertices: np.ndarray
    spec: CoverSpec
    params: QuadParams
    gains: Gains
    timing: TrajTiming
    limits: SpeedLimits
    sim_dt: float


class _JobResult(NamedTuple):
    lo: np.ndarray  # (n_bins, n_vertices, 3)
    hi: np.ndarray
    n_simulations: int


def sample_trajectories(vertices: np.ndarray, timing: TrajTiming, limits: SpeedLimits):
    """Initial velocities, peak velocities and the matching reference of all samples, flattened."""
    peaks = feasible_peak_vels(vertices, timing.t_pk, limits.a_max, limits.v_max)
    k_v = np.repeat(vertices[:, None, :], peaks.shape[1], axis=1).reshape(-1, 3)
    k_pk = peaks.reshape(-1, 3)
    k_a = np.zeros_like(k_v)

    def ref_fn(t: float) -> RefPoint:
        return ref_arrays(min(max(t, 0.0), timing.t_fin), k_v, k_a, k_pk, timing)

    return k_v, k_pk, ref_fn


def replay_errors(job: VertexJob) -> Iterator[tuple[float, np.ndarray]]:
    """Yield (t, e_x) of every sample trajectory of the job, e_x with shape (n_vertices, 8, 3)."""
    k_v, _, ref_fn = sample_trajectories(job.vertices, job.timing, job.limits)
    s0 = QuadState.at_rest(v=k_v)
    ctrl = Controller(ref_fn, job.gains, job.params)
    for t, s in integrate(s0, ctrl, (0.0, job.timing.t_fin), job.sim_dt, job.params):
        yield t, (s.x - ref_fn(t).pos).reshape(len(job.vertices), -1, 3)


def _run_job(job: VertexJob) -> _JobResult:
    shape = (job.spec.n_bins, len(job.vertices), 3)
    lo, hi = np.full(shape, np.inf), np.full(shape, -np.inf)
    try:
        for t, e_x in replay_errors(job):
            e_lo, e_hi = e_x.min(axis=1), e_x.max(axis=1)
            for b in _bins_of_sample(t, job.spec):
                np.minimum(lo[b], e_lo, out=lo[b])
                np.maximum(hi[b], e_hi, out=hi[b])
    except SimulationDiverged as ex:
        raise TableBuildError(
            f"samples of vertices {job.first_vertex}..{job.first_vertex + len(job.vertices) - 1} diverged: {ex}"
        ) from ex
    return _JobResult(lo, hi, n_simulations=len(job.vertices) * 8)


def _map_jobs(jobs: Sequence[VertexJob], workers: int) -> Iterator[_JobResult]:
    if workers <= 1:
        yield from map(_run_job, jobs)
        return
    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield from executor.map(_run_job, jobs)


def compute_table(
    spec: CoverSpec,
    params: QuadParams,
    gains: Gains,
    timing: TrajTiming,
    limits: SpeedLimits,
    sim_dt: float = 0.005,
    slack: float = INTEGRATION_SLACK,
    workers: int = 1,
    config_hash: str = "",
) -> TrackingErrorTable:
    """
    Track every sample trajectory of every cell vertex and bound the position error
    of each (time bin, cell) by the axis-aligned hull of the errors of its vertices.
    """
    if sim_dt > spec.dt + BIN_TOL:
        raise TableBuildError(f"simulation step {sim_dt} s must not exceed the time bin {spec.dt} s")
    start = time.perf_counter()
    cells = retained_cells(spec)
    vertices, cell_vertices = cell_vertex_grid(spec, cells)
    logger.info(f"Computing tracking error of {len(cells)} cells from {len(vertices)} vertices...")
    n_clamped = count_clamped_peaks(vertices, timing.t_pk, limits.a_max, limits.v_max)
    if n_clamped:
        logger.info(f"Moved {n_clamped} peak velocities of vertices outside the speed ball onto it.")

    jobs, first = [], 0
    for chunk in split_list(list(range(len(vertices))), math.ceil(len(vertices) / VERTICES_PER_JOB)):
        jobs.append(VertexJob(first, vertices[chunk], spec, params, gains, timing, limits, sim_dt))
        first += len(chunk)

    vertex_lo, vertex_hi, n_sims = [], [], 0
    for result in _map_jobs(jobs, workers):
        vertex_lo.append(result.lo)
        vertex_hi.append(result.hi)
        n_sims += result.n_simulations
        logger.info(f"Simulated {n_sims} of {len(vertices) * 8} trajectories.")

    lo_v, hi_v = np.concatenate(vertex_lo, axis=1), np.concatenate(vertex_hi, axis=1)
    if not (np.all(np.isfinite(lo_v)) and np.all(np.isfinite(hi_v))):
        raise TableBuildError("some time bins received no samples")
    lo = lo_v[:, cell_vertices].min(axis=2)
    hi = hi_v[:, cell_vertices].max(axis=2)
    max_abs = float(max(np.abs(lo).max(), np.abs(hi).max()))
    metadata = TableMetadata(
        n_simulations=n_sims,
        n_clamped_peaks=n_clamped,
        max_abs_error=max_abs,
        build_seconds=time.perf_counter() - start,
        sim_dt=sim_dt,
        slack=slack,
        config_hash=config_hash,
    )
    logger.info(f"Built tracking error table. Largest error: {max_abs:.4f} m.")
    return TrackingErrorTable(spec=spec, cells=cells, lo=lo - slack, hi=hi + slack, metadata=metadata)


def query(table: TrackingErrorTable, t: float, k_v) -> ErrorBox:
    table.check_time(t)
    b = min(max(math.floor(t / table.spec.dt), 0), table.spec.n_bins - 1)
    return table.box(b, int(table.row_of(k_v)))


def error_box_for_interval(table: TrackingErrorTable, t_lo: float, t_hi: float, k_v) -> ErrorBox:
    """Hull of the boxes of every time bin overlapping [t_lo, t_hi]."""
    table.check_time(t_lo)
    table.check_time(t_hi)
    bins = table.spec.bins_overlapping(t_lo, t_hi)
    row = int(table.row_of(k_v))
    return ErrorBox(
        table.lo[bins.start : bins.stop, row].min(axis=0),
        table.hi[bins.start : bins.stop, row].max(axis=0),
    )


def max_error_extent(table: TrackingErrorTable) -> float:
    """Largest distance from zero to any face of any stored box, m."""
    return float(max(np.abs(table.lo).max(), np.abs(table.hi).max()))


def cell_maxima(table: TrackingErrorTable) -> list[dict[str, float]]:
    """Per velocity cell: its center and the largest absolute error on each axis over all time bins."""
    centers = table.spec.cell_lo(table.cells) + 0.5 * table.spec.dv
    extent = np.maximum(np.abs(table.lo), np.abs(table.hi)).max(axis=0)
    return [
        {
            "cell": int(cell),
            "v1": float(c[0]),
            "v2": float(c[1]),
            "v3": float(c[2]),
            "e1": float(e[0]),
            "e2": float(e[1]),
            "e3": float(e[2]),
        }
        for cell, c, e in zip(table.cells, centers, extent)
    ]


def make_job(
    spec: CoverSpec,
    vertices: np.ndarray,
    params: QuadParams,
    gains: Gains,
    timing: TrajTiming,
    limits: SpeedLimits,
    sim_dt: float,
    first: int = 0,
) -> VertexJob:
    return VertexJob(first, np.asarray(vertices, dtype=float).reshape(-1, 3), spec, params, gains, timing, limits, sim_dt)


def vertices_of_cell(spec: CoverSpec, cell: int) -> np.ndarray:
    vertices, idx = cell_vertex_grid(spec, np.array([cell]))
    return vertices[idx[0]]
