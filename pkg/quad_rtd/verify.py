# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Property suites that check the offline artifacts and the models they are built from.
Every suite draws its instances from a seeded generator and reports how many it checked and how many failed.
"""

import logging
import math
import time
from collections.abc import Callable
from typing import NamedTuple, Optional

import numpy as np

from .dynamics.basic_types import Gains, QuadParams, QuadState
from .dynamics.controller import Controller
from .dynamics.experiments import compare_integrators
from .dynamics.quad_sim import integrate
from .frs.basic_types import TimedFRS
from .geometry.basic_types import Box3, Interval
from .planner.augment import AugmentedFRS
from .planner.basic_types import UnsafeBoxSet
from .planner.intersect import intersect_all
from .tracking_error.basic_types import CoverSpec
from .tracking_error.cover import cover_report
from .tracking_error.endpoints import FeedbackGains, endpoint_experiment
from .tracking_error.table import TrackingErrorTable, make_job, replay_errors, vertices_of_cell
from .trajectory.basic_types import ParamBounds, SpeedLimits, TrajParam, TrajParam1D, TrajTiming
from .trajectory.spline import basis, feasible_mask, ref_arrays
from .world_bench.basic_types import WorldSettings
from .world_bench.bench import BenchContext, run_benchmark
from .world_bench.trial import TrialSettings

logger = logging.getLogger(__name__)

CONTAINMENT_TOL = 1e-9
FAIL_SAFE_SPEED = 0.05
REST_TOL = 1e-9
INTEGRATOR_GAP = 0.005
TRACKING_BOUND = 0.12
REPLAY_TIMES = 11
GOAL_RATE_MARGIN = 0.05


class PropertyResult(NamedTuple):
    name: str
    n_checked: int
    n_violations: int
    seconds: float
    detail: str = ""
    soft: bool = False

    @property
    def passed(self) -> bool:
        return self.soft or self.n_violations == 0

    def describe(self) -> str:
        status = "ok" if self.n_violations == 0 else ("warn" if self.soft else "FAIL")
        line = f"[{status}] {self.name}: {self.n_violations} of {self.n_checked} violated ({self.seconds:.1f} s)"
        return f"{line}; {self.detail}" if self.detail else line


class VerifyContext(NamedTuple):
    frs: TimedFRS
    table: Optional[TrackingErrorTable]
    params: QuadParams = QuadParams()
    gains: Gains = Gains.scalar()
    limits: SpeedLimits = SpeedLimits()
    scale: float = 1.0
    seed: int = 0
    trial: TrialSettings = TrialSettings()
    world: WorldSettings = WorldSettings()
    constant_error: float = 0.1
    workers: int = 1

    @property
    def timing(self) -> TrajTiming:
        return self.frs.timing

    @property
    def bounds(self) -> ParamBounds:
        return self.frs.bounds

    def count(self, full: int) -> int:
        return max(1, math.ceil(full * self.scale))


def random_in_box(rng: np.random.Generator, n: int, bounds: ParamBounds) -> tuple[np.ndarray, ...]:
    """k_v, k_a and k_pk uniform in the parameter box, each of shape (n, 3)."""
    return tuple(rng.uniform(-bound, bound, (n, 3)) for bound in bounds.as_array())


def random_feasible(rng: np.random.Generator, n: int, timing: TrajTiming, limits: SpeedLimits) -> tuple[np.ndarray, np.ndarray]:
    """k_v with speed at most v_max and a feasible k_pk for each, by rejection."""
    k_v, k_pk = np.zeros((0, 3)), np.zeros((0, 3))
    while len(k_v) < n:
        cand_v = rng.uniform(-limits.v_max, limits.v_max, (4 * n, 3))
        cand_pk = rng.uniform(-limits.v_max, limits.v_max, (4 * n, 3))
        keep = (np.linalg.norm(cand_v, axis=1) <= limits.v_max) & feasible_mask(cand_v, cand_pk, timing, limits)
        k_v, k_pk = np.concatenate([k_v, cand_v[keep]]), np.concatenate([k_pk, cand_pk[keep]])
    return k_v[:n], k_pk[:n]


def check_frs_conservatism(ctx: VerifyContext) -> PropertyResult:
    """Every reference position lies in the step of the FRS that covers its time, sliced at its parameter."""
    rng = np.random.default_rng(ctx.seed)
    n = ctx.count(100_000)
    arrays = ctx.frs.arrays
    k_v, k_a, k_pk = random_in_box(rng, n, ctx.bounds)
    t = rng.uniform(0.0, ctx.timing.t_fin, n)
    step = np.minimum(np.searchsorted(arrays.t_hi, t), arrays.n_steps - 1)
    b = basis(t, ctx.timing, order=0)
    pos = b[:, 0:1] * k_v + b[:, 1:2] * k_a + b[:, 2:3] * k_pk
    beta_v = (k_v - arrays.c_v[step]) / arrays.g_v[step]
    beta_a = (k_a - arrays.c_a[step]) / arrays.g_a[step]
    beta_pk = (k_pk - arrays.c_pk[step]) / arrays.g_pk[step]
    center = arrays.c_x[step] + arrays.gxv[step] * beta_v + arrays.gxa[step] * beta_a + arrays.gxpk[step] * beta_pk
    outside = np.any(np.abs(pos - center) > arrays.eps[step] + CONTAINMENT_TOL, axis=1)
    return PropertyResult("frs conservatism", n, int(outside.sum()), 0.0)


def replay_touches(
    k_v,
    k_a,
    k_pk: np.ndarray,
    t_interval: Interval,
    timing: TrajTiming,
    grow_lo,
    grow_hi,
    obstacle: Box3,
    n_times: int = REPLAY_TIMES,
) -> np.ndarray:
    """
    Whether the reference of each peak velocity, grown by the box [grow_lo, grow_hi],
    touches the obstacle at some sampled time of the interval.
    """
    k_pk = np.atleast_2d(np.asarray(k_pk, dtype=float))
    hit = np.zeros(len(k_pk), dtype=bool)
    for t in np.linspace(t_interval.lo, t_interval.hi, n_times):
        pos = ref_arrays(float(t), k_v, k_a, k_pk, timing).pos
        hit |= np.all((pos + grow_lo <= obstacle.hi) & (pos + grow_hi >= obstacle.lo), axis=-1)
    return hit


def _sample_peaks(rng: np.random.Generator, n: int, bounds: ParamBounds, unsafe: UnsafeBoxSet) -> np.ndarray:
    """Uniform in the parameter box, half of them inside the first unsafe box if there is one."""
    k_pk = rng.uniform(-bounds.kpk, bounds.kpk, (n, 3))
    if len(unsafe) > 0:
        k_pk[: n // 2] = rng.uniform(unsafe.lo[0], unsafe.hi[0], (n // 2, 3))
    return k_pk


def check_unsafe_set_exactness(ctx: VerifyContext, n_peaks: int = 400) -> PropertyResult:
    """
    Closed-form unsafe boxes against replayed reference trajectories.
    A peak velocity whose reference, grown by the error and body boxes, touches the obstacle must be in the box.
    A peak velocity in the box must touch it once the reference is also grown by twice the FRS remainder.
    """
    rng = np.random.default_rng(ctx.seed + 1)
    n = ctx.count(50)
    raw = ctx.frs.arrays
    body = Box3.cube((0.0, 0.0, 0.0), 0.54)
    violations, n_touching = 0, 0
    for _ in range(n):
        idx = int(rng.integers(len(ctx.frs)))
        err = rng.uniform(0.0, 0.15, (2, 3))
        zeps = AugmentedFRS(
            ctx.frs,
            np.repeat(-err[0][None], len(ctx.frs), axis=0),
            np.repeat(err[1][None], len(ctx.frs), axis=0),
            body,
        )
        arrays = zeps.arrays
        step = arrays._replace(**{name: value[idx : idx + 1] for name, value in arrays._asdict().items()})
        k_v, k_guess = (k[0] for k in random_feasible(rng, 1, ctx.timing, ctx.limits))
        k_a = rng.uniform(-ctx.bounds.ka, ctx.bounds.ka, 3)
        t_interval = Interval(float(raw.t_lo[idx]), float(raw.t_hi[idx]))
        anchor = ref_arrays(t_interval.mid, k_v, k_a, k_guess, ctx.timing).pos
        obstacle = Box3(center=anchor + rng.normal(0.0, 1.0, 3), half_extents=rng.uniform(0.25, 1.5, 3))
        unsafe = intersect_all(step, [obstacle], k_v, k_a)

        k_pk = _sample_peaks(rng, n_peaks, ctx.bounds, unsafe)
        grow_lo, grow_hi = zeps.err_lo[idx] + body.lo, zeps.err_hi[idx] + body.hi
        touching = replay_touches(k_v, k_a, k_pk, t_interval, ctx.timing, grow_lo, grow_hi, obstacle)
        slack = 2.0 * raw.eps[idx] + CONTAINMENT_TOL
        near = replay_touches(k_v, k_a, k_pk, t_interval, ctx.timing, grow_lo - slack, grow_hi + slack, obstacle)
        n_touching += int(touching.sum())
        missed = touching & ~unsafe.contains(k_pk, CONTAINMENT_TOL)
        spurious = unsafe.contains(k_pk, -CONTAINMENT_TOL) & ~near
        violations += bool(np.any(missed) or np.any(spurious))
    return PropertyResult("unsafe set exactness", n, violations, 0.0, f"{n_touching} touching peak velocities")


def check_fail_safe(ctx: VerifyContext) -> PropertyResult:
    """References end at rest, and so does the tracking robot."""
    rng = np.random.default_rng(ctx.seed + 2)
    n = ctx.count(100)
    k_v, k_pk = random_feasible(rng, n, ctx.timing, ctx.limits)
    k_a = rng.uniform(-ctx.bounds.ka, ctx.bounds.ka, (n, 3))
    end = ref_arrays(ctx.timing.t_fin, k_v, k_a, k_pk, ctx.timing)
    analytic = (np.abs(end.vel).max(axis=1) > REST_TOL) | (np.abs(end.acc).max(axis=1) > REST_TOL)

    zero_a = np.zeros_like(k_v)

    def ref_fn(t: float):
        return ref_arrays(min(max(t, 0.0), ctx.timing.t_fin), k_v, zero_a, k_pk, ctx.timing)

    s = QuadState.at_rest(v=k_v)
    for _, s in integrate(s, Controller(ref_fn, ctx.gains, ctx.params), (0.0, ctx.timing.t_fin), 0.005, ctx.params):
        pass
    moving = np.linalg.norm(s.v, axis=1) >= FAIL_SAFE_SPEED
    worst = float(np.linalg.norm(s.v, axis=1).max())
    return PropertyResult("fail-safe", n, int((analytic | moving).sum()), 0.0, f"largest final speed {worst:.4f} m/s")


def check_integrators(ctx: VerifyContext) -> PropertyResult:
    rng = np.random.default_rng(ctx.seed + 3)
    n = ctx.count(100)
    k_v, k_pk = random_feasible(rng, n, ctx.timing, ctx.limits)
    k_list = [TrajParam(k_v=kv, k_a=np.zeros(3), k_pk=kpk) for kv, kpk in zip(k_v, k_pk)]
    report = compare_integrators(k_list, ctx.params, ctx.gains, ctx.timing)
    violations = int(np.any(report.max_gap > INTEGRATOR_GAP))
    return PropertyResult(
        "integrator agreement", n, violations, 0.0, f"max gap {report.max_gap.max() * 1000:.2f} mm"
    )


def check_endpoint_argmax(ctx: VerifyContext) -> PropertyResult:
    """A double integrator's tracking error is largest at one of the extreme initial speeds."""
    rng = np.random.default_rng(ctx.seed + 4)
    n = ctx.count(100)
    violations = 0
    for _ in range(n):
        gains = FeedbackGains(kp=-rng.uniform(1.0, 10.0), kd=-rng.uniform(1.0, 10.0))
        lo = rng.uniform(-ctx.limits.v_max, ctx.limits.v_max - 0.5)
        speeds = Interval(lo, rng.uniform(lo + 0.5, ctx.limits.v_max))
        kappa = TrajParam1D(rng.uniform(-5.0, 5.0), rng.uniform(-10.0, 10.0), rng.uniform(-5.0, 5.0))
        violations += not endpoint_experiment(gains, speeds, kappa, ctx.timing).holds
    return PropertyResult("endpoint argmax", n, violations, 0.0)


def check_table_containment(ctx: VerifyContext) -> PropertyResult:
    """Replayed samples of random cells stay in the boxes of their cell, and the error stays small."""
    if ctx.table is None:
        return PropertyResult("table containment", 0, 0, 0.0, "no error table given", soft=True)
    table = ctx.table
    spec = table.spec
    rng = np.random.default_rng(ctx.seed + 5)
    rows = rng.choice(len(table.cells), size=min(ctx.count(20), len(table.cells)), replace=False)
    violations, largest = 0, 0.0
    for row in rows:
        vertices = vertices_of_cell(spec, int(table.cells[row]))
        job = make_job(spec, vertices, ctx.params, ctx.gains, ctx.timing, ctx.limits, table.metadata.sim_dt)
        bad = False
        for t, e_x in replay_errors(job):
            b = min(max(math.floor(t / spec.dt), 0), spec.n_bins - 1)
            largest = max(largest, float(np.abs(e_x).max()))
            bad |= bool(np.any(e_x < table.lo[b, row] - CONTAINMENT_TOL) or np.any(e_x > table.hi[b, row] + CONTAINMENT_TOL))
        violations += bad
    violations += largest > TRACKING_BOUND
    return PropertyResult("table containment", len(rows), violations, 0.0, f"largest error {largest:.4f} m")


def check_benchmark(ctx: VerifyContext) -> PropertyResult:
    """
    Both error modes fly the same random worlds without a crash,
    and the table mode reaches the goal about as often as the constant mode or more.
    """
    if ctx.table is None:
        return PropertyResult("benchmark", 0, 0, 0.0, "no error table given", soft=True)
    seeds = list(range(ctx.seed, ctx.seed + ctx.count(50)))
    context = BenchContext(ctx.frs, ctx.table, ctx.trial, ctx.world, ctx.constant_error)
    reports = {report.mode: report for report in run_benchmark(seeds, ["constant", "table"], context, ctx.workers)}
    constant, table = reports["constant"], reports["table"]
    crashes = sum(trial.crashed for report in reports.values() for trial in report.trials)
    behind = table.goal_rate < constant.goal_rate - GOAL_RATE_MARGIN
    return PropertyResult(
        "benchmark",
        2 * len(seeds),
        crashes + behind,
        0.0,
        f"goal rate {table.goal_rate:.2f} (table) vs {constant.goal_rate:.2f} (constant), {crashes} crashes",
    )


def check_cover_cardinality(ctx: VerifyContext) -> PropertyResult:
    report = cover_report(CoverSpec(v_max=5.0, dv=0.7, dt=0.02, t_fin=3.0))
    return PropertyResult(
        "cover cardinality", 1, int(report.n_subdomains != 102_900), 0.0, report.describe(), soft=True
    )


SUITES: dict[str, Callable[[VerifyContext], PropertyResult]] = {
    "frs": check_frs_conservatism,
    "unsafe-set": check_unsafe_set_exactness,
    "fail-safe": check_fail_safe,
    "integrators": check_integrators,
    "endpoint-argmax": check_endpoint_argmax,
    "table": check_table_containment,
    "cover": check_cover_cardinality,
    "benchmark": check_benchmark,
}


def run_suites(ctx: VerifyContext, names: Optional[list[str]] = None) -> list[PropertyResult]:
    results = []
    for name in names or list(SUITES):
        logger.info(f"Checking {name}...")
        start = time.perf_counter()
        result = SUITES[name](ctx)
        results.append(result._replace(seconds=time.perf_counter() - start))
        logger.info(results[-1].describe())
    return results
