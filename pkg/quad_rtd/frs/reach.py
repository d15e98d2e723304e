# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Reachable set of the trajectory-producing model.

Position is exactly a(t) . kappa for the polynomial basis a of the trajectory module.
On a step [t0, t1] with midpoint tc, a(t) . kappa lies in a(tc) . kappa +- sum_j r_j |kappa_j|,
where r_j bounds |a_j(t) - a_j(tc)| on the step. So one zonotope per step needs
one generator per parameter and one remainder column.
"""

import logging
from collections.abc import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from ..geometry.basic_types import Interval, Zonotope
from ..geometry.ops import block_concat
from ..trajectory.basic_types import ParamBounds, Segment, TrajParam1D, TrajTiming
from ..trajectory.spline import affine_pos_coeffs, basis_polys
from .basic_types import AXIS_LABELS, FrsError, TimedFRS, TimedZonotope

logger = logging.getLogger(__name__)

GRID_TOL = 1e-9


def bounds_from_box(lower: TrajParam1D, upper: TrajParam1D) -> ParamBounds:
    lo, hi = lower.as_array(), upper.as_array()
    if not np.allclose(lo, -hi, rtol=0.0, atol=1e-12) or np.any(hi <= 0):
        raise FrsError(f"parameter bounds must be symmetric about zero, got {lo} and {hi}")
    return ParamBounds(*hi)


def initial_set_1d(bounds: ParamBounds) -> Zonotope:
    """Position at the origin, every parameter anywhere in its box."""
    return Zonotope(center=np.zeros(4), generators=np.diag([0.0, *bounds.as_array()]), labels=AXIS_LABELS)


def step_grid(timing: TrajTiming, dt: float) -> np.ndarray:
    """Multiples of dt in [0, t_fin], plus t_pk and t_fin."""
    if dt <= 0:
        raise FrsError(f"time step must be positive, got {dt}")
    points = np.concatenate([np.arange(0.0, timing.t_fin, dt), [timing.t_pk, timing.t_fin]])
    points = np.sort(points)
    keep = np.concatenate([[True], np.diff(points) > GRID_TOL])
    grid = points[keep]
    # t_pk and t_fin must stay exact even if a multiple of dt lands within tolerance of them.
    for exact in (timing.t_pk, timing.t_fin):
        grid[np.argmin(np.abs(grid - exact))] = exact
    return grid


def _max_abs_on(polys: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Exact max of |p| on [lo, hi] for each row of polynomial coefficients."""
    out = np.zeros(len(polys))
    for idx, row in enumerate(polys):
        candidates = [lo, hi]
        deriv = P.polyder(row)
        if np.any(deriv != 0):
            roots = P.polyroots(deriv) if len(deriv) > 1 else np.array([])
            candidates.extend(r.real for r in roots if abs(r.imag) < 1e-12 and lo <= r.real <= hi)
        out[idx] = np.max(np.abs(P.polyval(np.array(candidates), row)))
    return out


def step_remainders(t0: float, t1: float, timing: TrajTiming, n_samples: int = 32) -> np.ndarray:
    """
    r_j >= max |a_j(t) - a_j(tc)| over the step, for j in (v, a, pk).
    Sampled maximum on n_samples sub-intervals plus a Lipschitz pad over the gap between samples.
    """
    tc = 0.5 * (t0 + t1)
    ts = np.linspace(t0, t1, n_samples + 1)
    sampled = np.max(np.abs(affine_pos_coeffs(ts, timing) - affine_pos_coeffs(tc, timing)), axis=0)
    segment = Segment.at(tc, timing.t_pk)
    offset = 0.0 if segment == Segment.first else timing.t_pk
    vel_polys = basis_polys(timing, 1)[segment.value]
    lipschitz = _max_abs_on(vel_polys, t0 - offset, t1 - offset)
    return sampled + lipschitz * (t1 - t0) / (2.0 * n_samples)


def reach_1d(bounds: ParamBounds, timing: TrajTiming, dt: float = 0.02, n_samples: int = 32) -> list[TimedZonotope]:
    k_max = bounds.as_array()
    grid = step_grid(timing, dt)
    steps = []
    for t0, t1 in zip(grid[:-1], grid[1:]):
        tc = 0.5 * (t0 + t1)
        gamma_x = affine_pos_coeffs(tc, timing) * k_max
        eps = float(step_remainders(t0, t1, timing, n_samples) @ k_max)
        generators = np.zeros((4, 4))
        generators[0, :3] = gamma_x
        generators[1:, :3] = np.diag(k_max)
        generators[0, 3] = eps
        steps.append(TimedZonotope(Interval(float(t0), float(t1)), Zonotope(np.zeros(4), generators, AXIS_LABELS)))
    return steps


def reach_3d(bounds: ParamBounds, timing: TrajTiming, dt: float = 0.02, n_samples: int = 32) -> TimedFRS:
    steps_1d = reach_1d(bounds, timing, dt, n_samples)
    steps = tuple(TimedZonotope(step.t_interval, block_concat(step.zono, step.zono, step.zono)) for step in steps_1d)
    logger.info(f"Initialized FRS with {len(steps)} steps.")
    return TimedFRS(
        steps=steps,
        timing=timing,
        bounds=bounds,
        dt=dt,
        metadata={"n_samples": n_samples, "mean_eps": float(np.mean([s.zono.generators[0, 3] for s in steps_1d]))},
    )


def covering_steps(frs_steps: Sequence[TimedZonotope], t: float) -> list[int]:
    """Every step whose closed interval contains t."""
    return [idx for idx, step in enumerate(frs_steps) if step.t_interval.contains(t, tol=1e-12)]
