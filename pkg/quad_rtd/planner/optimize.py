# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import functools
import math
import time
from collections.abc import Callable
from typing import NamedTuple, Optional

import numpy as np
from scipy.stats import qmc

from ..trajectory.basic_types import SpeedLimits, TrajTiming
from ..trajectory.spline import affine_pos_coeffs, feasible_mask
from .basic_types import ConstraintSet
from .constraints import safe_mask

CostFn = Callable[[np.ndarray], np.ndarray]


class OptimizerSettings(NamedTuple):
    timing: TrajTiming = TrajTiming()
    limits: SpeedLimits = SpeedLimits()
    n_samples: int = 10_000
    batch_size: int = 512
    deterministic: bool = True


class OptimizeResult(NamedTuple):
    k_pk: Optional[np.ndarray]
    n_feasible: int
    n_checked: int
    timed_out: bool


@functools.cache
def ball_samples(n: int) -> np.ndarray:
    """The first n points of an unscrambled Halton sequence that fall in the unit ball."""
    sampler = qmc.Halton(d=3, scramble=False)
    chunk = max(64, math.ceil(n / (math.pi / 6.0) * 1.1))
    found: list[np.ndarray] = []
    count = 0
    while count < n:
        points = 2.0 * sampler.random(chunk) - 1.0
        points = points[np.linalg.norm(points, axis=1) <= 1.0]
        found.append(points)
        count += len(points)
    samples = np.concatenate(found)[:n]
    samples.setflags(write=False)
    return samples


def sample_radius(timing: TrajTiming, limits: SpeedLimits) -> float:
    return min(limits.v_max, limits.a_max * timing.t_pk)


def candidate_peaks(k_v, settings: OptimizerSettings) -> np.ndarray:
    """Sample ball centered at the current velocity, shape (n_samples, 3)."""
    radius = sample_radius(settings.timing, settings.limits)
    return np.asarray(k_v, dtype=float) + radius * ball_samples(settings.n_samples)


def waypoint_cost(k_v, k_a, timing: TrajTiming, target) -> CostFn:
    """Squared distance between the position at t_pk and a target, both relative to the plan start."""
    a_v, a_a, a_pk = affine_pos_coeffs(timing.t_pk, timing)
    offset = a_v * np.asarray(k_v, dtype=float) + a_a * np.asarray(k_a, dtype=float) - np.asarray(target, dtype=float)

    def cost(k_pk: np.ndarray) -> np.ndarray:
        return np.sum((offset + a_pk * k_pk) ** 2, axis=-1)

    return cost


def optimize(
    cost_fn: CostFn,
    constraints: ConstraintSet,
    k_v,
    k_a,
    budget: float,
    settings: OptimizerSettings = OptimizerSettings(),
    started: Optional[float] = None,
) -> OptimizeResult:
    """
    Lowest-cost sample that is feasible and outside every unsafe box.
    Samples are checked in order of cost, one batch at a time, so the first safe one wins.
    Ties go to the smaller sample index. Without deterministic mode the wall clock is checked between batches.
    """
    assert budget > 0
    started = time.perf_counter() if started is None else started
    candidates = candidate_peaks(k_v, settings)
    feasible = candidates[feasible_mask(np.asarray(k_v, dtype=float), candidates, settings.timing, settings.limits)]
    order = np.argsort(cost_fn(feasible), kind="stable")
    checked = 0
    for first in range(0, len(order), settings.batch_size):
        if not settings.deterministic and time.perf_counter() - started > budget:
            return OptimizeResult(None, len(feasible), checked, timed_out=True)
        batch = feasible[order[first : first + settings.batch_size]]
        safe = safe_mask(batch, constraints)
        checked += len(batch)
        if np.any(safe):
            return OptimizeResult(batch[np.argmax(safe)].copy(), len(feasible), checked, timed_out=False)
    return OptimizeResult(None, len(feasible), checked, timed_out=False)
