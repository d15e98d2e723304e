# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import logging
import time
from collections.abc import Sequence
from typing import NamedTuple

import numpy as np

from ..trajectory.basic_types import RefPoint, TrajParam, TrajTiming
from ..trajectory.spline import ref_point
from .basic_types import Gains, QuadParams, QuadState
from .controller import Controller
from .quad_sim import Integrator, SimTrace, simulate

logger = logging.getLogger(__name__)


def reference_fn(k: TrajParam, timing: TrajTiming):
    """Reference of k that holds the initial point before 0 and the final point after t_fin."""

    def fn(t: float) -> RefPoint:
        return ref_point(min(max(t, 0.0), timing.t_fin), k, timing)

    return fn


def track_trajectory(
    k: TrajParam,
    timing: TrajTiming,
    gains: Gains,
    p: QuadParams,
    dt: float = 0.005,
    method: Integrator = Integrator.lie_euler,
) -> SimTrace:
    """Start on the reference with level attitude and track k over [0, t_fin]."""
    s0 = QuadState.at_rest(v=k.k_v)
    return simulate(s0, Controller(reference_fn(k, timing), gains, p), (0.0, timing.t_fin), dt, p, method)


class IntegratorReport(NamedTuple):
    n_samples: int
    max_gap: np.ndarray  # per axis, m
    mean_gap: float
    lie_euler_seconds: float
    rkmk4_seconds: float

    @property
    def time_ratio(self) -> float:
        return self.lie_euler_seconds / max(self.rkmk4_seconds, 1e-12)

    def describe(self) -> str:
        return "\n".join(
            (
                f"trajectories: {self.n_samples}",
                f"max position gap per axis, m: {np.array2string(self.max_gap, precision=5)}",
                f"mean position gap, m: {self.mean_gap:.5f}",
                f"Lie-Euler time relative to RK-MK4: {self.time_ratio:.0%}",
            )
        )


def compare_integrators(
    k_list: Sequence[TrajParam],
    p: QuadParams,
    gains: Gains,
    timing: TrajTiming,
    dt: float = 0.005,
) -> IntegratorReport:
    max_gap = np.zeros(3)
    gaps = []
    elapsed = {Integrator.lie_euler: 0.0, Integrator.rkmk4: 0.0}
    for k in k_list:
        traces = {}
        for method in elapsed:
            start = time.perf_counter()
            traces[method] = track_trajectory(k, timing, gains, p, dt, method)
            elapsed[method] += time.perf_counter() - start
        gap = np.abs(traces[Integrator.lie_euler].states.x - traces[Integrator.rkmk4].states.x)
        max_gap = np.maximum(max_gap, gap.max(axis=0))
        gaps.append(gap.max())
    logger.info(f"Compared integrators on {len(k_list)} trajectories.")
    return IntegratorReport(
        n_samples=len(k_list),
        max_gap=max_gap,
        mean_gap=float(np.mean(gaps)) if gaps else 0.0,
        lie_euler_seconds=elapsed[Integrator.lie_euler],
        rkmk4_seconds=elapsed[Integrator.rkmk4],
    )
