# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Check on a 1D double integrator under linear feedback that, at every time,
the position error is largest at one of the two ends of the interval of initial speeds.
This is what justifies sampling only cell vertices when building the table.
"""

from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from ..geometry.basic_types import Interval
from ..trajectory.basic_types import TrajParam1D, TrajTiming
from ..trajectory.spline import acc_1d, pos_1d, vel_1d


class FeedbackGains(NamedTuple):
    """u = p_des'' + kp (p - p_des) + kd (p' - p_des'); stable for negative gains."""

    kp: float = -4.0
    kd: float = -3.0


class EndpointReport(NamedTuple):
    speeds: np.ndarray
    times: np.ndarray
    errors: np.ndarray  # |p - p_des|, shape (n_speeds, n_times)
    worst_violation: float  # how much an interior speed beats both endpoints, m

    @property
    def holds(self) -> bool:
        return self.worst_violation <= 1e-7

    @property
    def argmax_speeds(self) -> np.ndarray:
        return self.speeds[np.argmax(self.errors, axis=0)]


def _track_1d(v0: float, gains: FeedbackGains, kappa: TrajParam1D, timing: TrajTiming, times: np.ndarray) -> np.ndarray:
    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        t = min(t, timing.t_fin)
        u = (
            acc_1d(t, kappa, timing)
            + gains.kp * (y[0] - pos_1d(t, kappa, timing))
            + gains.kd * (y[1] - vel_1d(t, kappa, timing))
        )
        return np.array([y[1], u])

    sol = solve_ivp(rhs, (0.0, timing.t_fin), [0.0, v0], t_eval=times, rtol=1e-10, atol=1e-12, max_step=0.01)
    return sol.y[0] - pos_1d(times, kappa, timing)


def endpoint_experiment(
    gains: FeedbackGains,
    speeds: Interval,
    kappa: TrajParam1D,
    timing: TrajTiming,
    n_speeds: int = 11,
    n_times: int = 31,
) -> EndpointReport:
    grid = np.linspace(speeds.lo, speeds.hi, n_speeds)
    times = np.linspace(0.0, timing.t_fin, n_times)
    errors = np.abs(np.array([_track_1d(v0, gains, kappa, timing, times) for v0 in grid]))
    endpoint_max = np.maximum(errors[0], errors[-1])
    violation = float(np.max(errors.max(axis=0) - endpoint_max))
    return EndpointReport(speeds=grid, times=times, errors=errors, worst_violation=max(violation, 0.0))
