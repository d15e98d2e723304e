# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import csv
import enum
import logging
from collections.abc import Callable, Iterator
from typing import NamedTuple

import numpy as np

from ..helpers.file_ops import ensure_parent_dir
from .basic_types import QuadParams, QuadState, SimulationDiverged, StateDerivative, Wrench
from .rotors import saturate
from .so3 import dexpinv_so3, expm_so3, hat, reorthonormalize

logger = logging.getLogger(__name__)

ControllerFn = Callable[[float, QuadState], Wrench]
TRACE_HEADER = ("t", "x1", "x2", "x3", "v1", "v2", "v3", "w1", "w2", "w3", *(f"r{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3)))


@enum.unique
class Integrator(enum.Enum):
    lie_euler = enum.auto()
    rkmk4 = enum.auto()


def dynamics(s: QuadState, u: Wrench, p: QuadParams) -> StateDerivative:
    """Rigid-body equations of motion. The wrench must already be saturated."""
    thrust_dir = s.R[..., :, 2]
    v_dot = (np.asarray(u.tau)[..., None] / p.mass) * thrust_dir
    v_dot[..., 2] -= p.gravity
    J_omega = s.omega * np.asarray(p.inertia)
    omega_dot = (u.mu - np.cross(s.omega, J_omega)) / np.asarray(p.inertia)
    return StateDerivative(x_dot=s.v, v_dot=v_dot, omega_dot=omega_dot, R_dot=s.R @ hat(s.omega))


def step_lie_euler(s: QuadState, u: Wrench, dt: float, p: QuadParams) -> QuadState:
    d = dynamics(s, u, p)
    R = reorthonormalize(s.R @ expm_so3(dt * s.omega))
    return QuadState(x=s.x + dt * d.x_dot, v=s.v + dt * d.v_dot, omega=s.omega + dt * d.omega_dot, R=R)


def step_rkmk4(s: QuadState, u_fn: ControllerFn, dt: float, p: QuadParams, t: float = 0.0) -> QuadState:
    """
    Classic fourth order Runge-Kutta on (x, v, omega) and Munthe-Kaas on the attitude.
    The attitude is written as R0 exp(hat(theta)); theta starts at zero.
    The controller is re-evaluated at every stage.
    """

    def stage(theta: np.ndarray, euclid: tuple[np.ndarray, ...], t_stage: float):
        state = QuadState(*euclid, R=s.R @ expm_so3(theta))
        d = dynamics(state, saturate(u_fn(t_stage, state), p), p)
        # R = R0 exp(theta) and R' = R hat(omega)
        theta_dot = dexpinv_so3(-theta, state.omega)
        return (d.x_dot, d.v_dot, d.omega_dot), theta_dot

    base = (s.x, s.v, s.omega)
    zero = np.zeros_like(s.omega)

    def shifted(k: tuple[np.ndarray, ...], h: float) -> tuple[np.ndarray, ...]:
        return tuple(y + h * dy for y, dy in zip(base, k))

    k1, th1 = stage(zero, base, t)
    k2, th2 = stage(0.5 * dt * th1, shifted(k1, 0.5 * dt), t + 0.5 * dt)
    k3, th3 = stage(0.5 * dt * th2, shifted(k2, 0.5 * dt), t + 0.5 * dt)
    k4, th4 = stage(dt * th3, shifted(k3, dt), t + dt)

    x, v, omega = (
        y + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d) for y, a, b, c, d in zip(base, k1, k2, k3, k4)
    )
    theta = dt / 6.0 * (th1 + 2.0 * th2 + 2.0 * th3 + th4)
    return QuadState(x=x, v=v, omega=omega, R=reorthonormalize(s.R @ expm_so3(theta)))


def integrate(
    s0: QuadState,
    controller_fn: ControllerFn,
    t_span: tuple[float, float],
    dt: float,
    p: QuadParams,
    method: Integrator = Integrator.lie_euler,
) -> Iterator[tuple[float, QuadState]]:
    """
    Yield (t, state) at every step, starting with the initial state.
    The state may be batched; the controller must accept the same batch.
    """
    t0, t1 = t_span
    n_steps = int(round((t1 - t0) / dt))
    s = s0
    yield t0, s
    for step in range(n_steps):
        t = t0 + step * dt
        if method == Integrator.lie_euler:
            s = step_lie_euler(s, saturate(controller_fn(t, s), p), dt, p)
        else:
            s = step_rkmk4(s, controller_fn, dt, p, t)
        if not np.all(s.is_finite()):
            raise SimulationDiverged("non-finite state", time=t + dt, step=step + 1)
        yield t0 + (step + 1) * dt, s


class SimTrace(NamedTuple):
    t: np.ndarray
    states: QuadState

    @property
    def final(self) -> QuadState:
        return self.states.take(-1)

    def write_csv(self, path: str) -> None:
        with open(ensure_parent_dir(path), "w", newline="", encoding="utf8") as f:
            writer = csv.writer(f)
            writer.writerow(TRACE_HEADER)
            rows = np.column_stack(
                [
                    self.t,
                    self.states.x,
                    self.states.v,
                    self.states.omega,
                    self.states.R.reshape(len(self.t), 9),
                ]
            )
            writer.writerows(rows.tolist())


def simulate(
    s0: QuadState,
    controller_fn: ControllerFn,
    t_span: tuple[float, float],
    dt: float = 0.005,
    p: QuadParams = QuadParams(),
    method: Integrator = Integrator.lie_euler,
) -> SimTrace:
    times, states = [], []
    for t, s in integrate(s0, controller_fn, t_span, dt, p, method):
        times.append(t)
        states.append(s)
    stacked = QuadState(*(np.stack(field) for field in zip(*states)))
    logger.debug(f"Simulated {len(times) - 1} steps of {dt} s with {method.name}.")
    return SimTrace(t=np.asarray(times), states=stacked)
