# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Geometric PD tracking controller.
The desired attitude points the body z axis along the commanded force with zero yaw.
The desired body rate comes from central differences of the desired attitude.
"""

from collections.abc import Callable
from typing import Optional

import numpy as np

from ..trajectory.basic_types import RefPoint
from .basic_types import Gains, QuadParams, QuadState, StateError, Wrench
from .so3 import skew_part, vee

RefFn = Callable[[float], RefPoint]
THRUST_TOL = 1e-6
FD_STEP = 1e-3
E1 = np.array([1.0, 0.0, 0.0])


def thrust_vector(acc_des: np.ndarray, e_x: np.ndarray, e_v: np.ndarray, gains: Gains, p: QuadParams) -> np.ndarray:
    t_des = -gains.gx * e_x - gains.gv * e_v + p.mass * np.asarray(acc_des)
    t_des[..., 2] += p.mass * p.gravity
    return t_des


def attitude_from_thrust(t_des: np.ndarray, prev: Optional[np.ndarray] = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Return the zero-yaw attitude whose third column points along t_des,
    and a mask of degenerate inputs where the previous attitude is held.
    """
    norm = np.linalg.norm(t_des, axis=-1, keepdims=True)
    b3 = t_des / np.where(norm > THRUST_TOL, norm, 1.0)
    b2 = np.cross(b3, E1)
    b2_norm = np.linalg.norm(b2, axis=-1, keepdims=True)
    degenerate = (norm[..., 0] <= THRUST_TOL) | (b2_norm[..., 0] <= THRUST_TOL)
    b2 = b2 / np.where(b2_norm > THRUST_TOL, b2_norm, 1.0)
    b1 = np.cross(b2, b3)
    R_des = np.stack([b1, b2, b3], axis=-1)
    if np.any(degenerate):
        held = np.broadcast_to(np.eye(3) if prev is None else prev, R_des.shape)
        R_des = np.where(degenerate[..., None, None], held, R_des)
    return R_des, degenerate


def attitude_error(R: np.ndarray, R_des: np.ndarray) -> np.ndarray:
    M = np.swapaxes(R_des, -1, -2) @ R - np.swapaxes(R, -1, -2) @ R_des
    return 0.5 * vee(M, check=False)


def desired_attitude(
    ref: RefPoint,
    e_x: np.ndarray,
    e_v: np.ndarray,
    gains: Gains,
    p: QuadParams,
    acc_neighbors: Optional[tuple[np.ndarray, np.ndarray]] = None,
    prev: Optional[np.ndarray] = None,
    h: float = FD_STEP,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Return (R_des, omega_des).
    acc_neighbors holds the desired acceleration at t - h and t + h;
    without it omega_des is zero.
    """
    R_des, _ = attitude_from_thrust(thrust_vector(ref.acc, e_x, e_v, gains, p), prev)
    if acc_neighbors is None:
        return R_des, np.zeros(R_des.shape[:-2] + (3,))
    acc_minus, acc_plus = acc_neighbors
    R_minus, _ = attitude_from_thrust(thrust_vector(acc_minus, e_x, e_v, gains, p), R_des)
    R_plus, _ = attitude_from_thrust(thrust_vector(acc_plus, e_x, e_v, gains, p), R_des)
    R_dot = (R_plus - R_minus) / (2.0 * h)
    omega_des = vee(skew_part(np.swapaxes(R_des, -1, -2) @ R_dot), check=False)
    return R_des, omega_des


def state_error(s: QuadState, ref: RefPoint, R_des: np.ndarray, omega_des: np.ndarray) -> StateError:
    return StateError(
        e_x=s.x - ref.pos,
        e_v=s.v - ref.vel,
        e_R=attitude_error(s.R, R_des),
        e_omega=s.omega - omega_des,
    )


def control(
    s: QuadState,
    ref: RefPoint,
    gains: Gains,
    p: QuadParams,
    acc_neighbors: Optional[tuple[np.ndarray, np.ndarray]] = None,
    prev: Optional[np.ndarray] = None,
) -> tuple[Wrench, np.ndarray]:
    """Return the unsaturated wrench and the desired attitude that produced it."""
    e_x, e_v = s.x - ref.pos, s.v - ref.vel
    R_des, omega_des = desired_attitude(ref, e_x, e_v, gains, p, acc_neighbors, prev)
    err = state_error(s, ref, R_des, omega_des)
    tau = np.linalg.norm(thrust_vector(ref.acc, err.e_x, err.e_v, gains, p), axis=-1)
    mu = -gains.gw * err.e_omega - gains.gr * err.e_R
    return Wrench(tau=tau, mu=mu), R_des


class Controller:
    """
    Tracks a reference given as a function of time.
    Remembers the last desired attitude to hold it through the thrust singularity.
    """

    def __init__(self, ref_fn: RefFn, gains: Gains, p: QuadParams, h: float = FD_STEP) -> None:
        self._ref_fn = ref_fn
        self._gains = gains
        self._params = p
        self._h = h
        self._prev_R_des: Optional[np.ndarray] = None

    def __call__(self, t: float, s: QuadState) -> Wrench:
        ref = self._ref_fn(t)
        neighbors = (self._ref_fn(t - self._h).acc, self._ref_fn(t + self._h).acc)
        u, self._prev_R_des = control(s, ref, self._gains, self._params, neighbors, self._prev_R_des)
        return u
