# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Desired trajectories of one axis.

The first segment starts at (kappa_v, kappa_a) and reaches kappa_pk with zero acceleration at t_pk.
The second segment brakes from kappa_pk to rest at t_fin.
Each segment is a cubic in velocity, evaluated in its own local time.
Every output is linear in (kappa_v, kappa_a, kappa_pk), so it is computed as
a polynomial basis dotted with the parameter.
"""

import functools
from typing import Union

import numpy as np
from numpy.polynomial import polynomial as P

from .basic_types import (
    RefPoint,
    Segment,
    SpeedLimits,
    TrajectoryError,
    TrajParam,
    TrajParam1D,
    TrajTiming,
)

ArrayOrFloat = Union[float, np.ndarray]
TIME_TOL = 1e-12
UNIT_PARAMS = (TrajParam1D(1.0, 0.0, 0.0), TrajParam1D(0.0, 1.0, 0.0), TrajParam1D(0.0, 0.0, 1.0))


def segment_duration(segment: Segment, timing: TrajTiming) -> float:
    return timing.t_pk if segment == Segment.first else timing.t_brake


def _segment_start(kappa: TrajParam1D, segment: Segment) -> tuple[float, float]:
    """Velocity and acceleration at the start of the segment."""
    if segment == Segment.first:
        return kappa.kappa_v, kappa.kappa_a
    return kappa.kappa_pk, 0.0


def segment_coeffs(kappa: TrajParam1D, segment: Segment, timing: TrajTiming) -> tuple[float, float]:
    """
    Return (c1, c2) such that the segment velocity is
    c1 tau^3 / 6 + c2 tau^2 / 2 + a0 tau + v0 in segment-local time tau.
    """
    duration = segment_duration(segment, timing)
    v0, a0 = _segment_start(kappa, segment)
    target = kappa.kappa_pk if segment == Segment.first else 0.0
    delta_v = target - v0 - a0 * duration
    delta_a = -a0
    c1 = (-12.0 * delta_v + 6.0 * duration * delta_a) / duration**3
    c2 = (6.0 * duration * delta_v - 2.0 * duration**2 * delta_a) / duration**3
    return c1, c2


def _velocity_poly(kappa: TrajParam1D, segment: Segment, timing: TrajTiming) -> np.ndarray:
    c1, c2 = segment_coeffs(kappa, segment, timing)
    v0, a0 = _segment_start(kappa, segment)
    return np.array([v0, a0, c2 / 2.0, c1 / 6.0])


@functools.cache
def basis_polys(timing: TrajTiming, order: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Polynomial basis of the derivative of the given order (0 is position), one per segment.
    Each array has shape (3, n_coeffs): rows belong to kappa_v, kappa_a and kappa_pk,
    coefficients are in ascending powers of segment-local time.
    """
    if order == 0:
        first_vel, _ = basis_polys(timing, 1)
        first = np.array([P.polyint(row) for row in first_vel])
        end_of_first = P.polyval(timing.t_pk, first.T)
        second_vel = np.array([_velocity_poly(unit, Segment.second, timing) for unit in UNIT_PARAMS])
        second = np.array([P.polyint(row, k=end) for row, end in zip(second_vel, end_of_first)])
    elif order == 1:
        first = np.array([_velocity_poly(unit, Segment.first, timing) for unit in UNIT_PARAMS])
        second = np.array([_velocity_poly(unit, Segment.second, timing) for unit in UNIT_PARAMS])
    elif order > 1:
        first_prev, second_prev = basis_polys(timing, order - 1)
        first = np.array([P.polyder(row) for row in first_prev])
        second = np.array([P.polyder(row) for row in second_prev])
    else:
        raise TrajectoryError(f"derivative order must be non-negative, got {order}")
    first.setflags(write=False)
    second.setflags(write=False)
    return first, second


def local_time(t: ArrayOrFloat, timing: TrajTiming) -> tuple[np.ndarray, np.ndarray]:
    """Return a mask of samples in the second segment and the segment-local time of every sample."""
    t = np.asarray(t, dtype=float)
    if np.any(t < -TIME_TOL) or np.any(t > timing.t_fin + TIME_TOL) or not np.all(np.isfinite(t)):
        raise TrajectoryError(f"time must lie in [0, {timing.t_fin}], got {t}")
    t = np.clip(t, 0.0, timing.t_fin)
    second = t >= timing.t_pk
    return second, np.where(second, t - timing.t_pk, t)


def basis(t: ArrayOrFloat, timing: TrajTiming, order: int = 0) -> np.ndarray:
    """Basis values with shape t.shape + (3,)."""
    second, tau = local_time(t, timing)
    first_polys, second_polys = basis_polys(timing, order)
    first_vals = np.stack([P.polyval(tau, row) for row in first_polys], axis=-1)
    second_vals = np.stack([P.polyval(tau, row) for row in second_polys], axis=-1)
    return np.where(second[..., None], second_vals, first_vals)


def affine_pos_coeffs(t: ArrayOrFloat, timing: TrajTiming) -> np.ndarray:
    """(a_v, a_a, a_pk) with pos_1d(t) = a_v kappa_v + a_a kappa_a + a_pk kappa_pk."""
    return basis(t, timing, order=0)


def pos_1d(t: ArrayOrFloat, kappa: TrajParam1D, timing: TrajTiming) -> ArrayOrFloat:
    return basis(t, timing, order=0) @ kappa.as_array()


def vel_1d(t: ArrayOrFloat, kappa: TrajParam1D, timing: TrajTiming) -> ArrayOrFloat:
    return basis(t, timing, order=1) @ kappa.as_array()


def acc_1d(t: ArrayOrFloat, kappa: TrajParam1D, timing: TrajTiming) -> ArrayOrFloat:
    return basis(t, timing, order=2) @ kappa.as_array()


def _combine(b: np.ndarray, k_v: np.ndarray, k_a: np.ndarray, k_pk: np.ndarray) -> np.ndarray:
    return b[..., 0, None] * k_v + b[..., 1, None] * k_a + b[..., 2, None] * k_pk


def ref_arrays(t: ArrayOrFloat, k_v: np.ndarray, k_a: np.ndarray, k_pk: np.ndarray, timing: TrajTiming) -> RefPoint:
    """
    Reference of many trajectories at once.
    Either t is a scalar and the parameters have shape (..., 3),
    or the parameters are 3-vectors and t has any shape.
    """
    k_v, k_a, k_pk = (np.asarray(k, dtype=float) for k in (k_v, k_a, k_pk))
    return RefPoint(*(_combine(basis(t, timing, order), k_v, k_a, k_pk) for order in (0, 1, 2)))


def ref_point(t: ArrayOrFloat, k: TrajParam, timing: TrajTiming) -> RefPoint:
    return ref_arrays(t, k.k_v, k.k_a, k.k_pk, timing)


def feasible_mask(k_v: np.ndarray, k_pk: np.ndarray, timing: TrajTiming, limits: SpeedLimits, tol: float = 1e-9):
    """Peak-velocity speed and average-acceleration constraints, vectorized over leading dims."""
    speed_ok = np.linalg.norm(k_pk, axis=-1) <= limits.v_max + tol
    accel_ok = np.linalg.norm(np.asarray(k_pk) - np.asarray(k_v), axis=-1) / timing.t_pk <= limits.a_max + tol
    return speed_ok & accel_ok


def is_feasible(k: TrajParam, timing: TrajTiming, limits: SpeedLimits = SpeedLimits(), tol: float = 1e-9) -> bool:
    return bool(feasible_mask(k.k_v, k.k_pk, timing, limits, tol))


def min_sensing_distance(timing: TrajTiming, v_max: float) -> float:
    """
    Smallest sensor horizon that covers every plan.
    A straight line at v_max: cruise until t_pk, then brake over half of the remaining time.
    """
    braking = v_max * timing.t_brake / 2.0
    longest_plan = v_max * timing.t_pk + braking
    return max(braking + v_max * timing.t_plan, longest_plan)
