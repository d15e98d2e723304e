# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Unsafe peak velocities of one reachable step and one obstacle.

With k_v and k_a fixed, the position along axis i is c + gxpk b_pk + eps b_eps.
It can touch [o_lo, o_hi] iff c + gxpk b_pk lies in [o_lo - eps, o_hi + eps],
which bounds b_pk to an interval on each axis independently. Their product, mapped
through the peak-velocity generator, is the unsafe box.
"""

from collections.abc import Sequence
from typing import Optional

import numpy as np

from ..frs.basic_types import FrsArrays, TimedZonotope, stack_coefficients
from ..geometry.basic_types import Box3
from .augment import slice_centers
from .basic_types import Obstacle, UnsafeBoxSet

DEGENERATE_TOL = 1e-9


def _obstacle_bounds(obstacles: Sequence[Obstacle]) -> tuple[np.ndarray, np.ndarray]:
    if not obstacles:
        return np.zeros((0, 3)), np.zeros((0, 3))
    return np.array([o.lo for o in obstacles]), np.array([o.hi for o in obstacles])


def unsafe_coefficients(arrays: FrsArrays, obs_lo: np.ndarray, obs_hi: np.ndarray, k_v, k_a):
    """
    Interval of b_pk per (step, obstacle, axis) that reaches the obstacle.
    Returns (beta_lo, beta_hi, hit) with beta arrays of shape (n_steps, n_obstacles, 3)
    and hit of shape (n_steps, n_obstacles).
    """
    centers = slice_centers(arrays, k_v, k_a)[:, None, :]
    eps = arrays.eps[:, None, :]
    g = arrays.gxpk[:, None, :]
    lower = obs_lo[None, :, :] - eps - centers
    upper = obs_hi[None, :, :] + eps - centers

    degenerate = np.abs(g) < DEGENERATE_TOL
    safe_g = np.where(degenerate, 1.0, g)
    b1, b2 = lower / safe_g, upper / safe_g
    beta_minus, beta_plus = np.minimum(b1, b2), np.maximum(b1, b2)

    # A vanishing generator leaves an interval of width 2|g| around the center.
    # The axis is fully unsafe if the inflated obstacle touches that interval, otherwise safe.
    reach = np.abs(g)
    touches = (lower <= reach) & (upper >= -reach)
    beta_minus = np.where(degenerate, np.where(touches, -1.0, np.inf), beta_minus)
    beta_plus = np.where(degenerate, np.where(touches, 1.0, -np.inf), beta_plus)

    beta_lo = np.maximum(beta_minus, -1.0)
    beta_hi = np.minimum(beta_plus, 1.0)
    hit = np.all(beta_lo <= beta_hi, axis=-1)
    return beta_lo, beta_hi, hit


def intersect_all(arrays: FrsArrays, obstacles: Sequence[Obstacle], k_v, k_a) -> UnsafeBoxSet:
    """Unsafe boxes of every (step, obstacle) pair, in step-major order."""
    obs_lo, obs_hi = _obstacle_bounds(obstacles)
    if arrays.n_steps == 0 or len(obs_lo) == 0:
        return UnsafeBoxSet.empty()
    beta_lo, beta_hi, hit = unsafe_coefficients(arrays, obs_lo, obs_hi, k_v, k_a)
    step_idx, obs_idx = np.nonzero(hit)
    c_pk, g_pk = arrays.c_pk[step_idx], arrays.g_pk[step_idx]
    k_lo = c_pk + g_pk * beta_lo[step_idx, obs_idx]
    k_hi = c_pk + g_pk * beta_hi[step_idx, obs_idx]
    return UnsafeBoxSet(
        lo=np.minimum(k_lo, k_hi),
        hi=np.maximum(k_lo, k_hi),
        step_idx=step_idx,
        obs_idx=obs_idx,
    )


def intersect_obs(zeps: TimedZonotope, o: Obstacle, k_v, k_a) -> Optional[Box3]:
    """Unsafe peak velocities of a single augmented step and obstacle, or None if it can't be reached."""
    unsafe = intersect_all(stack_coefficients([zeps]), [o], k_v, k_a)
    if len(unsafe) == 0:
        return None
    return Box3.from_bounds(unsafe.lo[0], unsafe.hi[0])
