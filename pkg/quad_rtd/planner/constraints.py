# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import numpy as np

from .basic_types import ConstraintSet, UnsafeBoxSet

BLOCK_A = np.vstack([np.eye(3), -np.eye(3)])
BLOCK_A.setflags(write=False)


def generate_constraints(unsafe: UnsafeBoxSet) -> ConstraintSet:
    """
    One block per box: A k + b = [k - lo; hi - k].
    Every entry is non-negative exactly when k lies in the closed box.
    """
    n = len(unsafe)
    A = np.tile(BLOCK_A, (n, 1))
    b = np.concatenate([-unsafe.lo, unsafe.hi], axis=1).reshape(6 * n)
    return ConstraintSet(A=A, b=b)


def block_minima(k_pk, constraints: ConstraintSet) -> np.ndarray:
    """min(A_j k + b_j) of every block, with shape k.shape[:-1] + (n_blocks,)."""
    k = np.asarray(k_pk, dtype=float)
    values = k @ constraints.A.T + constraints.b
    return values.reshape(*k.shape[:-1], constraints.n_blocks, 6).min(axis=-1)


def safe_mask(k_pk, constraints: ConstraintSet) -> np.ndarray:
    """Outside every unsafe box, vectorized over leading dims."""
    if constraints.n_blocks == 0:
        return np.ones(np.asarray(k_pk).shape[:-1], dtype=bool)
    return np.all(block_minima(k_pk, constraints) < 0.0, axis=-1)


def is_safe(k_pk, constraints: ConstraintSet) -> bool:
    return bool(safe_mask(np.asarray(k_pk, dtype=float).reshape(3), constraints))
