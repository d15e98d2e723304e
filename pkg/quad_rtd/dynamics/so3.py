# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import numpy as np

from .basic_types import DynamicsError

SKEW_TOL = 1e-9
ORTHO_TOL = 1e-9
SMALL_ANGLE = 1e-6


def hat(v: np.ndarray) -> np.ndarray:
    """Skew-symmetric matrix of a (batch of) 3-vector(s), so that hat(v) @ w == cross(v, w)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1], out[..., 0, 2] = -v[..., 2], v[..., 1]
    out[..., 1, 0], out[..., 1, 2] = v[..., 2], -v[..., 0]
    out[..., 2, 0], out[..., 2, 1] = -v[..., 1], v[..., 0]
    return out


def vee(M: np.ndarray, check: bool = True) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if check and np.max(np.abs(M + np.swapaxes(M, -1, -2)), initial=0.0) > SKEW_TOL:
        raise DynamicsError("vee map applied to a matrix that is not skew-symmetric")
    return np.stack([M[..., 2, 1], M[..., 0, 2], M[..., 1, 0]], axis=-1)


def skew_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M - np.swapaxes(M, -1, -2))


def expm_so3(w: np.ndarray) -> np.ndarray:
    """Rodrigues formula for exp(hat(w)), batched."""
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w, axis=-1)[..., None, None]
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
    W = hat(w)
    return np.eye(3) + a * W + b * (W @ W)


def dexpinv_so3(u: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Inverse derivative of the exponential, truncated after the third term (enough for fourth order)."""
    cross_ua = np.cross(u, a)
    return a - 0.5 * cross_ua + np.cross(u, cross_ua) / 12.0


def orthonormality_error(R: np.ndarray) -> np.ndarray:
    gram = np.swapaxes(R, -1, -2) @ R
    return np.max(np.abs(gram - np.eye(3)), axis=(-2, -1))


def reorthonormalize(R: np.ndarray, tol: float = ORTHO_TOL) -> np.ndarray:
    """Polar projection onto SO(3) of every matrix that drifted by more than tol."""
    drifted = orthonormality_error(R) > tol
    if not np.any(drifted):
        return R
    U, _, Vt = np.linalg.svd(R[drifted])
    R = R.copy()
    R[drifted] = U @ Vt
    return R
