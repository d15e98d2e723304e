# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""Map between the commanded wrench and rotor speeds, with rotor speed saturation."""

import functools

import numpy as np

from .basic_types import QuadParams, Wrench


@functools.cache
def mixer(p: QuadParams) -> np.ndarray:
    """Maps squared rotor speeds (rpm^2) to (thrust, moment x, moment y, moment z)."""
    kt, km, arm = p.k_tau, p.k_mu, p.k_tau * p.arm_length
    mat = np.array(
        [
            [kt, kt, kt, kt],
            [0.0, arm, 0.0, -arm],
            [-arm, 0.0, arm, 0.0],
            [km, -km, km, -km],
        ]
    )
    mat.setflags(write=False)
    return mat


@functools.cache
def mixer_inv(p: QuadParams) -> np.ndarray:
    inv = np.linalg.inv(mixer(p))
    inv.setflags(write=False)
    return inv


def _stack(u: Wrench) -> np.ndarray:
    tau = np.asarray(u.tau, dtype=float)
    return np.concatenate([tau[..., None], np.asarray(u.mu, dtype=float)], axis=-1)


def squared_speeds(u: Wrench, p: QuadParams) -> np.ndarray:
    """Unclamped squared rotor speeds, may be negative."""
    return np.einsum("ij,...j->...i", mixer_inv(p), _stack(u))


def wrench_to_rotors(u: Wrench, p: QuadParams) -> np.ndarray:
    """Rotor speeds in rpm, clamped to [rotor_min, rotor_max]."""
    sq = np.clip(squared_speeds(u, p), p.rotor_min**2, p.rotor_max**2)
    return np.sqrt(sq)


def rotors_to_wrench(speeds: np.ndarray, p: QuadParams) -> Wrench:
    out = np.einsum("ij,...j->...i", mixer(p), np.square(speeds))
    return Wrench(tau=out[..., 0], mu=out[..., 1:])


def saturate(u: Wrench, p: QuadParams) -> Wrench:
    return rotors_to_wrench(wrench_to_rotors(u, p), p)


def is_saturated(u: Wrench, p: QuadParams) -> np.ndarray:
    sq = squared_speeds(u, p)
    return np.any((sq < p.rotor_min**2) | (sq > p.rotor_max**2), axis=-1)
