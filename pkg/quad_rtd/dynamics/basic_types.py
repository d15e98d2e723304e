# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
import functools
from typing import NamedTuple

import numpy as np

from ..helpers.consts import GRAVITY


@dataclasses.dataclass
class SimulationDiverged(RuntimeError):
    explanation: str
    time: float
    step: int

    def __str__(self) -> str:
        return f"simulation diverged at t={self.time:.3f} s (step {self.step}): {self.explanation}"


@dataclasses.dataclass
class DynamicsError(ValueError):
    explanation: str

    def __str__(self) -> str:
        return self.explanation


class QuadState(NamedTuple):
    """
    Position, velocity, body angular rate and attitude.
    All fields may carry the same leading batch dimensions.
    """

    x: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    R: np.ndarray

    @classmethod
    def at_rest(cls, x=(0.0, 0.0, 0.0), v=(0.0, 0.0, 0.0)) -> "QuadState":
        """Level attitude, no rotation. Batched when x or v are."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        batch = np.broadcast_shapes(x.shape, v.shape)[:-1]
        return cls(
            x=np.broadcast_to(x, batch + (3,)).copy(),
            v=np.broadcast_to(v, batch + (3,)).copy(),
            omega=np.zeros(batch + (3,)),
            R=np.broadcast_to(np.eye(3), batch + (3, 3)).copy(),
        )

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.x.shape[:-1]

    def is_finite(self) -> np.ndarray:
        return np.all(np.isfinite(self.x), axis=-1) & np.all(np.isfinite(self.v), axis=-1) & np.all(
            np.isfinite(self.R), axis=(-2, -1)
        ) & np.all(np.isfinite(self.omega), axis=-1)

    def take(self, index) -> "QuadState":
        return QuadState(*(field[index] for field in self))


class StateDerivative(NamedTuple):
    x_dot: np.ndarray
    v_dot: np.ndarray
    omega_dot: np.ndarray
    R_dot: np.ndarray


class Wrench(NamedTuple):
    """Net thrust (N) and body moment (N m)."""

    tau: np.ndarray
    mu: np.ndarray


@dataclasses.dataclass(frozen=True)
class QuadParams:
    mass: float = 0.547
    inertia: tuple[float, float, float] = (0.0033, 0.0033, 0.0058)
    k_tau: float = 1.5e-07
    k_mu: float = 3.75e-09
    arm_length: float = 0.27
    rotor_min: float = 1100.0
    rotor_max: float = 8600.0
    gravity: float = GRAVITY

    def __post_init__(self) -> None:
        positive = (self.mass, *self.inertia, self.k_tau, self.k_mu, self.arm_length, self.rotor_min, self.gravity)
        if min(positive) <= 0:
            raise DynamicsError(f"robot parameters must be positive: {self}")
        if self.rotor_min >= self.rotor_max:
            raise DynamicsError(f"rotor_min ({self.rotor_min}) must be below rotor_max ({self.rotor_max})")

    @functools.cached_property
    def J(self) -> np.ndarray:
        return np.diag(self.inertia)

    @functools.cached_property
    def J_inv(self) -> np.ndarray:
        return np.diag(1.0 / np.asarray(self.inertia))

    @property
    def hover_thrust(self) -> float:
        return self.mass * self.gravity

    @property
    def max_thrust(self) -> float:
        return 4.0 * self.k_tau * self.rotor_max**2


@dataclasses.dataclass(frozen=True, eq=False)
class Gains:
    """Diagonals of the position, velocity, attitude and angular rate gain matrices."""

    gx: np.ndarray
    gv: np.ndarray
    gr: np.ndarray
    gw: np.ndarray

    def __post_init__(self) -> None:
        for name in ("gx", "gv", "gr", "gw"):
            diag = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (3,)).copy()
            if np.any(diag <= 0):
                raise DynamicsError(f"gain {name} must be positive, got {diag}")
            diag.setflags(write=False)
            object.__setattr__(self, name, diag)

    @classmethod
    def scalar(cls, gx: float = 2.0, gv: float = 0.5, gr: float = 1.0, gw: float = 0.03) -> "Gains":
        return cls(gx=np.full(3, gx), gv=np.full(3, gv), gr=np.full(3, gr), gw=np.full(3, gw))

    @property
    def G_x(self) -> np.ndarray:
        return np.diag(self.gx)

    @property
    def G_v(self) -> np.ndarray:
        return np.diag(self.gv)

    @property
    def G_R(self) -> np.ndarray:
        return np.diag(self.gr)

    @property
    def G_omega(self) -> np.ndarray:
        return np.diag(self.gw)


class StateError(NamedTuple):
    e_x: np.ndarray
    e_v: np.ndarray
    e_R: np.ndarray
    e_omega: np.ndarray
