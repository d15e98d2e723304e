# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
import enum
from collections.abc import Sequence
from typing import NamedTuple, Optional

import numpy as np


@dataclasses.dataclass
class TrajectoryError(ValueError):
    explanation: str

    def __str__(self) -> str:
        return self.explanation


@enum.unique
class Segment(enum.Enum):
    first = 0  # from the initial velocity to the peak velocity
    second = 1  # from the peak velocity to rest

    @classmethod
    def at(cls, t: float, t_pk: float) -> "Segment":
        return cls.first if t < t_pk else cls.second


class TrajTiming(NamedTuple):
    t_plan: float = 0.75
    t_pk: float = 1.0
    t_fin: float = 3.0

    @property
    def t_brake(self) -> float:
        return self.t_fin - self.t_pk

    def check(self) -> "TrajTiming":
        if not 0 < self.t_plan <= self.t_pk < self.t_fin:
            raise TrajectoryError(f"timing must satisfy 0 < t_plan <= t_pk < t_fin, got {tuple(self)}")
        return self


class ParamBounds(NamedTuple):
    """Symmetric bounds of each trajectory parameter."""

    kv: float = 5.0
    ka: float = 10.0
    kpk: float = 5.0

    def as_array(self) -> np.ndarray:
        return np.array([self.kv, self.ka, self.kpk])


class SpeedLimits(NamedTuple):
    v_max: float = 5.0
    a_max: float = 3.0


@dataclasses.dataclass(frozen=True)
class TrajParam1D:
    kappa_v: float
    kappa_a: float
    kappa_pk: float

    def as_array(self) -> np.ndarray:
        return np.array([self.kappa_v, self.kappa_a, self.kappa_pk], dtype=float)

    def within(self, bounds: ParamBounds) -> bool:
        return bool(np.all(np.abs(self.as_array()) <= bounds.as_array()))


@dataclasses.dataclass(frozen=True, eq=False)
class TrajParam:
    """
    Trajectory parameter of all three axes.
    Stored as three 3-vectors: initial velocity, initial acceleration and peak velocity.
    Values are checked against the parameter box unless bounds is None.
    """

    k_v: np.ndarray
    k_a: np.ndarray
    k_pk: np.ndarray
    bounds: dataclasses.InitVar[Optional[ParamBounds]] = ParamBounds()

    def __post_init__(self, bounds: Optional[ParamBounds]) -> None:
        for name in ("k_v", "k_a", "k_pk"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)):
                raise TrajectoryError(f"{name} must be a finite 3-vector, got {arr}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if bounds is not None and not self.within(bounds):
            raise TrajectoryError(f"{self!r} lies outside the parameter box {tuple(bounds)}")

    @classmethod
    def from_state(cls, k_v, k_a, k_pk) -> "TrajParam":
        """Parameter of a plan starting at a measured or predicted state, which may lie outside the box."""
        return cls(k_v, k_a, k_pk, bounds=None)

    @classmethod
    def zero(cls) -> "TrajParam":
        return cls(np.zeros(3), np.zeros(3), np.zeros(3))

    @classmethod
    def from_axes(cls, axes: Sequence[TrajParam1D]) -> "TrajParam":
        arr = np.array([kappa.as_array() for kappa in axes])
        return cls(k_v=arr[:, 0], k_a=arr[:, 1], k_pk=arr[:, 2])

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "TrajParam":
        """Inverse of as_array()."""
        arr = np.asarray(values, dtype=float).reshape(3, 3)
        return cls(k_v=arr[:, 0], k_a=arr[:, 1], k_pk=arr[:, 2])

    def axis(self, i: int) -> TrajParam1D:
        return TrajParam1D(float(self.k_v[i]), float(self.k_a[i]), float(self.k_pk[i]))

    def as_array(self) -> np.ndarray:
        """9 values ordered (kappa_v, kappa_a, kappa_pk) per axis."""
        return np.column_stack([self.k_v, self.k_a, self.k_pk]).ravel()

    def within(self, bounds: ParamBounds) -> bool:
        return all(self.axis(i).within(bounds) for i in range(3))

    def __neg__(self) -> "TrajParam":
        return TrajParam(-self.k_v, -self.k_a, -self.k_pk, bounds=None)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrajParam):
            return NotImplemented
        return np.array_equal(self.as_array(), other.as_array())

    def __repr__(self) -> str:
        return f"TrajParam(k_v={self.k_v.tolist()}, k_a={self.k_a.tolist()}, k_pk={self.k_pk.tolist()})"


class RefPoint(NamedTuple):
    """Desired position, velocity and acceleration. Arrays may carry leading batch dimensions."""

    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray

    @classmethod
    def rest(cls, pos=(0.0, 0.0, 0.0)) -> "RefPoint":
        return cls(np.asarray(pos, dtype=float), np.zeros(3), np.zeros(3))

    def shifted(self, offset) -> "RefPoint":
        return RefPoint(self.pos + np.asarray(offset, dtype=float), self.vel, self.acc)
