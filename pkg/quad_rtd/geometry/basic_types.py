# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
from collections.abc import Sequence
from typing import Any, NamedTuple

import numpy as np


@dataclasses.dataclass
class GeometryError(ValueError):
    explanation: str

    def __str__(self) -> str:
        return self.explanation


def _frozen_array(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise GeometryError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


class Interval(NamedTuple):
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __add__(self, other: "Interval") -> "Interval":  # type: ignore[override]
        return Interval(self.lo + other.lo, self.hi + other.hi)


@dataclasses.dataclass(frozen=True, eq=False)
class Box3:
    """
    Closed axis-aligned box given by its center and half-extents.
    Used for obstacles, the robot body, velocity cells and error boxes.
    """

    center: np.ndarray
    half_extents: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", _frozen_array(self.center, 1))
        object.__setattr__(self, "half_extents", _frozen_array(self.half_extents, 1))
        if self.center.shape != (3,) or self.half_extents.shape != (3,):
            raise GeometryError("box center and half-extents must be 3-vectors")
        if np.any(self.half_extents < 0) or not np.all(np.isfinite(self.half_extents)):
            raise GeometryError(f"half-extents must be finite and non-negative: {self.half_extents}")

    @classmethod
    def from_bounds(cls, lo: Sequence[float], hi: Sequence[float]) -> "Box3":
        lo_arr, hi_arr = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        if np.any(hi_arr < lo_arr):
            raise GeometryError(f"lower bound exceeds upper bound: {lo_arr} > {hi_arr}")
        return cls(center=0.5 * (lo_arr + hi_arr), half_extents=0.5 * (hi_arr - lo_arr))

    @classmethod
    def cube(cls, center: Sequence[float], side: float) -> "Box3":
        return cls(center=center, half_extents=np.full(3, 0.5 * side))

    @property
    def lo(self) -> np.ndarray:
        return self.center - self.half_extents

    @property
    def hi(self) -> np.ndarray:
        return self.center + self.half_extents

    def axis(self, i: int) -> Interval:
        return Interval(float(self.lo[i]), float(self.hi[i]))

    def contains(self, point: Sequence[float], tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(np.asarray(point, dtype=float) - self.center) <= self.half_extents + tol))

    def intersects(self, other: "Box3") -> bool:
        """Closed boxes, so touching faces count as an intersection."""
        return bool(np.all(np.abs(self.center - other.center) <= self.half_extents + other.half_extents))

    def translated(self, offset: Sequence[float]) -> "Box3":
        return Box3(center=self.center + np.asarray(offset, dtype=float), half_extents=self.half_extents)

    def inflated(self, amount: Sequence[float]) -> "Box3":
        return Box3(center=self.center, half_extents=self.half_extents + np.asarray(amount, dtype=float))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Box3):
            return NotImplemented
        return np.array_equal(self.center, other.center) and np.array_equal(self.half_extents, other.half_extents)

    def __repr__(self) -> str:
        return f"Box3(center={self.center.tolist()}, half_extents={self.half_extents.tolist()})"

    def to_json(self) -> dict[str, Any]:
        return {"center": self.center.tolist(), "half_extents": self.half_extents.tolist()}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Box3":
        return cls(center=data["center"], half_extents=data["half_extents"])


@dataclasses.dataclass(frozen=True, eq=False)
class Zonotope:
    """
    The set {c + G b : b in [-1, 1]^p}.
    Each row carries a label, e.g. "x2" for the position along the second axis
    or "kpk2" for the peak velocity parameter of the same axis.
    """

    center: np.ndarray
    generators: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        center = _frozen_array(self.center, 1)
        generators = np.array(self.generators, dtype=float)
        if generators.size == 0:
            generators = np.zeros((len(center), 0))
        if generators.ndim != 2 or generators.shape[0] != len(center):
            raise GeometryError(f"generator matrix of shape {generators.shape} does not match dimension {len(center)}")
        generators.setflags(write=False)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "generators", generators)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(center):
            raise GeometryError(f"{len(self.labels)} labels given for a {len(center)}-dimensional zonotope")
        if len(set(self.labels)) != len(self.labels):
            raise GeometryError(f"duplicate row labels: {self.labels}")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def n_generators(self) -> int:
        return self.generators.shape[1]

    def row(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise GeometryError(f"no row labeled '{label}' in {self.labels}") from None

    def point(self, beta: Sequence[float]) -> np.ndarray:
        """Map coefficients in [-1, 1]^p to a point of the set."""
        return self.center + self.generators @ np.asarray(beta, dtype=float)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Zonotope):
            return NotImplemented
        return (
            self.labels == other.labels
            and np.array_equal(self.center, other.center)
            and np.array_equal(self.generators, other.generators)
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "center": self.center.tolist(),
            "generators": self.generators.tolist(),
            "labels": list(self.labels),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Zonotope":
        return cls(center=data["center"], generators=data["generators"], labels=tuple(data["labels"]))
