# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
from typing import Any, NamedTuple, Optional

import numpy as np

from ..geometry.basic_types import Box3
from ..trajectory.basic_types import RefPoint, TrajParam, TrajTiming
from ..trajectory.spline import ref_point

# Obstacles are static closed boxes.
Obstacle = Box3


@dataclasses.dataclass
class PlannerError(ValueError):
    """Inputs that can't be planned with at all. Failures to find a plan are not errors."""

    explanation: str

    def __str__(self) -> str:
        return self.explanation


class InitialCondition(NamedTuple):
    """Predicted velocity and acceleration at the start of the next plan, and its world-frame anchor."""

    k_v: np.ndarray
    k_a: np.ndarray
    x0: np.ndarray


class UnsafeBoxSet(NamedTuple):
    """Boxes of peak velocities that may lead into an obstacle, one per (FRS step, obstacle) pair."""

    lo: np.ndarray  # (n, 3)
    hi: np.ndarray  # (n, 3)
    step_idx: np.ndarray  # (n,)
    obs_idx: np.ndarray  # (n,)

    @classmethod
    def empty(cls) -> "UnsafeBoxSet":
        return cls(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0, dtype=int), np.zeros(0, dtype=int))

    def __len__(self) -> int:
        return len(self.lo)

    def boxes(self) -> list[Box3]:
        return [Box3.from_bounds(lo, hi) for lo, hi in zip(self.lo, self.hi)]

    def contains(self, k_pk, tol: float = 0.0) -> np.ndarray:
        """Membership of each point in the union of the boxes grown by tol, vectorized over leading dims."""
        k = np.asarray(k_pk, dtype=float)[..., None, :]
        inside = np.all((k >= self.lo - tol) & (k <= self.hi + tol), axis=-1)
        return np.any(inside, axis=-1)


class ConstraintSet(NamedTuple):
    """
    Stacked 6-row blocks, one per unsafe box.
    A point is inside box j iff min(A_j k + b_j) >= 0.
    """

    A: np.ndarray  # (6n, 3)
    b: np.ndarray  # (6n,)

    @property
    def n_blocks(self) -> int:
        return len(self.b) // 6


@dataclasses.dataclass(frozen=True, eq=False)
class Plan:
    """A trajectory parameter anchored at a world position, created at a given simulated time."""

    k: TrajParam
    timing: TrajTiming
    x0: np.ndarray
    created_at: float = 0.0

    def __post_init__(self) -> None:
        x0 = np.array(self.x0, dtype=float)
        x0.setflags(write=False)
        object.__setattr__(self, "x0", x0)

    @classmethod
    def hover(cls, x, timing: TrajTiming, created_at: float = 0.0) -> "Plan":
        return cls(TrajParam.zero(), timing, x, created_at)

    def reference(self, t_rel: float) -> RefPoint:
        """World-frame reference; holds the start before 0 and the final hover after t_fin."""
        t = min(max(t_rel, 0.0), self.timing.t_fin)
        return ref_point(t, self.k, self.timing).shifted(self.x0)

    @property
    def end_position(self) -> np.ndarray:
        return self.reference(self.timing.t_fin).pos

    def to_json(self) -> dict[str, Any]:
        return {"k": self.k.as_array().tolist(), "x0": self.x0.tolist(), "created_at": self.created_at}


@dataclasses.dataclass
class PlanningStats:
    n_obstacles: int = 0
    n_constraint_blocks: int = 0
    n_feasible_samples: int = 0
    n_checked_samples: int = 0
    augment_seconds: float = 0.0
    intersect_seconds: float = 0.0
    optimize_seconds: float = 0.0
    failure: Optional[str] = None

    @property
    def total_seconds(self) -> float:
        return self.augment_seconds + self.intersect_seconds + self.optimize_seconds


class PlanResult(NamedTuple):
    plan: Optional[Plan]
    stats: PlanningStats
    # Per-step position boxes of the new plan, world frame.
    tube: tuple[Box3, ...] = ()

    @property
    def found(self) -> bool:
        return self.plan is not None

