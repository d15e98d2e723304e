# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
import enum
import functools
from typing import Any, NamedTuple, Optional

import numpy as np

from ..geometry.basic_types import Box3
from ..planner.basic_types import Obstacle


@enum.unique
class TrialOutcome(enum.Enum):
    goal = "goal"
    fail_safe_stop = "fail_safe_stop"
    crash = "crash"
    timeout = "timeout"


@dataclasses.dataclass(frozen=True, eq=False)
class World:
    bounds: Box3
    obstacles: tuple[Obstacle, ...]
    start: np.ndarray
    goal: np.ndarray
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("start", "goal"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    @functools.cached_property
    def obstacle_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.obstacles:
            return np.zeros((0, 3)), np.zeros((0, 3))
        return np.array([o.lo for o in self.obstacles]), np.array([o.hi for o in self.obstacles])

    def to_json(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "bounds": self.bounds.to_json(),
            "start": self.start.tolist(),
            "goal": self.goal.tolist(),
            "obstacles": [o.to_json() for o in self.obstacles],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "World":
        return cls(
            bounds=Box3.from_json(data["bounds"]),
            obstacles=tuple(Box3.from_json(o) for o in data["obstacles"]),
            start=data["start"],
            goal=data["goal"],
            seed=data["seed"],
        )


class WorldSettings(NamedTuple):
    n_obstacles: int = 120
    size: tuple[float, float, float] = (80.0, 20.0, 10.0)
    obstacle_sides: tuple[float, float] = (0.5, 3.0)
    clearance: float = 1.0
    body_width: float = 0.54


class TrialTrace(NamedTuple):
    """Executed and reference positions at every simulation step, plus the position tube of every plan."""

    t: np.ndarray
    x: np.ndarray
    ref: np.ndarray
    tubes: tuple[tuple[float, tuple[Box3, ...]], ...]


@dataclasses.dataclass
class TrialResult:
    seed: int
    mode: str
    outcome: TrialOutcome
    distance: float
    peak_speed: float
    n_iterations: int
    n_fail_safe: int
    sim_time: float
    mean_planning_seconds: float
    max_planning_seconds: float
    trace: Optional[TrialTrace] = dataclasses.field(default=None, repr=False, compare=False)

    @property
    def crashed(self) -> bool:
        return self.outcome == TrialOutcome.crash

    def to_json(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "mode": self.mode,
            "outcome": self.outcome.value,
            "distance": self.distance,
            "peak_speed": self.peak_speed,
            "n_iterations": self.n_iterations,
            "n_fail_safe": self.n_fail_safe,
            "sim_time": self.sim_time,
            "mean_planning_seconds": self.mean_planning_seconds,
            "max_planning_seconds": self.max_planning_seconds,
        }


class BenchmarkReport(NamedTuple):
    mode: str
    seeds: tuple[int, ...]
    trials: tuple[TrialResult, ...]

    def rate(self, outcome: TrialOutcome) -> float:
        if not self.trials:
            return 0.0
        return sum(trial.outcome == outcome for trial in self.trials) / len(self.trials)

    @property
    def crash_rate(self) -> float:
        return self.rate(TrialOutcome.crash)

    @property
    def goal_rate(self) -> float:
        return self.rate(TrialOutcome.goal)

    def to_json(self) -> dict[str, Any]:
        return {
            "mode": self.mode,
            "seeds": list(self.seeds),
            "crash_rate": self.crash_rate,
            "goal_rate": self.goal_rate,
            "trials": [trial.to_json() for trial in self.trials],
        }

    def describe(self) -> str:
        return (
            f"{self.mode}: {len(self.trials)} trials, "
            f"goal {self.goal_rate:.1%}, crash {self.crash_rate:.1%}, "
            f"fail-safe stops {self.rate(TrialOutcome.fail_safe_stop):.1%}, timeouts {self.rate(TrialOutcome.timeout):.1%}"
        )
