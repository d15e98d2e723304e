# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
import functools
from typing import Any, NamedTuple

import numpy as np

from ..geometry.basic_types import Interval, Zonotope
from ..trajectory.basic_types import ParamBounds, TrajTiming

AXIS_LABELS = ("x", "kv", "ka", "kpk")
PARAM_LABELS = AXIS_LABELS[1:]
STRUCTURE_TOL = 1e-12


@dataclasses.dataclass
class FrsError(ValueError):
    explanation: str

    def __str__(self) -> str:
        return self.explanation


class TimedZonotope(NamedTuple):
    t_interval: Interval
    zono: Zonotope

    def to_json(self) -> dict[str, Any]:
        return {"t": list(self.t_interval), "zonotope": self.zono.to_json()}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "TimedZonotope":
        return cls(Interval(*data["t"]), Zonotope.from_json(data["zonotope"]))


class FrsArrays(NamedTuple):
    """
    Per-step, per-axis coefficients of zonotopes with one column per parameter plus one remainder column.
    Every array except the time bounds has shape (n_steps, 3).
    Position = c_x + gxv b_v + gxa b_a + gxpk b_pk + eps b_eps,
    and each parameter row = c + g b of its own coefficient.
    """

    t_lo: np.ndarray
    t_hi: np.ndarray
    c_x: np.ndarray
    gxv: np.ndarray
    gxa: np.ndarray
    gxpk: np.ndarray
    eps: np.ndarray
    c_v: np.ndarray
    g_v: np.ndarray
    c_a: np.ndarray
    g_a: np.ndarray
    c_pk: np.ndarray
    g_pk: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.t_lo)


def structured_coefficients(zono: Zonotope) -> dict[str, np.ndarray]:
    """
    Read the coefficients of one zonotope, checking that every generator column touches
    at most one parameter row of its axis and no row of other axes.
    Columns that touch no parameter row are merged into the remainder.
    """
    out = {name: np.zeros(3) for name in FrsArrays._fields if name not in ("t_lo", "t_hi")}
    G = zono.generators
    for axis in range(3):
        rows = [zono.row(f"{label}{axis + 1}") for label in AXIS_LABELS]
        others = [r for r in range(zono.dim) if r not in rows]
        cols = np.flatnonzero(np.any(np.abs(G[rows]) > STRUCTURE_TOL, axis=0))
        if others and np.any(np.abs(G[np.ix_(others, cols)]) > STRUCTURE_TOL):
            raise FrsError(f"generators of axis {axis + 1} leak into other axes")
        param_rows = np.abs(G[np.ix_(rows[1:], cols)]) > STRUCTURE_TOL
        if np.any(param_rows.sum(axis=0) > 1):
            raise FrsError(f"a generator of axis {axis + 1} couples two parameters")
        for p_idx, (label, c_name, g_name, gx_name) in enumerate(
            zip(PARAM_LABELS, ("c_v", "c_a", "c_pk"), ("g_v", "g_a", "g_pk"), ("gxv", "gxa", "gxpk"))
        ):
            p_cols = cols[param_rows[p_idx]]
            if len(p_cols) != 1:
                raise FrsError(f"expected one generator for {label}{axis + 1}, found {len(p_cols)}")
            col = p_cols[0]
            out[c_name][axis] = zono.center[rows[p_idx + 1]]
            out[g_name][axis] = G[rows[p_idx + 1], col]
            out[gx_name][axis] = G[rows[0], col]
        rest = cols[~param_rows.any(axis=0)]
        out["c_x"][axis] = zono.center[rows[0]]
        out["eps"][axis] = np.sum(np.abs(G[rows[0], rest]))
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class TimedFRS:
    steps: tuple[TimedZonotope, ...]
    timing: TrajTiming
    bounds: ParamBounds
    dt: float
    metadata: dict[str, Any] = dataclasses.field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, idx: int) -> TimedZonotope:
        return self.steps[idx]

    def step_at(self, t: float) -> int:
        """Index of the first step whose interval contains t."""
        for idx, step in enumerate(self.steps):
            if step.t_interval.contains(t, tol=1e-12):
                return idx
        raise FrsError(f"time {t} is outside the reachable set horizon")

    @functools.cached_property
    def arrays(self) -> FrsArrays:
        return stack_coefficients(self.steps)


def stack_coefficients(steps) -> FrsArrays:
    rows = [structured_coefficients(step.zono) for step in steps]
    stacked = {name: np.array([row[name] for row in rows]) for name in rows[0]}
    return FrsArrays(
        t_lo=np.array([step.t_interval.lo for step in steps]),
        t_hi=np.array([step.t_interval.hi for step in steps]),
        **stacked,
    )
