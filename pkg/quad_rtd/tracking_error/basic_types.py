# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
import math
from typing import Any, NamedTuple

import numpy as np

from ..geometry.basic_types import Box3, Interval

# Samples closer than this to a bin boundary count for both bins.
BIN_TOL = 1e-9


@dataclasses.dataclass
class TableBuildError(RuntimeError):
    explanation: str
    cells: tuple[int, ...] = ()

    def __str__(self) -> str:
        return f"{self.explanation} (cells: {list(self.cells)[:10]})" if self.cells else self.explanation


class Subdomain(NamedTuple):
    """A time bin times a velocity cell."""

    t_interval: Interval
    v_box: Box3


class ErrorBox(NamedTuple):
    """Bounds of the position tracking error, not necessarily symmetric about zero."""

    lo: np.ndarray
    hi: np.ndarray

    @property
    def box(self) -> Box3:
        return Box3.from_bounds(self.lo, self.hi)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_extents(self) -> np.ndarray:
        return 0.5 * (self.hi - self.lo)

    def contains(self, e_x, tol: float = 0.0) -> bool:
        e_x = np.asarray(e_x, dtype=float)
        return bool(np.all(e_x >= self.lo - tol) and np.all(e_x <= self.hi + tol))

    def hull(self, other: "ErrorBox") -> "ErrorBox":
        return ErrorBox(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    @classmethod
    def symmetric(cls, half_side: float) -> "ErrorBox":
        return cls(np.full(3, -half_side), np.full(3, half_side))


class CoverSpec(NamedTuple):
    """
    Regular cover of [0, t_fin] x ball(v_max).
    The velocity cube [-v_max - pad, v_max + pad]^3 is tiled by cells of side dv,
    cells that don't touch the ball are discarded.
    """

    v_max: float
    dv: float
    dt: float
    t_fin: float

    @property
    def n_axis(self) -> int:
        return max(1, math.ceil(2.0 * self.v_max / self.dv - BIN_TOL))

    @property
    def pad(self) -> float:
        return 0.5 * (self.n_axis * self.dv - 2.0 * self.v_max)

    @property
    def origin(self) -> float:
        return -self.v_max - self.pad

    @property
    def n_bins(self) -> int:
        return max(1, math.ceil(self.t_fin / self.dt - BIN_TOL))

    @property
    def n_cells_total(self) -> int:
        return self.n_axis**3

    def bin_interval(self, b: int) -> Interval:
        return Interval(b * self.dt, min((b + 1) * self.dt, self.t_fin))

    def cell_index(self, ijk: np.ndarray) -> np.ndarray:
        ijk = np.asarray(ijk)
        return (ijk[..., 0] * self.n_axis + ijk[..., 1]) * self.n_axis + ijk[..., 2]

    def cell_ijk(self, flat: np.ndarray) -> np.ndarray:
        return np.stack(np.unravel_index(np.asarray(flat), (self.n_axis,) * 3), axis=-1)

    def cell_lo(self, flat: np.ndarray) -> np.ndarray:
        return self.origin + self.dv * self.cell_ijk(flat)

    def cell_box(self, flat: int) -> Box3:
        lo = self.cell_lo(flat)
        return Box3.from_bounds(lo, lo + self.dv)

    def locate(self, k_v: np.ndarray) -> np.ndarray:
        """Flat index of the (possibly discarded) cell containing each velocity, clamped to the grid."""
        ijk = np.floor((np.asarray(k_v, dtype=float) - self.origin) / self.dv).astype(int)
        return self.cell_index(np.clip(ijk, 0, self.n_axis - 1))

    def bins_overlapping(self, t_lo: float, t_hi: float) -> range:
        first = min(max(math.floor(t_lo / self.dt + BIN_TOL), 0), self.n_bins - 1)
        last = min(max(math.ceil(t_hi / self.dt - BIN_TOL) - 1, first), self.n_bins - 1)
        return range(first, last + 1)

    def to_json(self) -> dict[str, Any]:
        return self._asdict()


class CoverReport(NamedTuple):
    n_bins: int
    n_cells_total: int
    n_cells_retained: int
    n_subdomains: int
    pad: float

    def describe(self) -> str:
        return (
            f"time bins: {self.n_bins}, velocity cells: {self.n_cells_retained} of {self.n_cells_total} "
            f"(pad {self.pad:.3f} m/s), subdomains: {self.n_subdomains}"
        )


@dataclasses.dataclass(frozen=True)
class TableMetadata:
    n_simulations: int = 0
    n_clamped_peaks: int = 0
    max_abs_error: float = 0.0
    build_seconds: float = 0.0
    sim_dt: float = 0.005
    slack: float = 0.0
    config_hash: str = ""

    def to_json(self) -> dict[str, Any]:
        return dataclasses.asdict(self)
