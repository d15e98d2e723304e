# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import abc
from typing import Optional

import numpy as np

from ..geometry.basic_types import Interval
from ..tracking_error.basic_types import ErrorBox
from ..tracking_error.table import TrackingErrorTable, error_box_for_interval


class ErrorModel(abc.ABC):
    """
    Bounds the tracking error added to every FRS step.
    Subclasses register themselves under the planner mode they implement.
    """

    _subclasses_map: dict[str, type["ErrorModel"]] = {}  # "table" (str) -> TableErrorModel
    mode: str

    def __init_subclass__(cls, **kwargs) -> None:
        mode = kwargs.pop("mode")
        super().__init_subclass__(**kwargs)
        cls._subclasses_map[mode] = cls
        cls.mode = mode

    @classmethod
    def modes(cls) -> list[str]:
        return sorted(cls._subclasses_map)

    @classmethod
    def from_config(
        cls,
        mode: str,
        *,
        table: Optional[TrackingErrorTable] = None,
        constant_error: float = 0.1,
    ) -> "ErrorModel":
        try:
            model_cls = cls._subclasses_map[mode]
        except KeyError:
            raise ValueError(f"unknown error mode '{mode}', expected one of {cls.modes()}") from None
        return model_cls.create(table=table, constant_error=constant_error)

    @classmethod
    @abc.abstractmethod
    def create(cls, *, table: Optional[TrackingErrorTable], constant_error: float) -> "ErrorModel":
        raise NotImplementedError()

    @property
    def horizon(self) -> Optional[float]:
        """Last time the model covers, or None if it covers any time."""
        return None

    @abc.abstractmethod
    def box_for_step(self, t_interval: Interval, k_v) -> ErrorBox:
        raise NotImplementedError()

    def boxes_for_steps(self, t_lo: np.ndarray, t_hi: np.ndarray, k_v) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper error bounds of every step, each of shape (n_steps, 3)."""
        boxes = [self.box_for_step(Interval(float(lo), float(hi)), k_v) for lo, hi in zip(t_lo, t_hi)]
        if not boxes:
            return np.zeros((0, 3)), np.zeros((0, 3))
        return np.array([box.lo for box in boxes]), np.array([box.hi for box in boxes])


class ConstantErrorModel(ErrorModel, mode="constant"):
    def __init__(self, half_side: float = 0.1) -> None:
        if half_side < 0:
            raise ValueError(f"error buffer must be non-negative, got {half_side}")
        self.half_side = half_side

    @classmethod
    def create(cls, *, table: Optional[TrackingErrorTable], constant_error: float) -> "ConstantErrorModel":
        return cls(constant_error)

    def box_for_step(self, t_interval: Interval, k_v) -> ErrorBox:
        return ErrorBox.symmetric(self.half_side)

    def boxes_for_steps(self, t_lo: np.ndarray, t_hi: np.ndarray, k_v) -> tuple[np.ndarray, np.ndarray]:
        n = len(t_lo)
        return np.full((n, 3), -self.half_side), np.full((n, 3), self.half_side)


class TableErrorModel(ErrorModel, mode="table"):
    def __init__(self, table: TrackingErrorTable) -> None:
        self.table = table

    @classmethod
    def create(cls, *, table: Optional[TrackingErrorTable], constant_error: float) -> "TableErrorModel":
        if table is None:
            raise ValueError("the table error mode needs a tracking error table")
        return cls(table)

    @property
    def horizon(self) -> Optional[float]:
        return self.table.spec.t_fin

    def box_for_step(self, t_interval: Interval, k_v) -> ErrorBox:
        return error_box_for_interval(self.table, t_interval.lo, t_interval.hi, k_v)

    def boxes_for_steps(self, t_lo: np.ndarray, t_hi: np.ndarray, k_v) -> tuple[np.ndarray, np.ndarray]:
        spec, table = self.table.spec, self.table
        if len(t_lo):
            table.check_time(float(np.min(t_lo)))
            table.check_time(float(np.max(t_hi)))
        row = int(table.row_of(k_v))
        per_bin_lo, per_bin_hi = table.lo[:, row], table.hi[:, row]
        lo, hi = np.empty((len(t_lo), 3)), np.empty((len(t_lo), 3))
        for idx, (a, b) in enumerate(zip(t_lo, t_hi)):
            bins = spec.bins_overlapping(float(a), float(b))
            lo[idx] = per_bin_lo[bins.start : bins.stop].min(axis=0)
            hi[idx] = per_bin_hi[bins.start : bins.stop].max(axis=0)
        return lo, hi


def error_box_for_step(model: ErrorModel, t_interval: Interval, k_v) -> ErrorBox:
    return model.box_for_step(t_interval, k_v)
