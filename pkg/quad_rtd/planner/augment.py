# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
import functools

import numpy as np

from ..frs.basic_types import FrsArrays, TimedFRS, TimedZonotope
from ..geometry.basic_types import Box3
from ..geometry.ops import POSITION_LABELS, add_box
from ..trajectory.basic_types import TrajParam
from .basic_types import PlannerError
from .error_models import ErrorModel

SLICE_TOL = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class AugmentedFRS:
    """
    Reachable set with the tracking error and the robot body added to every step.
    The added boxes don't depend on the peak velocity, so they land in the remainder column
    and shift the position center.
    """

    frs: TimedFRS
    err_lo: np.ndarray  # (n_steps, 3)
    err_hi: np.ndarray  # (n_steps, 3)
    body: Box3

    def __len__(self) -> int:
        return len(self.frs)

    @functools.cached_property
    def arrays(self) -> FrsArrays:
        base = self.frs.arrays
        err_center = 0.5 * (self.err_lo + self.err_hi)
        err_half = 0.5 * (self.err_hi - self.err_lo)
        return base._replace(
            c_x=base.c_x + err_center + self.body.center,
            eps=base.eps + err_half + self.body.half_extents,
        )

    def zonotopes(self) -> list[TimedZonotope]:
        """The same steps as explicit zonotopes, one extra generator per axis and box."""
        out = []
        for idx, step in enumerate(self.frs):
            rows = [step.zono.row(label) for label in POSITION_LABELS]
            zono = step.zono
            for box in (Box3.from_bounds(self.err_lo[idx], self.err_hi[idx]), self.body):
                if np.any(box.center) or np.any(box.half_extents):
                    zono = add_box(zono, box, rows)
            out.append(TimedZonotope(step.t_interval, zono))
        return out


def error_augment(frs: TimedFRS, model: ErrorModel, k_v, body: Box3) -> AugmentedFRS:
    if model.horizon is not None and abs(model.horizon - frs.timing.t_fin) > SLICE_TOL:
        raise PlannerError(f"error model covers [0, {model.horizon}] but the FRS ends at {frs.timing.t_fin}")
    arrays = frs.arrays
    err_lo, err_hi = model.boxes_for_steps(arrays.t_lo, arrays.t_hi, np.asarray(k_v, dtype=float))
    return AugmentedFRS(frs=frs, err_lo=err_lo, err_hi=err_hi, body=body)


def slice_coefficients(arrays: FrsArrays, k_v, k_a) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of k_v and k_a in the parameter generators, each of shape (n_steps, 3)."""
    beta_v = (np.asarray(k_v, dtype=float) - arrays.c_v) / arrays.g_v
    beta_a = (np.asarray(k_a, dtype=float) - arrays.c_a) / arrays.g_a
    return beta_v, beta_a


def slice_inside(arrays: FrsArrays, k_v, k_a, tol: float = SLICE_TOL) -> bool:
    """Whether (k_v, k_a) lies in the parameter box of every step."""
    beta_v, beta_a = slice_coefficients(arrays, k_v, k_a)
    return bool(np.all(np.abs(beta_v) <= 1.0 + tol) and np.all(np.abs(beta_a) <= 1.0 + tol))


def slice_centers(arrays: FrsArrays, k_v, k_a) -> np.ndarray:
    """Position centers of every step once k_v and k_a are fixed."""
    beta_v, beta_a = slice_coefficients(arrays, k_v, k_a)
    return arrays.c_x + arrays.gxv * beta_v + arrays.gxa * beta_a


def slice_position_boxes(zeps: AugmentedFRS, k: TrajParam) -> list[Box3]:
    """Per-step position box once every parameter is fixed, in the frame of the plan start."""
    arrays = zeps.arrays
    beta_pk = (k.k_pk - arrays.c_pk) / arrays.g_pk
    centers = slice_centers(arrays, k.k_v, k.k_a) + arrays.gxpk * beta_pk
    return [Box3(center=c, half_extents=e) for c, e in zip(centers, arrays.eps)]
