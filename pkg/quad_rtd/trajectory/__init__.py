# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .basic_types import (
    ParamBounds,
    RefPoint,
    Segment,
    SpeedLimits,
    TrajectoryError,
    TrajParam,
    TrajParam1D,
    TrajTiming,
)
from .spline import (
    acc_1d,
    affine_pos_coeffs,
    basis,
    basis_polys,
    feasible_mask,
    is_feasible,
    min_sensing_distance,
    pos_1d,
    ref_arrays,
    ref_point,
    segment_coeffs,
    vel_1d,
)
