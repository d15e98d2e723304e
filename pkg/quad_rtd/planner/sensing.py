# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from collections.abc import Sequence
from typing import Optional

import numpy as np

from ..geometry.basic_types import Box3
from .basic_types import Obstacle

SLAB_THICKNESS = 1.0


def boundary_slabs(bounds: Box3, thickness: float = SLAB_THICKNESS) -> list[Obstacle]:
    """Six boxes lying against the faces of the world from outside, overlapping at the edges."""
    slabs = []
    outer_lo, outer_hi = bounds.lo - thickness, bounds.hi + thickness
    for axis in range(3):
        lo, hi = outer_lo.copy(), outer_hi.copy()
        hi[axis] = bounds.lo[axis]
        slabs.append(Box3.from_bounds(lo, hi))
        lo, hi = outer_lo.copy(), outer_hi.copy()
        lo[axis] = bounds.hi[axis]
        slabs.append(Box3.from_bounds(lo, hi))
    return slabs


def nearest_distance(x, box: Box3) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x - np.clip(x, box.lo, box.hi)))


def sense_obstacles(
    x,
    obstacles: Sequence[Obstacle],
    d_sense: float = 12.0,
    bounds: Optional[Box3] = None,
) -> list[Obstacle]:
    """
    Obstacles whose nearest point lies within d_sense of x, moved to the frame centered at x.
    The faces of the world are always sensed.
    """
    x = np.asarray(x, dtype=float)
    seen = [o for o in obstacles if nearest_distance(x, o) <= d_sense]
    if bounds is not None:
        seen.extend(boundary_slabs(bounds))
    return [o.translated(-x) for o in seen]
