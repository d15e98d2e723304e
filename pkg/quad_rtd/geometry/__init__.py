# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .basic_types import Box3, GeometryError, Interval, Zonotope
from .ops import aabb_of_points, add_box, block_concat, box_to_zonotope, project_interval

__all__ = [
    "Box3",
    "GeometryError",
    "Interval",
    "Zonotope",
    "aabb_of_points",
    "add_box",
    "block_concat",
    "box_to_zonotope",
    "project_interval",
]
