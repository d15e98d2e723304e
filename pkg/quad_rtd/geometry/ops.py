# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from collections.abc import Sequence

import numpy as np
import scipy.linalg

from .basic_types import Box3, GeometryError, Interval, Zonotope

POSITION_LABELS = ("x1", "x2", "x3")


def box_to_zonotope(box: Box3, labels: Sequence[str] = POSITION_LABELS) -> Zonotope:
    return Zonotope(center=box.center, generators=np.diag(box.half_extents), labels=tuple(labels))


def add_box(zono: Zonotope, box: Box3, rows: Sequence[int]) -> Zonotope:
    """
    Minkowski sum of a zonotope and a box living on three of its rows.
    Appends one axis-aligned generator per box axis.
    """
    rows = list(rows)
    if len(rows) != 3 or len(set(rows)) != 3:
        raise GeometryError(f"need three distinct rows, got {rows}")
    if any(not 0 <= row < zono.dim for row in rows):
        raise GeometryError(f"row index out of range for a {zono.dim}-dimensional zonotope: {rows}")
    center = zono.center.copy()
    center[rows] += box.center
    extra = np.zeros((zono.dim, 3))
    extra[rows, [0, 1, 2]] = box.half_extents
    return Zonotope(center=center, generators=np.hstack([zono.generators, extra]), labels=zono.labels)


def block_concat(z1: Zonotope, z2: Zonotope, z3: Zonotope) -> Zonotope:
    """
    Stack three per-axis zonotopes into one with a block-diagonal generator matrix.
    Row labels get the axis number appended, so "kpk" of the second block becomes "kpk2".
    """
    if not z1.n_generators == z2.n_generators == z3.n_generators:
        raise GeometryError(
            f"generator counts differ: {z1.n_generators}, {z2.n_generators}, {z3.n_generators}",
        )
    return Zonotope(
        center=np.concatenate([z1.center, z2.center, z3.center]),
        generators=scipy.linalg.block_diag(z1.generators, z2.generators, z3.generators),
        labels=tuple(f"{label}{axis}" for axis, zono in enumerate((z1, z2, z3), start=1) for label in zono.labels),
    )


def project_interval(zono: Zonotope, row: int) -> Interval:
    if not 0 <= row < zono.dim:
        raise GeometryError(f"row {row} out of range for a {zono.dim}-dimensional zonotope")
    radius = float(np.sum(np.abs(zono.generators[row])))
    return Interval(float(zono.center[row]) - radius, float(zono.center[row]) + radius)


def aabb_of_points(points) -> Box3:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        raise GeometryError("can't bound an empty set of points")
    return Box3.from_bounds(pts.min(axis=0), pts.max(axis=0))
