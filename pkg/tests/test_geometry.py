# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quad_rtd.geometry.basic_types import Box3, GeometryError, Interval, Zonotope
from quad_rtd.geometry.ops import (
    POSITION_LABELS,
    aabb_of_points,
    add_box,
    block_concat,
    box_to_zonotope,
    project_interval,
)

coords = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
halves = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)
vec3 = st.tuples(coords, coords, coords)
half3 = st.tuples(halves, halves, halves)


def test_interval_basics() -> None:
    a = Interval(1.0, 3.0)
    assert a.width == 2.0
    assert a.mid == 2.0
    assert a.contains(3.0)
    assert not a.contains(3.1)
    assert a.contains(3.1, tol=0.2)
    assert a.overlaps(Interval(3.0, 4.0))
    assert not a.overlaps(Interval(3.5, 4.0))
    assert a + Interval(-1.0, 1.0) == Interval(0.0, 4.0)


def test_box_from_bounds() -> None:
    box = Box3.from_bounds((0.0, -1.0, 2.0), (2.0, 1.0, 6.0))
    np.testing.assert_allclose(box.center, (1.0, 0.0, 4.0))
    np.testing.assert_allclose(box.half_extents, (1.0, 1.0, 2.0))
    assert box.axis(2) == Interval(2.0, 6.0)
    with pytest.raises(GeometryError):
        Box3.from_bounds((1.0, 0.0, 0.0), (0.0, 1.0, 1.0))


def test_box_rejects_bad_shapes() -> None:
    with pytest.raises(GeometryError):
        Box3(center=(0.0, 0.0), half_extents=(1.0, 1.0))
    with pytest.raises(GeometryError):
        Box3(center=(0.0, 0.0, 0.0), half_extents=(1.0, -1.0, 1.0))


def test_box_is_immutable() -> None:
    box = Box3.cube((0.0, 0.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        box.center[0] = 1.0


@pytest.mark.parametrize(
    "offset, expected",
    [
        ((0.5, 0.0, 0.0), True),
        ((2.0, 0.0, 0.0), True),  # faces touch
        ((2.0 + 1e-9, 0.0, 0.0), False),
        ((2.0, 2.0, 2.0), True),  # corners touch
        ((0.0, 0.0, -3.0), False),
    ],
)
def test_box_intersection_is_closed(offset, expected) -> None:
    a = Box3.cube((0.0, 0.0, 0.0), 2.0)
    b = a.translated(offset)
    assert a.intersects(b) is expected
    assert b.intersects(a) is expected


def test_box_json() -> None:
    box = Box3.from_bounds((0.0, 1.0, 2.0), (3.0, 4.0, 5.0))
    assert Box3.from_json(box.to_json()) == box


def test_zonotope_validation() -> None:
    with pytest.raises(GeometryError):
        Zonotope(center=np.zeros(3), generators=np.zeros((2, 4)), labels=POSITION_LABELS)
    with pytest.raises(GeometryError):
        Zonotope(center=np.zeros(3), generators=np.eye(3), labels=("x1", "x1", "x2"))
    empty = Zonotope(center=np.ones(3), generators=np.zeros((3, 0)), labels=POSITION_LABELS)
    assert empty.n_generators == 0
    assert project_interval(empty, 0) == Interval(1.0, 1.0)


def test_zonotope_row_lookup() -> None:
    zono = box_to_zonotope(Box3.cube((0.0, 0.0, 0.0), 2.0))
    assert zono.row("x3") == 2
    with pytest.raises(GeometryError):
        zono.row("kpk1")


@given(vec3, half3, vec3, half3)
def test_add_box_projects_to_interval_sum(c1, h1, c2, h2) -> None:
    base = Box3(center=c1, half_extents=h1)
    extra = Box3(center=c2, half_extents=h2)
    zono = add_box(box_to_zonotope(base), extra, rows=(0, 1, 2))
    assert zono.n_generators == 6
    for i in range(3):
        got = project_interval(zono, i)
        expected = base.axis(i) + extra.axis(i)
        assert got.lo == pytest.approx(expected.lo, abs=1e-9)
        assert got.hi == pytest.approx(expected.hi, abs=1e-9)


def test_add_box_needs_three_rows() -> None:
    zono = box_to_zonotope(Box3.cube((0.0, 0.0, 0.0), 1.0))
    with pytest.raises(GeometryError):
        add_box(zono, Box3.cube((0.0, 0.0, 0.0), 1.0), rows=(0, 0, 1))
    with pytest.raises(GeometryError):
        add_box(zono, Box3.cube((0.0, 0.0, 0.0), 1.0), rows=(0, 1, 5))


def test_block_concat_labels_and_structure() -> None:
    z = Zonotope(center=[1.0, 2.0], generators=[[1.0, 0.5], [0.0, 2.0]], labels=("x", "kpk"))
    stacked = block_concat(z, z, z)
    assert stacked.labels == ("x1", "kpk1", "x2", "kpk2", "x3", "kpk3")
    assert stacked.generators.shape == (6, 6)
    # no generator couples two axes
    np.testing.assert_array_equal(stacked.generators[0:2, 2:], 0.0)
    np.testing.assert_array_equal(stacked.generators[2:4, :2], 0.0)
    assert project_interval(stacked, stacked.row("x2")) == Interval(-0.5, 2.5)


def test_block_concat_needs_equal_generator_counts() -> None:
    a = Zonotope(center=[0.0], generators=[[1.0]], labels=("x",))
    b = Zonotope(center=[0.0], generators=[[1.0, 1.0]], labels=("x",))
    with pytest.raises(GeometryError):
        block_concat(a, a, b)


@given(st.lists(vec3, min_size=1, max_size=20))
def test_aabb_contains_points(points) -> None:
    box = aabb_of_points(points)
    for point in points:
        assert box.contains(point, tol=1e-9)


def test_aabb_of_nothing() -> None:
    with pytest.raises(GeometryError):
        aabb_of_points([])


def test_zonotope_json() -> None:
    zono = add_box(box_to_zonotope(Box3.cube((1.0, 2.0, 3.0), 1.0)), Box3.cube((0.0, 0.0, 0.0), 0.5), (0, 1, 2))
    assert Zonotope.from_json(zono.to_json()) == zono
