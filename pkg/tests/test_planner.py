# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import time

import numpy as np
import pytest

from quad_rtd.frs.basic_types import stack_coefficients
from quad_rtd.geometry.basic_types import Box3, Interval
from quad_rtd.planner import (
    ConstantErrorModel,
    ErrorModel,
    OptimizerSettings,
    Plan,
    PlannerError,
    TableErrorModel,
    UnsafeBoxSet,
    ball_samples,
    boundary_slabs,
    error_augment,
    error_box_for_step,
    generate_constraints,
    intersect_all,
    intersect_obs,
    is_safe,
    optimize,
    safe_mask,
    sense_obstacles,
    waypoint_cost,
)
from quad_rtd.planner.augment import slice_centers, slice_inside
from quad_rtd.planner.constraints import block_minima
from quad_rtd.planner.sensing import nearest_distance
from quad_rtd.tracking_error.basic_types import CoverSpec
from quad_rtd.trajectory import SpeedLimits, TrajParam, TrajTiming, is_feasible
from quad_rtd.trajectory.spline import ref_arrays
from quad_rtd.verify import VerifyContext, replay_touches, run_suites
from tests.conftest import make_uniform_table

NO_BODY = Box3.cube((0.0, 0.0, 0.0), 0.0)
BODY = Box3.cube((0.0, 0.0, 0.0), 0.54)
REST = np.zeros(3)


# Error models


def test_error_modes_are_registered() -> None:
    assert ErrorModel.modes() == ["constant", "table"]
    assert isinstance(ErrorModel.from_config("constant", constant_error=0.2), ConstantErrorModel)
    with pytest.raises(ValueError):
        ErrorModel.from_config("table")
    with pytest.raises(ValueError):
        ErrorModel.from_config("adaptive")
    with pytest.raises(ValueError):
        ConstantErrorModel(-0.1)


def test_table_model_matches_single_steps(frs) -> None:
    table = make_uniform_table(CoverSpec(v_max=5.0, dv=2.5, dt=0.5, t_fin=3.0))
    row = int(table.row_of(np.array([1.0, 0.5, 0.5])))
    table.hi[2, row] = 0.3
    model = ErrorModel.from_config("table", table=table)
    assert isinstance(model, TableErrorModel)
    assert model.horizon == 3.0
    arrays = frs.arrays
    lo, hi = model.boxes_for_steps(arrays.t_lo, arrays.t_hi, [1.0, 0.5, 0.5])
    for idx, step in enumerate(frs):
        box = error_box_for_step(model, step.t_interval, [1.0, 0.5, 0.5])
        np.testing.assert_array_equal(lo[idx], box.lo)
        np.testing.assert_array_equal(hi[idx], box.hi)
    # the step ending on a bin boundary stays in its own bin
    step = frs.step_at(0.95)
    assert np.all(hi[step] == 0.1)
    assert np.all(hi[frs.step_at(1.25)] == 0.3)


def test_table_horizon_must_match(frs) -> None:
    model = TableErrorModel(make_uniform_table(CoverSpec(v_max=5.0, dv=2.5, dt=0.5, t_fin=2.0)))
    with pytest.raises(PlannerError):
        error_augment(frs, model, REST, BODY)


# Error augmentation


def test_zero_augmentation_keeps_the_reachable_set(frs) -> None:
    zeps = error_augment(frs, ConstantErrorModel(0.0), REST, NO_BODY)
    assert [step.zono for step in zeps.zonotopes()] == [step.zono for step in frs]
    np.testing.assert_array_equal(zeps.arrays.eps, frs.arrays.eps)
    np.testing.assert_array_equal(zeps.arrays.c_x, frs.arrays.c_x)


def test_body_widens_the_remainder(frs) -> None:
    zeps = error_augment(frs, ConstantErrorModel(0.0), REST, BODY)
    np.testing.assert_allclose(zeps.arrays.eps, frs.arrays.eps + 0.27)
    np.testing.assert_array_equal(zeps.arrays.gxpk, frs.arrays.gxpk)


def test_asymmetric_error_shifts_the_center(frs) -> None:
    spec = CoverSpec(v_max=5.0, dv=2.5, dt=0.5, t_fin=3.0)
    table = make_uniform_table(spec)
    table.lo[:] = -0.1
    table.hi[:] = 0.3
    zeps = error_augment(frs, TableErrorModel(table), REST, BODY)
    np.testing.assert_allclose(zeps.arrays.c_x, frs.arrays.c_x + 0.1)
    np.testing.assert_allclose(zeps.arrays.eps, frs.arrays.eps + 0.2 + 0.27)


def test_augmented_arrays_match_explicit_zonotopes(frs) -> None:
    spec = CoverSpec(v_max=5.0, dv=2.5, dt=0.5, t_fin=3.0)
    table = make_uniform_table(spec)
    table.lo[:, :, 0] = -0.05
    table.hi[:, :, 2] = 0.25
    zeps = error_augment(frs, TableErrorModel(table), [1.0, -1.0, 0.0], BODY)
    explicit = stack_coefficients(zeps.zonotopes())
    for name in ("c_x", "gxv", "gxa", "gxpk", "eps", "c_pk", "g_pk"):
        np.testing.assert_allclose(getattr(zeps.arrays, name), getattr(explicit, name), atol=1e-12)
    assert zeps.zonotopes()[0].zono.n_generators == frs[0].zono.n_generators + 6


def test_slice_membership(frs) -> None:
    assert slice_inside(frs.arrays, [4.9, 0.0, 0.0], [0.0, -9.9, 0.0])
    assert not slice_inside(frs.arrays, [5.5, 0.0, 0.0], REST)
    assert not slice_inside(frs.arrays, REST, [0.0, 0.0, 12.0])


# Intersection


def test_far_obstacle_is_unreachable(frs) -> None:
    zeps = error_augment(frs, ConstantErrorModel(0.1), REST, BODY).zonotopes()
    far = Box3.from_bounds((40.0, -1.0, -1.0), (41.0, 1.0, 1.0))
    assert all(intersect_obs(step, far, REST, REST) is None for step in zeps)


def test_covering_obstacle_makes_every_peak_unsafe(frs) -> None:
    zeps = error_augment(frs, ConstantErrorModel(0.1), REST, BODY).zonotopes()
    huge = Box3.cube((0.0, 0.0, 0.0), 200.0)
    for step in zeps[::5]:
        box = intersect_obs(step, huge, REST, REST)
        assert box is not None
        np.testing.assert_allclose(box.lo, -5.0)
        np.testing.assert_allclose(box.hi, 5.0)


def test_obstacle_behind_a_slow_start(frs) -> None:
    arrays = error_augment(frs, ConstantErrorModel(0.1), REST, BODY).arrays
    wall = Box3.from_bounds((2.0, -10.0, -10.0), (3.0, 10.0, 10.0))
    unsafe = intersect_all(arrays, [wall], REST, REST)
    assert len(unsafe) > 0
    assert np.all(unsafe.obs_idx == 0)
    # only peaks heading toward the wall are unsafe
    assert np.all(unsafe.hi[:, 0] > 0.0)
    assert not unsafe.contains([-2.0, 0.0, 0.0])
    assert unsafe.contains([4.0, 0.0, 0.0])
    assert np.all(np.diff(unsafe.step_idx) >= 0)


def _touches(arrays, idx: int, k_v, k_a, k_pk: np.ndarray, o: Box3) -> np.ndarray:
    beta_pk = (k_pk - arrays.c_pk[idx]) / arrays.g_pk[idx]
    centers = slice_centers(arrays, k_v, k_a)[idx] + arrays.gxpk[idx] * beta_pk
    lo, hi = centers - arrays.eps[idx], centers + arrays.eps[idx]
    return np.all((lo <= o.hi) & (hi >= o.lo), axis=-1)


def test_unsafe_boxes_against_replayed_references(frs) -> None:
    rng = np.random.default_rng(11)
    raw = frs.arrays
    n_touching = 0
    for _ in range(30):
        k_v, k_a = rng.uniform(-2.0, 2.0, 3), rng.uniform(-4.0, 4.0, 3)
        zeps = error_augment(frs, ConstantErrorModel(0.1), k_v, BODY)
        arrays = zeps.arrays
        idx = int(rng.integers(0, arrays.n_steps))
        single = arrays._replace(**{name: getattr(arrays, name)[idx : idx + 1] for name in arrays._fields})
        t_interval = Interval(float(raw.t_lo[idx]), float(raw.t_hi[idx]))
        anchor = ref_arrays(t_interval.mid, k_v, k_a, rng.uniform(-2.0, 2.0, 3), frs.timing).pos
        o = Box3(center=anchor + rng.normal(0.0, 1.0, 3), half_extents=rng.uniform(0.25, 1.5, 3))
        unsafe = intersect_all(single, [o], k_v, k_a)

        k_pk = rng.uniform(-5.0, 5.0, (600, 3))
        grow_lo, grow_hi = zeps.err_lo[idx] + BODY.lo, zeps.err_hi[idx] + BODY.hi
        touching = replay_touches(k_v, k_a, k_pk, t_interval, frs.timing, grow_lo, grow_hi, o)
        n_touching += int(touching.sum())
        # every peak velocity that flies the grown body into the obstacle is excluded
        assert not np.any(touching & ~unsafe.contains(k_pk, 1e-9))
        # and nothing is excluded that stays clear by more than twice the remainder
        slack = 2.0 * raw.eps[idx] + 1e-9
        near = replay_touches(k_v, k_a, k_pk, t_interval, frs.timing, grow_lo - slack, grow_hi + slack, o)
        assert not np.any(unsafe.contains(k_pk, -1e-9) & ~near)
    assert n_touching > 0


def test_unsafe_set_suite_passes(frs) -> None:
    (result,) = run_suites(VerifyContext(frs, None, scale=0.2), ["unsafe-set"])
    assert result.n_checked == 10
    assert result.passed


def test_unsafe_boxes_are_products_of_sliced_intervals(frs) -> None:
    arrays = error_augment(frs, ConstantErrorModel(0.1), REST, BODY).arrays
    rng = np.random.default_rng(7)
    axis = np.linspace(-5.0, 5.0, 21)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    for _ in range(50):
        idx = int(rng.integers(0, arrays.n_steps))
        k_v, k_a = rng.uniform(-2.0, 2.0, 3), rng.uniform(-4.0, 4.0, 3)
        o = Box3(center=rng.uniform(-6.0, 6.0, 3), half_extents=rng.uniform(0.2, 2.0, 3))
        single = arrays._replace(**{name: getattr(arrays, name)[idx : idx + 1] for name in arrays._fields})
        unsafe = intersect_all(single, [o], k_v, k_a)
        expected = _touches(arrays, idx, k_v, k_a, grid, o)
        np.testing.assert_array_equal(unsafe.contains(grid), expected)


# Constraints


def test_constraint_blocks() -> None:
    unsafe = UnsafeBoxSet(
        lo=np.array([[0.0, 0.0, 0.0], [-3.0, -3.0, -3.0]]),
        hi=np.array([[1.0, 2.0, 3.0], [-2.0, -2.0, -2.0]]),
        step_idx=np.array([0, 1]),
        obs_idx=np.array([0, 0]),
    )
    constraints = generate_constraints(unsafe)
    assert constraints.A.shape == (12, 3)
    assert constraints.n_blocks == 2
    minima = block_minima(np.array([0.5, 1.0, 1.5]), constraints)
    assert minima[0] == pytest.approx(0.5)
    assert minima[1] < 0
    assert block_minima(np.array([1.1, 1.0, 1.5]), constraints)[0] == pytest.approx(-0.1)
    assert not is_safe([1.0, 2.0, 3.0], constraints)  # closed boxes
    assert is_safe([1.0, 2.0, 3.0001], constraints)


def test_constraints_agree_with_box_membership() -> None:
    rng = np.random.default_rng(3)
    lo = rng.uniform(-4.0, 3.0, (20, 3))
    unsafe = UnsafeBoxSet(lo, lo + rng.uniform(0.1, 2.0, (20, 3)), np.arange(20), np.zeros(20, dtype=int))
    points = rng.uniform(-5.0, 5.0, (5000, 3))
    np.testing.assert_array_equal(safe_mask(points, generate_constraints(unsafe)), ~unsafe.contains(points))


def test_nothing_is_unsafe_without_obstacles() -> None:
    constraints = generate_constraints(UnsafeBoxSet.empty())
    assert constraints.n_blocks == 0
    assert is_safe([1.0, 2.0, 3.0], constraints)
    assert safe_mask(np.zeros((4, 3)), constraints).all()


# Optimization


def test_ball_samples() -> None:
    samples = ball_samples(1000)
    assert samples.shape == (1000, 3)
    assert np.all(np.linalg.norm(samples, axis=1) <= 1.0)
    assert ball_samples(1000) is samples


def _optimizer() -> OptimizerSettings:
    return OptimizerSettings(n_samples=2000, batch_size=256)


def test_optimizer_heads_for_the_waypoint() -> None:
    settings = _optimizer()
    cost = waypoint_cost(REST, REST, settings.timing, [5.0, 0.0, 0.0])
    result = optimize(cost, generate_constraints(UnsafeBoxSet.empty()), REST, REST, 0.75, settings)
    assert result.k_pk is not None
    assert result.k_pk[0] > 2.5
    assert np.all(np.abs(result.k_pk[1:]) < 1.0)
    assert result.n_checked <= settings.batch_size
    assert is_feasible(TrajParam(REST, REST, result.k_pk), settings.timing, settings.limits)


def test_optimizer_avoids_unsafe_boxes() -> None:
    settings = _optimizer()
    cost = waypoint_cost(REST, REST, settings.timing, [5.0, 0.0, 0.0])
    blocked = UnsafeBoxSet(np.array([[1.0, -3.0, -3.0]]), np.array([[3.0, 3.0, 3.0]]), np.zeros(1, int), np.zeros(1, int))
    result = optimize(cost, generate_constraints(blocked), REST, REST, 0.75, settings)
    assert result.k_pk is not None
    assert not blocked.contains(result.k_pk)


def test_optimizer_gives_up_when_everything_is_unsafe() -> None:
    settings = _optimizer()
    everything = UnsafeBoxSet(np.full((1, 3), -10.0), np.full((1, 3), 10.0), np.zeros(1, int), np.zeros(1, int))
    cost = waypoint_cost(REST, REST, settings.timing, [5.0, 0.0, 0.0])
    result = optimize(cost, generate_constraints(everything), REST, REST, 0.75, settings)
    assert result.k_pk is None
    assert not result.timed_out
    assert result.n_checked == result.n_feasible > 0


def test_optimizer_is_deterministic() -> None:
    settings = _optimizer()
    k_v, k_a = np.array([1.0, 0.5, 0.0]), np.array([0.0, 1.0, -1.0])
    cost = waypoint_cost(k_v, k_a, settings.timing, [3.0, 4.0, 0.0])
    constraints = generate_constraints(
        UnsafeBoxSet(np.array([[0.0, 1.0, -1.0]]), np.array([[2.0, 3.0, 1.0]]), np.zeros(1, int), np.zeros(1, int))
    )
    first = optimize(cost, constraints, k_v, k_a, 0.75, settings)
    second = optimize(cost, constraints, k_v, k_a, 0.75, settings)
    np.testing.assert_array_equal(first.k_pk, second.k_pk)


def test_optimizer_budget() -> None:
    settings = _optimizer()._replace(deterministic=False)
    cost = waypoint_cost(REST, REST, settings.timing, [5.0, 0.0, 0.0])
    constraints = generate_constraints(UnsafeBoxSet.empty())
    result = optimize(cost, constraints, REST, REST, 0.75, settings, started=time.perf_counter() - 1.0)
    assert result.timed_out
    assert result.k_pk is None
    with pytest.raises(AssertionError):
        optimize(cost, constraints, REST, REST, 0.0, settings)


def test_optimizer_respects_the_limits() -> None:
    settings = OptimizerSettings(limits=SpeedLimits(v_max=5.0, a_max=3.0), n_samples=2000)
    k_v = np.array([4.5, 0.0, 0.0])
    cost = waypoint_cost(k_v, REST, settings.timing, [20.0, 0.0, 0.0])
    result = optimize(cost, generate_constraints(UnsafeBoxSet.empty()), k_v, REST, 0.75, settings)
    assert result.k_pk is not None
    assert np.linalg.norm(result.k_pk) <= 5.0 + 1e-9


# Sensing


def test_sensing_range() -> None:
    near = Box3.from_bounds((12.0, -1.0, -1.0), (13.0, 1.0, 1.0))
    far = Box3.from_bounds((20.0, -1.0, -1.0), (21.0, 1.0, 1.0))
    assert nearest_distance(np.zeros(3), near) == pytest.approx(12.0)
    sensed = sense_obstacles(np.zeros(3), [near, far], d_sense=12.0)
    assert sensed == [near]
    sensed = sense_obstacles(np.array([1.0, 2.0, 3.0]), [near, far], d_sense=30.0)
    assert sensed == [near.translated((-1.0, -2.0, -3.0)), far.translated((-1.0, -2.0, -3.0))]


def test_world_faces_are_always_sensed() -> None:
    bounds = Box3.from_bounds((0.0, -10.0, 0.0), (80.0, 10.0, 10.0))
    sensed = sense_obstacles(np.array([40.0, 0.0, 5.0]), [], d_sense=1.0, bounds=bounds)
    assert len(sensed) == 6
    slabs = boundary_slabs(bounds)
    inside = np.array([0.01, -9.99, 9.99])
    outside = np.array([-0.01, 0.0, 5.0])
    assert not any(slab.contains(inside) for slab in slabs)
    assert any(slab.contains(outside) for slab in slabs)
    assert all(slab.intersects(bounds) for slab in slabs)


# Plans


def test_plan_reference_is_anchored() -> None:
    timing = TrajTiming()
    k = TrajParam(k_v=REST, k_a=REST, k_pk=[2.0, 0.0, 0.0])
    plan = Plan(k, timing, x0=[10.0, 0.0, 1.0], created_at=4.0)
    np.testing.assert_allclose(plan.reference(0.0).pos, [10.0, 0.0, 1.0])
    np.testing.assert_allclose(plan.reference(-1.0).pos, [10.0, 0.0, 1.0])
    np.testing.assert_allclose(plan.reference(10.0).pos, plan.end_position)
    np.testing.assert_allclose(plan.reference(10.0).vel, 0.0, atol=1e-12)
    assert plan.end_position[0] == pytest.approx(10.0 + 2.0 * 0.5 + 2.0 * 1.0)
    hover = Plan.hover([1.0, 2.0, 3.0], timing)
    np.testing.assert_allclose(hover.reference(2.0).pos, [1.0, 2.0, 3.0])
    assert plan.to_json()["created_at"] == 4.0


def test_error_box_of_an_interval() -> None:
    model = ConstantErrorModel(0.2)
    box = error_box_for_step(model, Interval(0.0, 0.1), REST)
    np.testing.assert_allclose(box.hi, 0.2)
