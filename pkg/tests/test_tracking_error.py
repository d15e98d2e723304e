# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import numpy as np
import pytest

from quad_rtd.geometry.basic_types import Interval
from quad_rtd.helpers.basic_types import ArtifactError
from quad_rtd.trajectory import TrajectoryError, TrajParam1D
from quad_rtd.tracking_error import (
    CoverSpec,
    ErrorBox,
    FeedbackGains,
    TableBuildError,
    build_cover,
    count_clamped_peaks,
    cover_report,
    endpoint_experiment,
    error_box_for_interval,
    feasible_peak_vels,
    load_table,
    max_error_extent,
    query,
    retained_cells,
    save_table,
)
from quad_rtd.tracking_error.cover import SIGNS
from quad_rtd.tracking_error.table import compute_table, make_job, replay_errors
from tests.conftest import make_uniform_table


def test_cover_counts(coarse_spec: CoverSpec) -> None:
    assert coarse_spec.n_axis == 4
    assert coarse_spec.pad == pytest.approx(0.0)
    assert coarse_spec.n_bins == 6
    report = cover_report(coarse_spec)
    assert report.n_cells_retained == 64
    assert report.n_subdomains == 6 * 64
    assert len(build_cover(5.0, dv=2.5, dt=0.5, t_fin=3.0)) == report.n_subdomains


def test_padded_grid_is_centered() -> None:
    spec = CoverSpec(v_max=5.0, dv=0.7, dt=0.02, t_fin=3.0)
    assert spec.n_axis == 15
    assert spec.pad == pytest.approx(0.25)
    assert spec.n_bins == 150
    cells = retained_cells(spec)
    # the corners of the cube are far outside the speed ball
    assert 0 not in cells
    assert spec.n_cells_total - 1 not in cells
    assert spec.locate(np.zeros(3)) in cells


@pytest.mark.parametrize(
    "t_lo, t_hi, expected",
    [
        (0.5, 1.0, [1]),
        (0.4, 1.1, [0, 1, 2]),
        (0.0, 0.0, [0]),
        (3.0, 3.0, [5]),
        (0.0, 3.0, [0, 1, 2, 3, 4, 5]),
    ],
)
def test_bins_overlapping(coarse_spec: CoverSpec, t_lo, t_hi, expected) -> None:
    assert list(coarse_spec.bins_overlapping(t_lo, t_hi)) == expected


@pytest.mark.parametrize(
    "k_v",
    [(0.0, 0.0, 0.0), (4.9, 0.0, 0.0), (-2.0, 3.0, 1.0), (2.8, 2.8, 2.8), (5.5, 0.0, 0.0), (3.5, -3.5, 3.5)],
)
def test_peak_velocities_obey_the_limits(k_v) -> None:
    peaks = feasible_peak_vels(np.array(k_v), t_pk=1.0, a_max=3.0, v_max=5.0)
    assert peaks.shape == (8, 3)
    assert np.all(np.linalg.norm(peaks - np.array(k_v), axis=-1) <= 3.0 + 1e-9)
    assert np.all(np.linalg.norm(peaks, axis=-1) <= 5.0 + 1e-9)


def test_unreachable_peaks_move_onto_the_ball() -> None:
    k_v = np.array([5.5, 0.0, 0.0])
    peaks = feasible_peak_vels(k_v, t_pk=1.0, a_max=3.0, v_max=5.0)
    outward = SIGNS[:, 0] > 0
    np.testing.assert_allclose(peaks[outward], np.tile([5.0, 0.0, 0.0], (4, 1)))
    assert np.all(peaks[~outward, 0] < 5.0)
    assert count_clamped_peaks(k_v, t_pk=1.0, a_max=3.0, v_max=5.0) == 4
    assert count_clamped_peaks(np.array([[4.9, 0.0, 0.0], [0.0, 0.0, 0.0]]), 1.0, 3.0, 5.0) == 0


def test_peak_velocities_from_rest() -> None:
    peaks = feasible_peak_vels(np.zeros(3), t_pk=1.0, a_max=3.0, v_max=5.0)
    np.testing.assert_allclose(np.abs(peaks), np.sqrt(3.0))
    assert len({tuple(np.sign(p)) for p in peaks}) == 8


def test_error_box() -> None:
    box = ErrorBox(np.array([-0.1, -0.2, 0.0]), np.array([0.1, 0.0, 0.3]))
    np.testing.assert_allclose(box.center, [0.0, -0.1, 0.15])
    assert box.contains([0.0, -0.1, 0.3])
    assert not box.contains([0.0, 0.1, 0.0])
    hull = box.hull(ErrorBox.symmetric(0.15))
    np.testing.assert_allclose(hull.lo, [-0.15, -0.2, -0.15])
    np.testing.assert_allclose(hull.hi, [0.15, 0.15, 0.3])


def test_query_is_piecewise_constant(coarse_spec: CoverSpec) -> None:
    table = make_uniform_table(coarse_spec)
    row = int(table.row_of(np.array([1.0, 1.0, 1.0])))
    table.hi[2, row] = 0.4
    assert np.all(query(table, 1.2, [1.0, 1.0, 1.0]).hi == 0.4)
    assert np.all(query(table, 1.4, [0.2, 2.4, 0.1]).hi == 0.4)
    assert np.all(query(table, 0.9, [1.0, 1.0, 1.0]).hi == 0.1)
    assert np.all(query(table, 1.2, [-1.0, 1.0, 1.0]).hi == 0.1)
    with pytest.raises(TrajectoryError):
        query(table, 3.5, [0.0, 0.0, 0.0])


def test_interval_query_takes_the_hull(coarse_spec: CoverSpec) -> None:
    table = make_uniform_table(coarse_spec)
    row = int(table.row_of(np.zeros(3)))
    table.lo[1, row, 0] = -0.3
    table.hi[2, row, 2] = 0.5
    box = error_box_for_interval(table, 0.9, 1.1, np.zeros(3))
    np.testing.assert_allclose(box.lo, [-0.3, -0.1, -0.1])
    np.testing.assert_allclose(box.hi, [0.1, 0.1, 0.5])
    inner = error_box_for_interval(table, 0.6, 0.9, np.zeros(3))
    np.testing.assert_allclose(inner.hi, [0.1, 0.1, 0.1])
    assert max_error_extent(table) == pytest.approx(0.5)


def test_discarded_cells_use_the_nearest_retained_cell() -> None:
    spec = CoverSpec(v_max=5.0, dv=0.7, dt=0.5, t_fin=3.0)
    table = make_uniform_table(spec)
    corner = np.full(3, -5.0)
    row = int(table.row_of(corner))
    assert 0 <= row < len(table.cells)
    center = spec.cell_lo(table.cells[row]) + 0.5 * spec.dv
    assert np.all(center < 0.0)


def test_table_shape_is_checked(coarse_spec: CoverSpec) -> None:
    table = make_uniform_table(coarse_spec)
    with pytest.raises(TableBuildError):
        type(table)(coarse_spec, table.cells, table.lo[:-1], table.hi[:-1])


def test_table_file(tmp_path, coarse_spec: CoverSpec) -> None:
    table = make_uniform_table(coarse_spec, half_side=0.2)
    table.hi[3, 5, 1] = 0.7
    path = str(tmp_path / "error_table.v1.bin")
    save_table(table, path)
    assert (tmp_path / "error_table.v1.bin.json").is_file()
    loaded = load_table(path, expected_hash="test")
    assert loaded.spec == coarse_spec
    np.testing.assert_array_equal(loaded.cells, table.cells)
    np.testing.assert_array_equal(loaded.lo, table.lo)
    np.testing.assert_array_equal(loaded.hi, table.hi)
    assert loaded.metadata.max_abs_error == pytest.approx(0.2)


def test_table_file_errors(tmp_path, coarse_spec: CoverSpec) -> None:
    path = str(tmp_path / "error_table.v1.bin")
    with pytest.raises(ArtifactError):
        load_table(path)
    save_table(make_uniform_table(coarse_spec), path)
    with pytest.raises(ArtifactError):
        load_table(path, expected_hash="another config")
    assert load_table(path, expected_hash="another config", force=True).spec == coarse_spec
    with open(path, "rb") as f:
        data = f.read()
    with open(path, "wb") as f:
        f.write(data[:-8])
    with pytest.raises(ArtifactError):
        load_table(path)
    with open(path, "wb") as f:
        f.write(data[:20])
    with pytest.raises(ArtifactError):
        load_table(path)


def test_compute_table_bounds_the_replayed_errors(timing, limits, params, gains) -> None:
    spec = CoverSpec(v_max=1.0, dv=2.0, dt=0.5, t_fin=timing.t_fin)
    table = compute_table(spec, params, gains, timing, limits, sim_dt=0.01, slack=0.002, config_hash="abc")
    assert len(table.cells) == 1
    assert table.metadata.n_simulations == 64
    # every vertex lies outside the speed ball, and only the inward diagonal reaches it
    assert table.metadata.n_clamped_peaks == 56
    assert table.metadata.config_hash == "abc"
    assert np.all(table.lo < table.hi)
    start = query(table, 0.0, np.zeros(3))
    assert start.contains(np.zeros(3))
    job = make_job(spec, [[1.0, -1.0, 1.0]], params, gains, timing, limits, sim_dt=0.01)
    for t, e_x in replay_errors(job):
        box = query(table, min(t, timing.t_fin), np.zeros(3))
        for e in e_x.reshape(-1, 3):
            if not box.contains(e):
                # samples on a bin boundary belong to the previous bin too
                assert query(table, max(t - 1e-6, 0.0), np.zeros(3)).contains(e)


def test_compute_table_needs_fine_steps(timing, limits, params, gains, coarse_spec) -> None:
    with pytest.raises(TableBuildError):
        compute_table(coarse_spec, params, gains, timing, limits, sim_dt=1.0)


@pytest.mark.parametrize(
    "gains, speeds, kappa",
    [
        (FeedbackGains(), Interval(-1.0, 1.0), TrajParam1D(0.0, 0.0, 2.0)),
        (FeedbackGains(kp=-9.0, kd=-2.0), Interval(0.5, 3.0), TrajParam1D(1.0, 2.0, -1.0)),
    ],
)
def test_error_peaks_at_extreme_speeds(gains, speeds, kappa, timing) -> None:
    report = endpoint_experiment(gains, speeds, kappa, timing, n_speeds=7, n_times=16)
    assert report.holds
    assert report.errors.shape == (7, 16)
    assert report.argmax_speeds.shape == (16,)
