# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import numpy as np
import pytest

from quad_rtd.dynamics.basic_types import Gains, QuadParams
from quad_rtd.frs.reach import reach_3d
from quad_rtd.tracking_error.basic_types import CoverSpec, TableMetadata
from quad_rtd.tracking_error.cover import retained_cells
from quad_rtd.tracking_error.table import TrackingErrorTable, compute_table
from quad_rtd.trajectory.basic_types import ParamBounds, SpeedLimits, TrajTiming


@pytest.fixture(scope="session")
def timing() -> TrajTiming:
    return TrajTiming()


@pytest.fixture(scope="session")
def limits() -> SpeedLimits:
    return SpeedLimits()


@pytest.fixture(scope="session")
def params() -> QuadParams:
    return QuadParams()


@pytest.fixture(scope="session")
def gains() -> Gains:
    return Gains.scalar()


@pytest.fixture(scope="session")
def frs(timing):
    """Reachable set on a coarse time grid, enough for the planner tests."""
    return reach_3d(ParamBounds(), timing, dt=0.1, n_samples=16)


@pytest.fixture(scope="session")
def fine_frs(timing):
    return reach_3d(ParamBounds(), timing, dt=0.02, n_samples=32)


def make_uniform_table(spec: CoverSpec, half_side: float = 0.1) -> TrackingErrorTable:
    cells = retained_cells(spec)
    shape = (spec.n_bins, len(cells), 3)
    return TrackingErrorTable(
        spec=spec,
        cells=np.array(cells),
        lo=np.full(shape, -half_side),
        hi=np.full(shape, half_side),
        metadata=TableMetadata(max_abs_error=half_side, config_hash="test"),
    )


@pytest.fixture
def coarse_spec() -> CoverSpec:
    return CoverSpec(v_max=5.0, dv=2.5, dt=0.5, t_fin=3.0)


@pytest.fixture(scope="session")
def coarse_table(params, gains, timing, limits) -> TrackingErrorTable:
    """Error table computed by simulation on a coarse cover."""
    return compute_table(CoverSpec(v_max=5.0, dv=2.5, dt=0.1, t_fin=3.0), params, gains, timing, limits)
