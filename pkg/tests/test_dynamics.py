# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from quad_rtd.dynamics import (
    Controller,
    DynamicsError,
    Gains,
    Integrator,
    QuadParams,
    QuadState,
    SimulationDiverged,
    Wrench,
    expm_so3,
    hat,
    reorthonormalize,
    rotors_to_wrench,
    saturate,
    simulate,
    vee,
    wrench_to_rotors,
)
from quad_rtd.dynamics.controller import attitude_from_thrust
from quad_rtd.dynamics.experiments import compare_integrators, reference_fn, track_trajectory
from quad_rtd.dynamics.so3 import orthonormality_error
from quad_rtd.trajectory import RefPoint, TrajParam, TrajTiming

vectors = st.lists(st.floats(-3.0, 3.0), min_size=3, max_size=3).map(np.array)


@given(vectors, vectors)
def test_hat_is_cross_product(v, w) -> None:
    np.testing.assert_allclose(hat(v) @ w, np.cross(v, w), atol=1e-12)
    np.testing.assert_allclose(vee(hat(v)), v)


def test_vee_rejects_non_skew() -> None:
    with pytest.raises(DynamicsError):
        vee(np.eye(3))


@given(vectors)
def test_rodrigues_matches_matrix_exponential(w) -> None:
    R = expm_so3(w)
    np.testing.assert_allclose(R, scipy.linalg.expm(hat(w)), atol=1e-10)
    assert orthonormality_error(R) < 1e-10


def test_small_angle_exponential() -> None:
    w = np.array([1e-8, -2e-8, 3e-8])
    np.testing.assert_allclose(expm_so3(w), np.eye(3) + hat(w), atol=1e-15)


def test_reorthonormalize_projects_back() -> None:
    R = expm_so3(np.array([0.3, -0.2, 0.1])) + 1e-4
    fixed = reorthonormalize(R)
    assert orthonormality_error(fixed) < 1e-12
    assert np.linalg.det(fixed) == pytest.approx(1.0)


def test_params_validation() -> None:
    with pytest.raises(DynamicsError):
        QuadParams(mass=-1.0)
    with pytest.raises(DynamicsError):
        QuadParams(rotor_min=9000.0)
    with pytest.raises(DynamicsError):
        Gains.scalar(gx=0.0)


def test_mixer_round_trip() -> None:
    p = QuadParams()
    u = Wrench(tau=np.array(p.hover_thrust), mu=np.array([1e-3, -2e-3, 5e-4]))
    speeds = wrench_to_rotors(u, p)
    assert np.all((speeds >= p.rotor_min) & (speeds <= p.rotor_max))
    back = rotors_to_wrench(speeds, p)
    assert back.tau == pytest.approx(u.tau)
    np.testing.assert_allclose(back.mu, u.mu, atol=1e-12)


def test_saturation_caps_thrust() -> None:
    p = QuadParams()
    capped = saturate(Wrench(tau=np.array(1000.0), mu=np.zeros(3)), p)
    assert capped.tau == pytest.approx(p.max_thrust)
    floor = saturate(Wrench(tau=np.array(0.0), mu=np.zeros(3)), p)
    assert floor.tau == pytest.approx(4.0 * p.k_tau * p.rotor_min**2)


def test_attitude_from_thrust_holds_previous_when_degenerate() -> None:
    prev = expm_so3(np.array([0.0, 0.2, 0.0]))
    R_des, degenerate = attitude_from_thrust(np.zeros(3), prev)
    assert degenerate
    np.testing.assert_array_equal(R_des, prev)
    R_des, degenerate = attitude_from_thrust(np.array([0.0, 0.0, 5.0]))
    assert not degenerate
    np.testing.assert_allclose(R_des, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("method", list(Integrator))
def test_hover_is_an_equilibrium(method: Integrator) -> None:
    p = QuadParams()
    hold = Controller(lambda t: RefPoint.rest(), Gains.scalar(), p)
    trace = simulate(QuadState.at_rest(), hold, (0.0, 1.0), dt=0.01, p=p, method=method)
    assert len(trace.t) == 101
    np.testing.assert_allclose(trace.states.x, 0.0, atol=1e-9)
    np.testing.assert_allclose(trace.final.v, 0.0, atol=1e-9)


def test_batched_states_match_single_runs() -> None:
    p, gains, timing = QuadParams(), Gains.scalar(), TrajTiming()
    k = TrajParam(k_v=[1.0, 0.0, 0.0], k_a=[0.0, 0.0, 0.0], k_pk=[2.0, -1.0, 0.5])
    single = track_trajectory(k, timing, gains, p, dt=0.01)
    batched = simulate(
        QuadState.at_rest(x=np.zeros((2, 3)), v=k.k_v),
        Controller(reference_fn(k, timing), gains, p),
        (0.0, timing.t_fin),
        dt=0.01,
        p=p,
    )
    np.testing.assert_allclose(batched.states.x[:, 1], single.states.x, atol=1e-9)


def test_divergence_is_reported() -> None:
    p = QuadParams()

    def broken(t: float, s: QuadState) -> Wrench:
        return Wrench(tau=np.array(np.nan), mu=np.zeros(3))

    with pytest.raises(SimulationDiverged) as err:
        simulate(QuadState.at_rest(), broken, (0.0, 0.1), dt=0.01, p=p)
    assert err.value.step == 1


def test_tracking_stays_close_to_the_reference() -> None:
    p, gains, timing = QuadParams(), Gains.scalar(), TrajTiming()
    k = TrajParam(k_v=[0.0, 0.0, 0.0], k_a=[0.0, 0.0, 0.0], k_pk=[2.0, 1.0, 0.0])
    trace = track_trajectory(k, timing, gains, p, dt=0.005)
    ref = reference_fn(k, timing)
    errors = [np.linalg.norm(s_x - ref(t).pos) for t, s_x in zip(trace.t, trace.states.x)]
    assert max(errors) < 0.2


def test_integrators_agree() -> None:
    k = TrajParam(k_v=[1.0, 0.0, 0.0], k_a=[0.0, 1.0, 0.0], k_pk=[3.0, -1.0, 1.0])
    report = compare_integrators([k], QuadParams(), Gains.scalar(), TrajTiming(), dt=0.005)
    assert report.n_samples == 1
    assert np.all(report.max_gap < 0.005)
    assert "trajectories: 1" in report.describe()
