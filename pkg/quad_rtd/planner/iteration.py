# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import json
import logging
import os
import time
from collections.abc import Sequence
from typing import Any, NamedTuple, Optional

import numpy as np

from ..dynamics.basic_types import Gains, QuadParams, QuadState, SimulationDiverged
from ..dynamics.controller import Controller
from ..dynamics.quad_sim import integrate
from ..dynamics.rotors import saturate
from ..frs.basic_types import TimedFRS
from ..geometry.basic_types import Box3
from ..helpers.consts import E3
from ..helpers.file_ops import ensure_parent_dir
from ..trajectory.basic_types import SpeedLimits, TrajParam, TrajTiming
from ..trajectory.spline import ref_arrays
from .augment import AugmentedFRS, error_augment, slice_inside, slice_position_boxes
from .basic_types import InitialCondition, Obstacle, Plan, PlanningStats, PlanResult
from .constraints import generate_constraints
from .error_models import ErrorModel
from .intersect import intersect_all
from .optimize import OptimizerSettings, optimize, waypoint_cost
from .sensing import sense_obstacles

logger = logging.getLogger(__name__)

SPEED_TOL = 1e-6
REPLAY_SAMPLES = 5


class PlannerSettings(NamedTuple):
    params: QuadParams = QuadParams()
    gains: Gains = Gains.scalar()
    body: Box3 = Box3.cube((0.0, 0.0, 0.0), 0.54)
    timing: TrajTiming = TrajTiming()
    limits: SpeedLimits = SpeedLimits()
    d_sense: float = 12.0
    waypoint_distance: float = 5.0
    n_samples: int = 10_000
    batch_size: int = 512
    deterministic: bool = True
    sim_dt: float = 0.005
    debug_dir: Optional[str] = None

    @property
    def optimizer(self) -> OptimizerSettings:
        return OptimizerSettings(self.timing, self.limits, self.n_samples, self.batch_size, self.deterministic)

    @property
    def budget(self) -> float:
        return self.timing.t_plan


def plan_controller(plan: Plan, gains: Gains, p: QuadParams) -> Controller:
    """Controller tracking a plan on the simulation clock."""
    return Controller(lambda t: plan.reference(t - plan.created_at), gains, p)


def predict_state(
    state: QuadState,
    plan: Plan,
    t_now: float,
    horizon: float,
    gains: Gains,
    p: QuadParams,
    dt: float,
) -> QuadState:
    s = state
    for _, s in integrate(state, plan_controller(plan, gains, p), (t_now, t_now + horizon), dt, p):
        pass
    return s


def thrust_acceleration(s: QuadState, plan: Plan, t: float, gains: Gains, p: QuadParams) -> np.ndarray:
    """(tau / m) R e3 - g e3 with the saturated thrust the controller commands at state s."""
    u = saturate(plan_controller(plan, gains, p)(t, s), p)
    return float(u.tau) / p.mass * (s.R @ E3) - p.gravity * E3


def initial_condition_at(state: QuadState, plan: Plan, t: float, settings: PlannerSettings) -> InitialCondition:
    """Initial condition of a plan starting at state, while the robot is tracking plan at time t."""
    k_a = thrust_acceleration(state, plan, t, settings.gains, settings.params)
    return InitialCondition(k_v=state.v.copy(), k_a=k_a, x0=state.x.copy())


def initial_condition(
    state: QuadState,
    prev_plan: Plan,
    t_now: float,
    settings: PlannerSettings = PlannerSettings(),
) -> Optional[tuple[InitialCondition, QuadState]]:
    """
    Forward-simulate the closed loop on the previous plan for t_plan.
    Returns the initial condition of the next plan and the predicted state, or None if the prediction diverged.
    """
    t_start = t_now + settings.timing.t_plan
    try:
        predicted = predict_state(
            state, prev_plan, t_now, settings.timing.t_plan, settings.gains, settings.params, settings.sim_dt
        )
    except SimulationDiverged as ex:
        logger.warning(f"Prediction failed: {ex}")
        return None
    return initial_condition_at(predicted, prev_plan, t_start, settings), predicted


def waypoint_towards(x0, goal, distance: float) -> np.ndarray:
    x0, goal = np.asarray(x0, dtype=float), np.asarray(goal, dtype=float)
    gap = goal - x0
    length = float(np.linalg.norm(gap))
    if length <= distance:
        return goal
    return x0 + gap * (distance / length)


def replay_violations(zeps: AugmentedFRS, k: TrajParam, obstacles: Sequence[Obstacle]) -> list[int]:
    """
    Steps whose sampled reference positions, inflated by the error and body boxes, touch an obstacle.
    Positions and obstacles are relative to the plan start.
    """
    arrays = zeps.arrays
    bad = []
    for idx in range(arrays.n_steps):
        t = np.linspace(arrays.t_lo[idx], arrays.t_hi[idx], REPLAY_SAMPLES)
        pos = ref_arrays(t, k.k_v, k.k_a, k.k_pk, zeps.frs.timing).pos
        lo = pos + zeps.err_lo[idx] + zeps.body.lo
        hi = pos + zeps.err_hi[idx] + zeps.body.hi
        for o in obstacles:
            if np.any(np.all((lo <= o.hi) & (hi >= o.lo), axis=-1)):
                bad.append(idx)
                break
    return bad


def dump_debug(path: str, payload: dict[str, Any]) -> None:
    with open(ensure_parent_dir(path), "w", encoding="utf8") as f:
        json.dump(payload, f, indent=2)


def _initial_condition_fits(ic: InitialCondition, frs: TimedFRS, limits: SpeedLimits) -> bool:
    return (
        bool(np.all(np.isfinite(ic.k_v)) and np.all(np.isfinite(ic.k_a)))
        and float(np.linalg.norm(ic.k_v)) <= limits.v_max + SPEED_TOL
        and slice_inside(frs.arrays, ic.k_v, ic.k_a)
    )


def plan_iteration(
    state: QuadState,
    t_now: float,
    obstacles: Sequence[Obstacle],
    goal,
    prev_plan: Plan,
    frs: TimedFRS,
    model: ErrorModel,
    settings: PlannerSettings = PlannerSettings(),
    bounds: Optional[Box3] = None,
    predicted: Optional[tuple[InitialCondition, QuadState]] = None,
) -> PlanResult:
    """
    One receding-horizon iteration. The new plan starts t_plan after t_now, where the robot is predicted to be.
    Returns no plan when the robot must keep executing prev_plan.
    """
    started = time.perf_counter()
    stats = PlanningStats()
    if predicted is None:
        predicted = initial_condition(state, prev_plan, t_now, settings)
    if predicted is None:
        stats.failure = "prediction diverged"
        return PlanResult(None, stats)
    ic, _ = predicted
    if not _initial_condition_fits(ic, frs, settings.limits):
        stats.failure = "initial condition outside the reachable set"
        logger.debug(f"No plan at t={t_now:.3f}: k_v={ic.k_v}, k_a={ic.k_a} outside the FRS.")
        return PlanResult(None, stats)

    sensed = sense_obstacles(ic.x0, obstacles, settings.d_sense, bounds)
    stats.n_obstacles = len(sensed)

    tick = time.perf_counter()
    zeps = error_augment(frs, model, ic.k_v, settings.body)
    arrays = zeps.arrays
    stats.augment_seconds = time.perf_counter() - tick

    tick = time.perf_counter()
    constraints = generate_constraints(intersect_all(arrays, sensed, ic.k_v, ic.k_a))
    stats.n_constraint_blocks = constraints.n_blocks
    stats.intersect_seconds = time.perf_counter() - tick

    tick = time.perf_counter()
    target = waypoint_towards(ic.x0, goal, settings.waypoint_distance) - ic.x0
    result = optimize(
        waypoint_cost(ic.k_v, ic.k_a, settings.timing, target),
        constraints,
        ic.k_v,
        ic.k_a,
        settings.budget,
        settings.optimizer,
        started=started,
    )
    stats.optimize_seconds = time.perf_counter() - tick
    stats.n_feasible_samples = result.n_feasible
    stats.n_checked_samples = result.n_checked

    plan: Optional[Plan] = None
    tube: tuple[Box3, ...] = ()
    if result.k_pk is not None:
        k = TrajParam.from_state(ic.k_v, ic.k_a, result.k_pk)
        plan = Plan(k, settings.timing, ic.x0, created_at=t_now + settings.timing.t_plan)
        tube = tuple(box.translated(ic.x0) for box in slice_position_boxes(zeps, k))
    else:
        stats.failure = "timed out" if result.timed_out else "no safe sample"

    logger.debug(
        f"Planned at t={t_now:.3f}: {stats.n_obstacles} obstacles, {stats.n_constraint_blocks} constraints, "
        f"{stats.total_seconds * 1000:.1f} ms, {'found' if plan else stats.failure}."
    )
    if settings.debug_dir:
        _debug_iteration(settings.debug_dir, t_now, sensed, stats, zeps, plan)
    return PlanResult(plan, stats, tube)


def _debug_iteration(
    debug_dir: str,
    t_now: float,
    sensed: Sequence[Obstacle],
    stats: PlanningStats,
    zeps: AugmentedFRS,
    plan: Optional[Plan],
) -> None:
    violations = replay_violations(zeps, plan.k, sensed) if plan else []
    if violations:
        logger.warning(f"Replay of the plan made at t={t_now:.3f} touches obstacles at steps {violations}.")
    dump_debug(
        os.path.join(debug_dir, f"iteration-{round(t_now * 1000):08d}.json"),
        {
            "t": t_now,
            "obstacles": [o.to_json() for o in sensed],
            "n_constraint_blocks": stats.n_constraint_blocks,
            "n_feasible_samples": stats.n_feasible_samples,
            "n_checked_samples": stats.n_checked_samples,
            "k_pk": plan.k.k_pk.tolist() if plan else None,
            "fail_safe": plan is None,
            "replay_violations": violations,
        },
    )
