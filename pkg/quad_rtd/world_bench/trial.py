# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import csv
import logging
from typing import NamedTuple, Optional

import numpy as np

from ..dynamics.basic_types import QuadState, SimulationDiverged
from ..dynamics.quad_sim import integrate
from ..frs.basic_types import TimedFRS
from ..geometry.basic_types import Box3
from ..helpers.file_ops import ensure_parent_dir
from ..planner.basic_types import Plan
from ..planner.error_models import ErrorModel
from ..planner.iteration import PlannerSettings, initial_condition_at, plan_controller, plan_iteration
from .basic_types import TrialOutcome, TrialResult, TrialTrace, World
from .world import collision_mask

logger = logging.getLogger(__name__)

REST_SPEED = 0.05
TIME_TOL = 1e-9
TRACE_HEADER = ("t", "x1", "x2", "x3", "ref1", "ref2", "ref3")
TUBE_HEADER = ("plan_t", "step", "lo1", "lo2", "lo3", "hi1", "hi2", "hi3")


class TrialSettings(NamedTuple):
    planner: PlannerSettings = PlannerSettings()
    goal_radius: float = 1.5
    max_sim_time: float = 120.0
    fail_safe_limit: int = 3


class _Segment(NamedTuple):
    t: np.ndarray
    states: list[QuadState]
    diverged: bool


def _execute(state: QuadState, plan: Plan, t: float, settings: PlannerSettings) -> _Segment:
    """Track the plan for t_plan of simulated time. The first sample is the given state."""
    p = settings.params
    times, states = [], []
    try:
        for ts, s in integrate(
            state, plan_controller(plan, settings.gains, p), (t, t + settings.timing.t_plan), settings.sim_dt, p
        ):
            times.append(ts)
            states.append(s)
    except SimulationDiverged as ex:
        logger.warning(f"Simulation diverged while tracking a plan: {ex}")
        return _Segment(np.asarray(times), states, diverged=True)
    return _Segment(np.asarray(times), states, diverged=False)


def run_trial(
    world: World,
    frs: TimedFRS,
    model: ErrorModel,
    settings: TrialSettings = TrialSettings(),
    keep_trace: bool = True,
) -> TrialResult:
    """
    Receding-horizon flight from start to goal.
    Each iteration executes the current plan for t_plan and plans the next one from where the robot ends up,
    which is exactly the state the planner predicts while the current plan runs.
    """
    ps = settings.planner
    body = ps.body
    plan = Plan.hover(world.start, ps.timing)
    state = QuadState.at_rest(world.start)
    t = 0.0

    times, positions, refs = [np.array([t])], [state.x[None]], [plan.reference(t).pos[None]]
    tubes: list[tuple[float, tuple[Box3, ...]]] = []
    peak_speed, planning_seconds = 0.0, []
    n_fail_safe = streak = 0
    outcome: Optional[TrialOutcome] = None

    while outcome is None:
        if np.linalg.norm(state.x - world.goal) <= settings.goal_radius:
            outcome = TrialOutcome.goal
            break
        if t >= settings.max_sim_time - TIME_TOL:
            outcome = TrialOutcome.timeout
            break

        segment = _execute(state, plan, t, ps)
        seg_x = np.array([s.x for s in segment.states[1:]]).reshape(-1, 3)
        seg_v = np.array([s.v for s in segment.states[1:]]).reshape(-1, 3)
        crashed = collision_mask(seg_x, world, body)
        n_keep = int(np.argmax(crashed)) + 1 if np.any(crashed) else len(seg_x)
        seg_t = segment.t[1 : n_keep + 1]
        times.append(seg_t)
        positions.append(seg_x[:n_keep])
        refs.append(np.array([plan.reference(ts - plan.created_at).pos for ts in seg_t]).reshape(-1, 3))
        if n_keep:
            peak_speed = max(peak_speed, float(np.linalg.norm(seg_v[:n_keep], axis=1).max()))
        if np.any(crashed) or segment.diverged:
            outcome = TrialOutcome.crash
            logger.warning(f"World {world.seed}: collision at t={seg_t[-1] if len(seg_t) else t:.3f} s.")
            break

        final, t_next = segment.states[-1], t + ps.timing.t_plan
        ic = initial_condition_at(final, plan, t_next, ps)
        result = plan_iteration(
            state, t, world.obstacles, world.goal, plan, frs, model, ps, bounds=world.bounds, predicted=(ic, final)
        )
        planning_seconds.append(result.stats.total_seconds)
        state, t = final, t_next
        if result.plan is not None:
            plan, streak = result.plan, 0
            tubes.append((t, result.tube))
        else:
            n_fail_safe += 1
            streak += 1
            if streak >= settings.fail_safe_limit and np.linalg.norm(state.v) < REST_SPEED:
                outcome = TrialOutcome.fail_safe_stop

    assert outcome is not None
    x = np.concatenate(positions)
    trace = TrialTrace(t=np.concatenate(times), x=x, ref=np.concatenate(refs), tubes=tuple(tubes))
    logger.info(f"World {world.seed} ({model.mode}): {outcome.value} after {t:.2f} s and {len(planning_seconds)} plans.")
    return TrialResult(
        seed=world.seed,
        mode=model.mode,
        outcome=outcome,
        distance=float(np.sum(np.linalg.norm(np.diff(x, axis=0), axis=1))),
        peak_speed=peak_speed,
        n_iterations=len(planning_seconds),
        n_fail_safe=n_fail_safe,
        sim_time=t,
        mean_planning_seconds=float(np.mean(planning_seconds)) if planning_seconds else 0.0,
        max_planning_seconds=float(np.max(planning_seconds)) if planning_seconds else 0.0,
        trace=trace if keep_trace else None,
    )


def write_trace(trace: TrialTrace, path: str) -> None:
    with open(ensure_parent_dir(path), "w", newline="", encoding="utf8") as f:
        writer = csv.writer(f)
        writer.writerow(TRACE_HEADER)
        writer.writerows(np.column_stack([trace.t, trace.x, trace.ref]).tolist())


def write_tubes(trace: TrialTrace, path: str) -> None:
    with open(ensure_parent_dir(path), "w", newline="", encoding="utf8") as f:
        writer = csv.writer(f)
        writer.writerow(TUBE_HEADER)
        for plan_t, tube in trace.tubes:
            for step, box in enumerate(tube):
                writer.writerow([plan_t, step, *box.lo.tolist(), *box.hi.tolist()])
