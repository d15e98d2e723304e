# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .augment import AugmentedFRS, error_augment, slice_position_boxes
from .basic_types import (
    ConstraintSet,
    InitialCondition,
    Obstacle,
    Plan,
    PlannerError,
    PlanningStats,
    PlanResult,
    UnsafeBoxSet,
)
from .constraints import generate_constraints, is_safe, safe_mask
from .error_models import ConstantErrorModel, ErrorModel, TableErrorModel, error_box_for_step
from .intersect import intersect_all, intersect_obs
from .iteration import PlannerSettings, initial_condition, initial_condition_at, plan_controller, plan_iteration
from .optimize import OptimizerSettings, ball_samples, optimize, waypoint_cost
from .sensing import boundary_slabs, sense_obstacles
