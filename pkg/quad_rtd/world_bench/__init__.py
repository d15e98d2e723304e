# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .basic_types import BenchmarkReport, TrialOutcome, TrialResult, TrialTrace, World, WorldSettings
from .bench import BenchContext, run_benchmark, write_reports
from .trial import TrialSettings, run_trial, write_trace, write_tubes
from .world import collision_check, collision_mask, generate_world, world_bounds
