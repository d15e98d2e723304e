# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .basic_types import FrsArrays, FrsError, TimedFRS, TimedZonotope, structured_coefficients
from .frs_file import load_frs, save_frs
from .reach import bounds_from_box, initial_set_1d, reach_1d, reach_3d, step_grid, step_remainders
