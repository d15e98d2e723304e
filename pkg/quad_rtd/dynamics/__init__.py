# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from .basic_types import DynamicsError, Gains, QuadParams, QuadState, SimulationDiverged, StateError, Wrench
from .controller import Controller, control, desired_attitude
from .quad_sim import Integrator, SimTrace, dynamics, integrate, simulate, step_lie_euler, step_rkmk4
from .rotors import rotors_to_wrench, saturate, wrench_to_rotors
from .so3 import expm_so3, hat, reorthonormalize, vee
