# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

from typing import Final

import numpy as np

GRAVITY: Final[float] = 9.81
E3: Final[np.ndarray] = np.array([0.0, 0.0, 1.0])
THIS_PACKAGE: Final[str] = __name__.split(".")[0]
CFG_COMMENT: Final[str] = "#"
CFG_ASSIGN: Final[str] = "="
# Slack added to every measured tracking-error box to absorb Euler vs RK-MK4 drift.
INTEGRATION_SLACK: Final[float] = 0.002
