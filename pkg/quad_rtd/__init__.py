# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Reachability-based trajectory design for a quadrotor.

Offline, the package bounds the tracking error of a geometric controller over a cover of initial velocities
and computes a zonotope reachable set of a piecewise-polynomial trajectory model.
Online, it plans by intersecting that set with sensed obstacles and sampling safe peak velocities.
"""
