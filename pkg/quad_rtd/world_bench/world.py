# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import logging

import numpy as np

from ..geometry.basic_types import Box3
from .basic_types import World, WorldSettings

logger = logging.getLogger(__name__)

MAX_DRAWS_PER_OBSTACLE = 100
END_FRACTION = 0.1


def world_bounds(size: tuple[float, float, float]) -> Box3:
    """Long axis along x from 0, centered across y, floor at z = 0."""
    length, width, height = size
    return Box3.from_bounds((0.0, -0.5 * width, 0.0), (length, 0.5 * width, height))


def _endpoint(rng: np.random.Generator, bounds: Box3, x_range: tuple[float, float], margin: float) -> np.ndarray:
    return np.array(
        [
            rng.uniform(*x_range),
            rng.uniform(bounds.lo[1] + margin, bounds.hi[1] - margin),
            rng.uniform(bounds.lo[2] + margin, bounds.hi[2] - margin),
        ]
    )


def generate_world(seed: int, settings: WorldSettings = WorldSettings()) -> World:
    """
    Uniformly placed boxes with uniform side lengths, start near x = 0 and goal near the far end.
    Obstacles keep the given clearance from the body at the start and the goal.
    """
    rng = np.random.default_rng(seed)
    bounds = world_bounds(settings.size)
    length = settings.size[0]
    margin = 0.5 * settings.body_width + settings.clearance
    start = _endpoint(rng, bounds, (margin, END_FRACTION * length), margin)
    goal = _endpoint(rng, bounds, ((1.0 - END_FRACTION) * length, length - margin), margin)
    keep_out = [Box3.cube(p, settings.body_width + 2.0 * settings.clearance) for p in (start, goal)]

    side_lo, side_hi = settings.obstacle_sides
    obstacles: list[Box3] = []
    for _ in range(MAX_DRAWS_PER_OBSTACLE * settings.n_obstacles):
        if len(obstacles) == settings.n_obstacles:
            break
        half = 0.5 * np.minimum(rng.uniform(side_lo, side_hi, 3), 2.0 * bounds.half_extents)
        center = rng.uniform(bounds.lo + half, bounds.hi - half)
        candidate = Box3(center=center, half_extents=half)
        if not any(candidate.intersects(zone) for zone in keep_out):
            obstacles.append(candidate)
    if len(obstacles) < settings.n_obstacles:
        logger.warning(f"Placed only {len(obstacles)} of {settings.n_obstacles} obstacles in world {seed}.")
    return World(bounds=bounds, obstacles=tuple(obstacles), start=start, goal=goal, seed=seed)


def collision_mask(points, world: World, body: Box3) -> np.ndarray:
    """For every robot position: whether the body touches an obstacle or leaves the world."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    lo, hi = pts + body.lo, pts + body.hi
    outside = np.any(lo < world.bounds.lo, axis=1) | np.any(hi > world.bounds.hi, axis=1)
    obs_lo, obs_hi = world.obstacle_bounds
    touching = (lo[:, None, :] <= obs_hi[None]) & (hi[:, None, :] >= obs_lo[None])
    return outside | np.any(np.all(touching, axis=-1), axis=-1)


def collision_check(x, world: World, body: Box3) -> bool:
    return bool(collision_mask(x, world, body)[0])
