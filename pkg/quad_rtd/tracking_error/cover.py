# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import functools
import itertools
import logging

import numpy as np

from .basic_types import CoverReport, CoverSpec, Subdomain

logger = logging.getLogger(__name__)

SIGNS = np.array(list(itertools.product((-1.0, 1.0), repeat=3)))
# Offsets of the eight vertices of a cell in grid units.
VERTEX_OFFSETS = np.array(list(itertools.product((0, 1), repeat=3)))
# Expected cardinality of the cover at the default parameters (v_max 5, dv 0.7, dt 0.02, t_fin 3).
REFERENCE_SUBDOMAINS = 102_900


@functools.cache
def retained_cells(spec: CoverSpec) -> np.ndarray:
    """Flat indices of the cells whose nearest point to the origin lies within v_max."""
    flat = np.arange(spec.n_cells_total)
    lo = spec.cell_lo(flat)
    nearest = np.clip(0.0, lo, lo + spec.dv)
    kept = flat[np.linalg.norm(nearest, axis=-1) <= spec.v_max + 1e-12]
    kept.setflags(write=False)
    return kept


def build_cover(v_max: float, dv: float = 0.7, dt: float = 0.02, t_fin: float = 3.0) -> list[Subdomain]:
    spec = CoverSpec(v_max=v_max, dv=dv, dt=dt, t_fin=t_fin)
    boxes = [spec.cell_box(int(cell)) for cell in retained_cells(spec)]
    return [Subdomain(spec.bin_interval(b), box) for b in range(spec.n_bins) for box in boxes]


def cover_report(spec: CoverSpec) -> CoverReport:
    n_retained = len(retained_cells(spec))
    report = CoverReport(
        n_bins=spec.n_bins,
        n_cells_total=spec.n_cells_total,
        n_cells_retained=n_retained,
        n_subdomains=spec.n_bins * n_retained,
        pad=spec.pad,
    )
    is_reference_scale = np.allclose((spec.v_max, spec.dv, spec.dt, spec.t_fin), (5.0, 0.7, 0.02, 3.0))
    if is_reference_scale and report.n_subdomains != REFERENCE_SUBDOMAINS:
        logger.warning(
            f"Cover has {report.n_subdomains} subdomains, the reference count is {REFERENCE_SUBDOMAINS}. "
            f"The discard rule keeps {n_retained} velocity cells."
        )
    return report


def cell_vertex_grid(spec: CoverSpec, cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Return the unique grid vertices of the given cells as velocities,
    and for every cell the indices of its eight vertices into that array.
    """
    ijk = spec.cell_ijk(cells)[:, None, :] + VERTEX_OFFSETS[None, :, :]
    n = spec.n_axis + 1
    flat = (ijk[..., 0] * n + ijk[..., 1]) * n + ijk[..., 2]
    unique, inverse = np.unique(flat, return_inverse=True)
    vertices = spec.origin + spec.dv * np.stack(np.unravel_index(unique, (n, n, n)), axis=-1)
    return vertices, inverse.reshape(len(cells), 8)


def _peak_steps(k_v: np.ndarray, t_pk: float, a_max: float, v_max: float) -> tuple[np.ndarray, np.ndarray]:
    """Step b along each sign vector, and whether that ray reaches the speed ball at all."""
    b_acc = a_max * t_pk / np.sqrt(3.0)
    # |b sigma + k_v|^2 <= v_max^2 is 3 b^2 + 2 b (sigma . k_v) + |k_v|^2 - v_max^2 <= 0
    proj = np.sum(SIGNS * k_v, axis=-1)
    excess = np.sum(k_v * k_v, axis=-1) - v_max**2
    disc = proj**2 - 3.0 * excess
    root = np.sqrt(np.maximum(disc, 0.0))
    upper = (-proj + root) / 3.0
    lower = np.maximum((-proj - root) / 3.0, 0.0)
    b = np.minimum(b_acc, upper)
    reachable = (disc >= 0) & (lower <= b)
    return np.where(reachable, np.maximum(b, 0.0), 0.0), reachable


def feasible_peak_vels(k_v: np.ndarray, t_pk: float, a_max: float, v_max: float) -> np.ndarray:
    """
    Eight peak velocities k_v + b * sigma for sigma in {-1, 1}^3,
    with b the largest step that keeps the acceleration and speed limits. Shape (..., 8, 3).
    Directions that can't reach the speed ball from a vertex outside it
    take the nearest point of the ball instead.
    """
    k_v = np.asarray(k_v, dtype=float)[..., None, :]
    b, _ = _peak_steps(k_v, t_pk, a_max, v_max)
    peaks = k_v + b[..., None] * SIGNS
    speed = np.linalg.norm(peaks, axis=-1, keepdims=True)
    return np.where(speed > v_max, peaks * (v_max / np.maximum(speed, v_max)), peaks)


def count_clamped_peaks(k_v: np.ndarray, t_pk: float, a_max: float, v_max: float) -> int:
    """Number of peak velocities, over all vertices, that were moved onto the speed ball."""
    _, reachable = _peak_steps(np.asarray(k_v, dtype=float)[..., None, :], t_pk, a_max, v_max)
    return int(np.count_nonzero(~reachable))
