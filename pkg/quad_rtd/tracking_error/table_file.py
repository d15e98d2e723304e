# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

"""
Binary storage of the tracking error table.

Layout, little endian:
header (magic, version, config hash, dv, dt, t_fin, v_max, slack, n_axis, n_bins, n_cells),
retained cell indices as int64, then lo and hi as float64 arrays of shape (n_bins, n_cells, 3).
Build metadata goes to a JSON file next to the table.
"""

import dataclasses
import json
import logging
import struct
from typing import Optional

import numpy as np

from ..helpers.artifacts import ArtifactHeader, require_artifact
from ..helpers.basic_types import ArtifactError
from ..helpers.file_ops import ensure_parent_dir
from .basic_types import CoverSpec, TableMetadata
from .cover import cover_report
from .table import TrackingErrorTable

logger = logging.getLogger(__name__)

TABLE_MAGIC = "QRTDERRT"
TABLE_VERSION = 1
HEADER = struct.Struct("<8sI64s5d3I")


def sidecar_path(path: str) -> str:
    return f"{path}.json"


def save_table(table: TrackingErrorTable, path: str) -> None:
    spec, meta = table.spec, table.metadata
    header = HEADER.pack(
        TABLE_MAGIC.encode("ascii"),
        TABLE_VERSION,
        meta.config_hash.encode("ascii").ljust(64, b"\0"),
        spec.dv,
        spec.dt,
        spec.t_fin,
        spec.v_max,
        meta.slack,
        spec.n_axis,
        spec.n_bins,
        len(table.cells),
    )
    with open(ensure_parent_dir(path), "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(table.cells, dtype="<i8").tobytes())
        f.write(np.ascontiguousarray(table.lo, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(table.hi, dtype="<f8").tobytes())
    with open(sidecar_path(path), "w", encoding="utf8") as f:
        sidecar = {
            "cover": spec.to_json(),
            "report": cover_report(spec)._asdict(),
            "metadata": meta.to_json(),
        }
        json.dump(sidecar, f, indent=2)
    logger.info(f"Saved tracking error table to {path}.")


def _read_metadata(path: str, config_hash: str, slack: float) -> TableMetadata:
    try:
        with open(sidecar_path(path), encoding="utf8") as f:
            data = json.load(f)["metadata"]
        known = {field.name for field in dataclasses.fields(TableMetadata)}
        return TableMetadata(**{key: value for key, value in data.items() if key in known})
    except (OSError, KeyError, ValueError, TypeError):
        logger.warning(f"Metadata of {path} is missing or unreadable.")
        return TableMetadata(slack=slack, config_hash=config_hash)


def load_table(path: str, expected_hash: Optional[str] = None, force: bool = False) -> TrackingErrorTable:
    logger.info("Reading tracking error table...")
    with open(require_artifact(path, "tracking error table"), "rb") as f:
        data = f.read()
    if len(data) < HEADER.size:
        raise ArtifactError(path, "file is truncated")
    magic, version, raw_hash, dv, dt, t_fin, v_max, slack, n_axis, n_bins, n_cells = HEADER.unpack_from(data)
    found = ArtifactHeader(magic.decode("ascii", "replace"), version, raw_hash.rstrip(b"\0").decode("ascii", "replace"))
    expected = ArtifactHeader(TABLE_MAGIC, TABLE_VERSION, found.config_hash if expected_hash is None else expected_hash)
    found.check(expected, path, force=force)
    spec = CoverSpec(v_max=v_max, dv=dv, dt=dt, t_fin=t_fin)
    if spec.n_axis != n_axis or spec.n_bins != n_bins:
        raise ArtifactError(path, "cover parameters do not match the stored grid")
    n_values = n_bins * n_cells * 3
    expected_size = HEADER.size + 8 * n_cells + 2 * 8 * n_values
    if len(data) != expected_size:
        raise ArtifactError(path, f"expected {expected_size} bytes, found {len(data)}")
    offset = HEADER.size
    cells = np.frombuffer(data, dtype="<i8", count=n_cells, offset=offset).astype(np.int64)
    offset += 8 * n_cells
    lo = np.frombuffer(data, dtype="<f8", count=n_values, offset=offset).reshape(n_bins, n_cells, 3).copy()
    offset += 8 * n_values
    hi = np.frombuffer(data, dtype="<f8", count=n_values, offset=offset).reshape(n_bins, n_cells, 3).copy()
    table = TrackingErrorTable(spec, cells, lo, hi, _read_metadata(path, found.config_hash, slack))
    logger.info(f"Initialized tracking error table with {n_cells} cells and {n_bins} time bins.")
    return table
