# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import json
import logging
from typing import Optional

from ..helpers.artifacts import ArtifactHeader, require_artifact
from ..helpers.basic_types import ArtifactError
from ..helpers.file_ops import ensure_parent_dir
from ..trajectory.basic_types import ParamBounds, TrajTiming
from .basic_types import TimedFRS, TimedZonotope

logger = logging.getLogger(__name__)

FRS_MAGIC = "quad-rtd-frs"
FRS_VERSION = 1


def save_frs(frs: TimedFRS, path: str, config_hash: str = "") -> None:
    data = {
        "magic": FRS_MAGIC,
        "version": FRS_VERSION,
        "config_hash": config_hash,
        "timing": frs.timing._asdict(),
        "bounds": frs.bounds._asdict(),
        "dt": frs.dt,
        "metadata": frs.metadata,
        "steps": [step.to_json() for step in frs.steps],
    }
    with open(ensure_parent_dir(path), "w", encoding="utf8") as f:
        json.dump(data, f)
    logger.info(f"Saved FRS with {len(frs)} steps to {path}.")


def load_frs(
    path: str,
    expected_hash: Optional[str] = None,
    timing: Optional[TrajTiming] = None,
    force: bool = False,
) -> TimedFRS:
    logger.info("Reading FRS...")
    try:
        with open(require_artifact(path, "FRS"), encoding="utf8") as f:
            data = json.load(f)
        found = ArtifactHeader(str(data["magic"]), int(data["version"]), str(data["config_hash"]))
        stored_timing = TrajTiming(**data["timing"])
        frs = TimedFRS(
            steps=tuple(TimedZonotope.from_json(step) for step in data["steps"]),
            timing=stored_timing,
            bounds=ParamBounds(**data["bounds"]),
            dt=float(data["dt"]),
            metadata=dict(data.get("metadata", {})),
        )
    except ArtifactError:
        raise
    except (ValueError, KeyError, TypeError) as ex:
        raise ArtifactError(path, "FRS file is corrupt or truncated", exception=ex) from ex
    expected = ArtifactHeader(FRS_MAGIC, FRS_VERSION, found.config_hash if expected_hash is None else expected_hash)
    found.check(expected, path, force=force)
    if timing is not None and tuple(timing) != tuple(stored_timing):
        if not force:
            raise ArtifactError(path, f"FRS was built for timing {tuple(stored_timing)}, planner uses {tuple(timing)}")
        logger.warning(f"Timing mismatch ignored for {path}.")
    logger.info(f"Initialized FRS with {len(frs)} steps.")
    return frs
