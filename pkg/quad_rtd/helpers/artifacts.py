# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import logging
from typing import NamedTuple

from .basic_types import ArtifactError
from .file_ops import file_exists

logger = logging.getLogger(__name__)


class ArtifactSchema(NamedTuple):
    """Name of an artifact file. The version part changes whenever the layout does."""

    prefix: str
    ver: str
    ext: str

    @property
    def name(self) -> str:
        return f"{self.prefix}.{self.ver}.{self.ext}"


class ArtifactHeader(NamedTuple):
    magic: str
    version: int
    config_hash: str

    def check(self, expected: "ArtifactHeader", path: str, *, force: bool = False) -> None:
        if self.magic != expected.magic:
            raise ArtifactError(path, f"bad magic {self.magic!r}, expected {expected.magic!r}")
        if self.version != expected.version:
            raise ArtifactError(path, f"version {self.version} is not supported (expected {expected.version})")
        if self.config_hash != expected.config_hash:
            if not force:
                raise ArtifactError(path, "artifact was built with a different config")
            logger.warning(f"Config hash mismatch ignored for {path}.")


def require_artifact(path: str, what: str) -> str:
    if not file_exists(path):
        raise ArtifactError(path, f"missing {what}")
    return path


FRS_SCHEMA = ArtifactSchema(prefix="frs", ver="v1", ext="json")
TABLE_SCHEMA = ArtifactSchema(prefix="error_table", ver="v1", ext="bin")
