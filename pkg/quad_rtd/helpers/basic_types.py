# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import dataclasses
from typing import Optional


@dataclasses.dataclass
class ArtifactError(RuntimeError):
    path: str
    explanation: str
    exception: Optional[Exception] = None

    def __str__(self) -> str:
        return f"{self.path}: {self.explanation}"


@dataclasses.dataclass
class ConfigError(ValueError):
    key: str
    explanation: str

    def __str__(self) -> str:
        return f"config key '{self.key}': {self.explanation}"
