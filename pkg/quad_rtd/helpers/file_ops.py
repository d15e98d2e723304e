# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import hashlib
import os
from collections.abc import Iterable

from .consts import THIS_PACKAGE


def walk_parents(current_dir: str) -> Iterable[str]:
    while not os.path.samefile(parent_dir := os.path.dirname(current_dir), current_dir):
        yield parent_dir
        current_dir = parent_dir


def resolve_relative_path(*paths: str) -> str:
    """Return path to file inside the package dir."""
    for parent_dir in walk_parents(__file__):
        if os.path.basename(parent_dir) == THIS_PACKAGE:
            return os.path.join(parent_dir, *paths)
    raise RuntimeError("couldn't find package dir")


def file_exists(file_path: str) -> bool:
    return bool(file_path) and os.path.isfile(file_path) and os.stat(file_path).st_size > 0


def ensure_parent_dir(file_path: str) -> str:
    if parent := os.path.dirname(os.path.abspath(file_path)):
        os.makedirs(parent, exist_ok=True)
    return file_path


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
