# Copyright: quad-rtd contributors
# License: GNU AGPL, version 3 or later; http://www.gnu.org/licenses/agpl.html

import math
from collections.abc import Iterable, Sequence
from typing import TypeVar

T = TypeVar("T")


def split_list(input_list: Sequence[T], n_chunks: int) -> Iterable[Sequence[T]]:
    """Splits a list into N chunks."""
    if not input_list:
        return
    chunk_size = math.ceil(len(input_list) / max(1, n_chunks))
    for i in range(0, len(input_list), chunk_size):
        yield input_list[i : i + chunk_size]
